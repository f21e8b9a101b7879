#include "kvchase/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "kvchase/bounds.hpp"
#include "kvchase/constructions.hpp"
#include "kvchase/controllers.hpp"
#include "kvchase/engine.hpp"
#include "kvchase/rng.hpp"
#include "kvchase/task.hpp"

namespace kvchase {

ExperimentRecord::ExperimentRecord() : ref(std::numeric_limits<double>::quiet_NaN()) {}

bool ExperimentRecord::has_ref() const { return !std::isnan(ref); }

nlohmann::json ExperimentRecord::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["n"] = n;
  j["k"] = k;
  j["s"] = s;
  j["L"] = L;
  j["T"] = T;
  j["H"] = H;
  j["m"] = m;
  j["p"] = p;
  j["trials"] = trials;
  j["successes"] = successes;
  j["accuracy"] = accuracy;
  j["seed"] = seed;
  if (has_ref()) j["ref"] = ref;
  return j;
}

ExperimentRecord ExperimentRecord::from_json(const nlohmann::json& j) {
  ExperimentRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.n = j.at("n").get<int>();
  r.k = j.at("k").get<int>();
  r.s = j.at("s").get<int>();
  r.L = j.at("L").get<int>();
  r.T = j.at("T").get<int>();
  r.H = j.at("H").get<int>();
  r.m = j.at("m").get<int>();
  r.p = j.at("p").get<int>();
  r.trials = j.at("trials").get<long long>();
  r.successes = j.at("successes").get<long long>();
  r.accuracy = j.at("accuracy").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("ref")) r.ref = j.at("ref").get<double>();
  return r;
}

std::uint64_t record_seed(std::uint64_t master_seed, const std::string& experiment,
                          int n, int k, int s, int L, int T, int H, int m, int p) {
  std::uint64_t h = seed_combine(master_seed, fnv1a(experiment.c_str()));
  for (const int v : {n, k, s, L, T, H, m, p})
    h = seed_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
  return h;
}

namespace {

// Engine dimensions used by engine-backed sweeps: one head, 4-bit entries,
// width 8 unless the pointer fields of a larger n need more coordinates.
void engine_dims(int n, int& H, int& m, int& p) {
  H = 1;
  p = 4;
  const int c = static_cast<int>(ceil_div(ceil_log2(static_cast<long long>(n) + 1), p));
  m = std::max(8, 1 + 2 * c);
}

}  // namespace

std::vector<ExperimentRecord> run_serial_sweep(int n, std::vector<int> ks, int L_max,
                                               long long trials, std::uint64_t master_seed) {
  if (ks.empty()) ks = {1, 2, 4, 8, 12};
  int H = 0, m = 0, p = 0;
  engine_dims(n, H, m, p);

  std::vector<ExperimentRecord> records;
  for (const int k : ks)
    for (int L = 1; L <= L_max; ++L) {
      ModelConfig cfg;
      cfg.n = n;
      cfg.k = k;
      cfg.L = L;
      cfg.H = H;
      cfg.m = m;
      cfg.p = p;
      cfg.s = 1;
      cfg.validate();
      const LayerProgram program = build_serial_program(cfg);

      ExperimentRecord rec;
      rec.experiment = "serial-threshold";
      rec.n = n;
      rec.k = k;
      rec.s = 1;
      rec.L = L;
      rec.T = 0;
      rec.H = H;
      rec.m = m;
      rec.p = p;
      rec.trials = trials;
      rec.seed = record_seed(master_seed, rec.experiment, n, k, 1, L, 0, H, m, p);

      for (long long i = 0; i < trials; ++i) {
        const std::uint64_t trial_seed = seed_combine(rec.seed, static_cast<std::uint64_t>(i));
        const Permutation pi = random_permutation(n, trial_seed);
        auto controller = oracle_controller(pi, 1);
        const ForwardResult r = forward(program, pi, *controller, cfg);
        if (r.answer == chain(pi, k).answer()) rec.successes += 1;
      }
      rec.accuracy = trials > 0 ? static_cast<double>(rec.successes) /
                                      static_cast<double>(trials)
                                : 0.0;
      records.push_back(std::move(rec));
    }
  return records;
}

std::vector<ExperimentRecord> run_windowed_sweep(int n, int k, std::vector<int> ss,
                                                 int L_max, long long trials,
                                                 std::uint64_t master_seed) {
  if (ss.empty()) ss = {1, 2, 4, 8, 16};

  std::vector<ExperimentRecord> records;
  for (const int s : ss) {
    const PdSchedule sched = pd_schedule(n, k, s);
    int min_depth = 0;
    for (int L = 1; L <= L_max; ++L) {
      ExperimentRecord rec;
      rec.experiment = "windowed-depth";
      rec.n = n;
      rec.k = k;
      rec.s = s;
      rec.L = L;
      rec.T = sched.stages_per_window;
      rec.trials = trials;
      rec.seed = record_seed(master_seed, rec.experiment, n, k, s, L,
                             sched.stages_per_window, 0, 0, 0);

      for (long long i = 0; i < trials; ++i) {
        const std::uint64_t trial_seed = seed_combine(rec.seed, static_cast<std::uint64_t>(i));
        const Permutation pi = random_permutation(n, trial_seed);
        const WindowedPdResult res = simulate_windowed_pd(pi, k, s, L);
        if (res.success && res.answer == chain(pi, k).answer()) rec.successes += 1;
      }
      rec.accuracy = trials > 0 ? static_cast<double>(rec.successes) /
                                      static_cast<double>(trials)
                                : 0.0;
      if (min_depth == 0 && rec.trials > 0 && rec.successes == rec.trials) min_depth = L;
      records.push_back(std::move(rec));
    }

    if (min_depth > 0) {
      ExperimentRecord mark;
      mark.experiment = "windowed-mindepth";
      mark.n = n;
      mark.k = k;
      mark.s = s;
      mark.L = min_depth;
      mark.T = sched.stages_per_window;
      mark.trials = trials;
      mark.successes = trials;
      mark.accuracy = 1.0;
      mark.seed = record_seed(master_seed, mark.experiment, n, k, s, min_depth,
                              sched.stages_per_window, 0, 0, 0);
      records.push_back(std::move(mark));
    }
  }
  return records;
}

std::vector<ExperimentRecord> run_random_cache_sweep(int n, int s, std::vector<int> ks,
                                                     long long trials,
                                                     std::uint64_t master_seed) {
  if (ks.empty()) ks = {1, 2, 4, 8, 16};

  std::vector<ExperimentRecord> records;
  for (const int k : ks) {
    const StageGame game = StageGame::doubling(n, s, k);
    const int T = game.stages();

    ExperimentRecord rec;
    rec.experiment = "random-cache-joint";
    rec.n = n;
    rec.k = k;
    rec.s = s;
    rec.L = 0;
    rec.T = T;
    rec.trials = trials;
    rec.seed = record_seed(master_seed, rec.experiment, n, k, s, 0, T, 0, 0, 0);
    if (n - T > 0)
      rec.ref = T == 1 ? static_cast<double>(s) / n
                       : std::pow(static_cast<double>(s) / (n - T), T);

    for (long long i = 0; i < trials; ++i) {
      const std::uint64_t trial_seed = seed_combine(rec.seed, static_cast<std::uint64_t>(i));
      const Permutation pi = random_permutation(n, trial_seed);
      auto controller =
          oblivious_random_controller(n, s, seed_combine(trial_seed, 1), true);
      const std::vector<bool> hits = run_stage_game(pi, *controller, game);
      if (std::all_of(hits.begin(), hits.end(), [](bool h) { return h; }))
        rec.successes += 1;
    }
    rec.accuracy = trials > 0 ? static_cast<double>(rec.successes) /
                                    static_cast<double>(trials)
                              : 0.0;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ExperimentRecord> depth_curve_records(int n, std::vector<int> ks,
                                                  std::vector<int> ss) {
  if (ks.empty()) ks = {4, 8, 16};
  if (ss.empty()) ss = {1, 2, 4, 8, 16};

  std::vector<ExperimentRecord> records;
  for (const int k : ks)
    for (const int s : ss) {
      ExperimentRecord lower;
      lower.experiment = "depth-lower";
      lower.n = n;
      lower.k = k;
      lower.s = s;
      lower.L = static_cast<int>(ceil_div(k, s));
      records.push_back(std::move(lower));

      ExperimentRecord pd;
      pd.experiment = "depth-pd";
      pd.n = n;
      pd.k = k;
      pd.s = s;
      pd.L = pd_schedule(n, k, s).depth;
      records.push_back(std::move(pd));

      ExperimentRecord serial;
      serial.experiment = "depth-serial";
      serial.n = n;
      serial.k = k;
      serial.s = s;
      serial.L = k;
      records.push_back(std::move(serial));
    }
  return records;
}

namespace {

void sort_records(std::vector<ExperimentRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              return std::tie(a.experiment, a.n, a.k, a.s, a.L, a.T, a.H, a.m, a.p) <
                     std::tie(b.experiment, b.n, b.k, b.s, b.L, b.T, b.H, b.m, b.p);
            });
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string records_to_csv(std::vector<ExperimentRecord> records) {
  sort_records(records);
  std::string out = "experiment,n,k,s,L,T,H,m,p,trials,successes,accuracy,seed\n";
  for (const ExperimentRecord& r : records) {
    out += r.experiment;
    for (const long long v : {static_cast<long long>(r.n), static_cast<long long>(r.k),
                              static_cast<long long>(r.s), static_cast<long long>(r.L),
                              static_cast<long long>(r.T), static_cast<long long>(r.H),
                              static_cast<long long>(r.m), static_cast<long long>(r.p),
                              r.trials, r.successes})
      out += "," + std::to_string(v);
    out += "," + fixed6(r.accuracy);
    out += "," + std::to_string(r.seed);
    out += "\n";
  }
  return out;
}

std::string records_to_json_text(std::vector<ExperimentRecord> records) {
  sort_records(records);
  nlohmann::json arr = nlohmann::json::array();
  for (const ExperimentRecord& r : records) arr.push_back(r.to_json());
  return arr.dump(2) + "\n";
}

std::vector<ExperimentRecord> records_from_json_text(const std::string& text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<ExperimentRecord> records;
  for (const auto& j : arr) records.push_back(ExperimentRecord::from_json(j));
  return records;
}

void emit_records(std::vector<ExperimentRecord> records, const std::string& format,
                  const std::string& path) {
  if (records.empty()) throw std::invalid_argument("emit_records: no records");
  std::string text;
  if (format == "csv")
    text = records_to_csv(std::move(records));
  else if (format == "json")
    text = records_to_json_text(std::move(records));
  else
    throw std::invalid_argument("emit_records: format must be csv or json");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_records: cannot open " + path);
  out << text;
  if (!out) throw std::runtime_error("emit_records: write failed for " + path);
}

}  // namespace kvchase
