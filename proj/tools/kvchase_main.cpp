#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kvchase/bounds.hpp"
#include "kvchase/constructions.hpp"
#include "kvchase/controllers.hpp"
#include "kvchase/engine.hpp"
#include "kvchase/experiments.hpp"
#include "kvchase/rng.hpp"
#include "kvchase/task.hpp"
#include "kvchase/verify.hpp"

namespace {

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start)
      .count();
}

// Console gets the timing; emitted files never do, so reruns stay
// byte-identical.
void deliver(std::vector<kvchase::ExperimentRecord> records, const std::string& format,
             const std::string& out, Clock::time_point start) {
  const std::size_t count = records.size();
  if (out.empty()) {
    std::cout << (format == "json" ? kvchase::records_to_json_text(std::move(records))
                                   : kvchase::records_to_csv(std::move(records)));
    std::cerr << "# " << count << " records in " << elapsed_ms(start) << " ms\n";
  } else {
    kvchase::emit_records(std::move(records), format, out);
    std::cout << count << " records -> " << out << " (" << elapsed_ms(start) << " ms)\n";
  }
}

int engine_width(int n) {
  const int c = static_cast<int>(
      kvchase::ceil_div(kvchase::ceil_log2(static_cast<long long>(n) + 1), 4));
  return std::max(8, 1 + 2 * c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation lab for cache-restricted pointer chasing"};
  app.require_subcommand(1);

  std::uint64_t seed = 12345;
  app.add_option("--seed", seed, "master seed (env KVCHASE_SEED)")
      ->envname("KVCHASE_SEED");

  std::string format = "csv";
  std::string out;

  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", out, "output path (default: stdout)");
  };

  // serial-sweep
  auto* serial = app.add_subcommand(
      "serial-sweep", "layer-by-layer lookups with the oracle cache, accuracy vs L");
  int sr_n = 16, sr_L = 16;
  long long sr_trials = 5000;
  std::vector<int> sr_ks;
  serial->add_option("--n", sr_n, "ring size");
  serial->add_option("--k", sr_ks, "hop counts (repeat or comma-separate)")
      ->delimiter(',');
  serial->add_option("--L", sr_L, "maximum layer budget");
  serial->add_option("--trials", sr_trials, "random permutations per cell");
  add_io(serial);

  // windowed-sweep
  auto* windowed = app.add_subcommand(
      "windowed-sweep", "windowed pointer doubling, accuracy vs L per cache size");
  int wd_n = 16, wd_k = 8, wd_L = 8;
  long long wd_trials = 5000;
  std::vector<int> wd_ss;
  windowed->add_option("--n", wd_n, "ring size");
  windowed->add_option("--k", wd_k, "hop count");
  windowed->add_option("--s", wd_ss, "cache sizes (repeat or comma-separate)")
      ->delimiter(',');
  windowed->add_option("--L", wd_L, "maximum layer budget");
  windowed->add_option("--trials", wd_trials, "random permutations per cell");
  add_io(windowed);

  // random-cache
  auto* random_cache = app.add_subcommand(
      "random-cache", "stage game against a shared uniform random cache");
  int rc_n = 16, rc_s = 8;
  long long rc_trials = 5000;
  std::vector<int> rc_ks;
  random_cache->add_option("--n", rc_n, "ring size");
  random_cache->add_option("--s", rc_s, "cache size");
  random_cache->add_option("--k", rc_ks, "hop counts (repeat or comma-separate)")
      ->delimiter(',');
  random_cache->add_option("--trials", rc_trials, "random permutations per cell");
  add_io(random_cache);

  // bounds-table
  auto* bounds = app.add_subcommand(
      "bounds-table", "exact depth bounds for one configuration; optional curve records");
  int bt_n = 16, bt_k = 8, bt_s = 8, bt_H = 1, bt_m = 8, bt_p = 4;
  std::vector<int> bt_curve_ks, bt_curve_ss;
  bounds->add_option("--n", bt_n, "ring size");
  bounds->add_option("--k", bt_k, "hop count");
  bounds->add_option("--s", bt_s, "cache size");
  bounds->add_option("--H", bt_H, "heads");
  bounds->add_option("--m", bt_m, "width");
  bounds->add_option("--p", bt_p, "bits per entry");
  bounds->add_option("--curve-k", bt_curve_ks, "hop counts for depth-curve records")
      ->delimiter(',');
  bounds->add_option("--curve-s", bt_curve_ss, "cache sizes for depth-curve records")
      ->delimiter(',');
  add_io(bounds);

  // verify-lemmas
  auto* verify = app.add_subcommand(
      "verify-lemmas", "exhaustive small-instance checks; nonzero exit on any violation");

  // estimate-star
  auto* star = app.add_subcommand(
      "estimate-star", "Monte Carlo chain-exit mass at a window boundary (evidence only)");
  int es_n = 64, es_k = 8, es_s = 2, es_L = 4, es_window = 1;
  long long es_trials = 20000;
  std::string es_controller = "random";
  star->add_option("--n", es_n, "ring size");
  star->add_option("--k", es_k, "hop count");
  star->add_option("--s", es_s, "cache size");
  star->add_option("--L", es_L, "layer budget");
  star->add_option("--window", es_window, "window index (1-based)");
  star->add_option("--trials", es_trials, "permutations drawn");
  star->add_option("--controller", es_controller, "random | chain-tracking | full")
      ->check(CLI::IsMember({"random", "chain-tracking", "full"}));
  add_io(star);

  CLI11_PARSE(app, argc, argv);
  const auto start = Clock::now();

  try {
    if (serial->parsed()) {
      deliver(kvchase::run_serial_sweep(sr_n, sr_ks, sr_L, sr_trials, seed), format, out,
              start);
    } else if (windowed->parsed()) {
      deliver(kvchase::run_windowed_sweep(wd_n, wd_k, wd_ss, wd_L, wd_trials, seed),
              format, out, start);
    } else if (random_cache->parsed()) {
      deliver(kvchase::run_random_cache_sweep(rc_n, rc_s, rc_ks, rc_trials, seed), format,
              out, start);
    } else if (bounds->parsed()) {
      const kvchase::BoundsReport report =
          kvchase::bounds_report(bt_n, bt_k, bt_s, bt_H, bt_m, bt_p);
      std::cout << report.to_text();
      if (!out.empty())
        deliver(kvchase::depth_curve_records(bt_n, bt_curve_ks, bt_curve_ss), format, out,
                start);
    } else if (verify->parsed()) {
      std::vector<kvchase::VerificationReport> reports;

      const kvchase::ReachabilityReport reach = kvchase::verify_reachability(5, 2, 2);
      reports.push_back(reach.report);

      reports.push_back(kvchase::verify_trace_equivalence(
          5, 2, 1, [](const kvchase::Permutation& pi) {
            return kvchase::adaptive_chain_tracking_controller(pi.n(), 1);
          }));
      reports.push_back(kvchase::verify_trace_equivalence_negative(4, 2, 1));

      for (int B = 0; B <= 3; ++B) {
        kvchase::ModelConfig census;
        census.n = 4;
        census.k = 1;
        census.L = B;
        census.H = 1;
        census.m = 1;
        census.p = 1;
        census.s = 2;
        reports.push_back(kvchase::verify_state_census(census, B));
      }

      reports.push_back(kvchase::verify_adversarial_swap(5, 3, 2, 1));

      const std::vector<int> law_ns = {4, 5, 6};
      reports.push_back(kvchase::verify_adaptive_exactness(law_ns, 3));
      reports.push_back(kvchase::verify_oblivious_soundness(law_ns, 3));
      reports.push_back(kvchase::verify_adaptive_ceiling(law_ns, 3));

      bool ok = true;
      for (const auto& r : reports) {
        std::cout << r.to_line() << "\n";
        ok = ok && r.passed();
      }
      std::cout << (ok ? "all checks passed" : "VIOLATIONS FOUND") << " ("
                << elapsed_ms(start) << " ms)\n";
      return ok ? 0 : 1;
    } else if (star->parsed()) {
      kvchase::ModelConfig cfg;
      cfg.n = es_n;
      cfg.k = es_k;
      cfg.L = es_L;
      cfg.H = 1;
      cfg.m = engine_width(es_n);
      cfg.p = 4;
      cfg.s = es_controller == "full" ? es_n : es_s;
      cfg.validate();

      kvchase::ControllerFactory make;
      if (es_controller == "chain-tracking")
        make = [&cfg](std::uint64_t) {
          return kvchase::adaptive_chain_tracking_controller(cfg.n, cfg.s);
        };
      else  // "random" and "full" both draw fresh uniform sets
        make = [&cfg](std::uint64_t trial_seed) {
          return kvchase::oblivious_random_controller(cfg.n, cfg.s, trial_seed, false);
        };

      const kvchase::StarEstimate est =
          kvchase::estimate_star(make, cfg, es_window, es_trials, seed);
      std::cout << est.to_json().dump(2) << "\n";
      std::cerr << "# evidence only, not a pass/fail check (" << elapsed_ms(start)
                << " ms)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
