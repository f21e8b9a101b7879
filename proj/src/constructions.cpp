#include "kvchase/constructions.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "kvchase/bounds.hpp"

namespace kvchase {

LayerProgram build_serial_program(const ModelConfig& cfg) {
  cfg.validate();
  LayerProgram program;
  program.layers.reserve(static_cast<std::size_t>(cfg.L));
  const int lookups = std::min(cfg.L, cfg.k);
  for (int i = 0; i < lookups; ++i) program.layers.push_back(LayerOp::lookup);
  for (int i = lookups; i < cfg.L; ++i) program.layers.push_back(LayerOp::carry);
  return program;
}

namespace {

// Raw accounting for one candidate window size.
int depth_for(int k, int s) {
  const int stages = std::max(1, ceil_log2(std::min(s, k)));
  return static_cast<int>(ceil_div(k, s)) * stages;
}

}  // namespace

PdSchedule pd_schedule(int n, int k, int s) {
  if (n < 1) throw std::invalid_argument("pd_schedule: n must be >= 1");
  if (k < 1) throw std::invalid_argument("pd_schedule: k must be >= 1");
  if (s < 1) throw std::invalid_argument("pd_schedule: s must be >= 1");

  int best = 1;
  for (int cand = 2; cand <= s; ++cand)
    if (depth_for(k, cand) < depth_for(k, best)) best = cand;

  PdSchedule sched;
  sched.k = k;
  sched.s = s;
  sched.s_eff = best;
  sched.plan = windows(k, best);
  sched.stages_per_window = std::max(1, ceil_log2(std::min(best, k)));
  sched.depth = sched.plan.count() * sched.stages_per_window;
  return sched;
}

nlohmann::json PdSchedule::to_json() const {
  nlohmann::json j;
  j["windows"] = plan.count();
  j["stages_per_window"] = stages_per_window;
  j["depth"] = depth;
  j["window_size"] = s_eff;
  j["boundaries"] = plan.boundaries;
  return j;
}

WindowedPdResult simulate_windowed_pd(const Permutation& pi, int k, int s, int L_budget) {
  if (k < 0) throw std::invalid_argument("simulate_windowed_pd: k must be >= 0");
  if (L_budget < 0) throw std::invalid_argument("simulate_windowed_pd: L_budget must be >= 0");

  WindowedPdResult result;
  if (k == 0) {
    result.success = true;
    result.answer = 1;
    result.depth_required = 0;
    return result;
  }

  const PdSchedule sched = pd_schedule(pi.n(), k, s);
  result.depth_required = sched.depth;
  result.success = sched.depth <= L_budget;
  if (!result.success) return result;

  // Jump tables double over the cached window positions with saturation:
  // entries whose target already left the window stop growing, which keeps
  // every entry we later read exact. The carried pointer then advances by
  // the window length through the binary decomposition of that length.
  int cur = 1;
  int done = 0;
  for (const int boundary : sched.plan.boundaries) {
    const int delta = boundary - done;

    std::vector<int> sources;
    sources.reserve(static_cast<std::size_t>(delta));
    {
      int walk = cur;
      for (int i = 0; i < delta; ++i) {
        if (std::find(sources.begin(), sources.end(), walk) == sources.end())
          sources.push_back(walk);
        walk = pi.apply(walk);
      }
    }
    const auto cached = [&sources](int pos) {
      return std::find(sources.begin(), sources.end(), pos) != sources.end();
    };

    // tables[r][x] = pi^(2^r)(x) wherever the doubling path stayed cached
    std::vector<std::unordered_map<int, int>> tables;
    tables.emplace_back();
    for (const int x : sources) tables[0][x] = pi.apply(x);
    const int rounds = delta >= 2 ? ceil_log2(delta) : 0;
    for (int r = 1; r <= rounds; ++r) {
      const auto& prev = tables.back();
      std::unordered_map<int, int> next;
      for (const auto& [x, target] : prev)
        next[x] = cached(target) ? prev.at(target) : target;
      tables.push_back(std::move(next));
    }

    for (int r = 0; delta >> r; ++r)
      if ((delta >> r) & 1) cur = tables[static_cast<std::size_t>(r)].at(cur);
    done = boundary;
  }

  result.answer = cur;
  return result;
}

}  // namespace kvchase
