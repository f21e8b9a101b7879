#pragma once

#include "kvchase/engine.hpp"
#include "kvchase/json_fwd.hpp"
#include "kvchase/task.hpp"

namespace kvchase {

// min(L, k) lookup layers followed by carry padding: with a cache that holds
// the pointer the query needs, each lookup advances the chain one hop, so the
// program is exact whenever L >= k.
LayerProgram build_serial_program(const ModelConfig& cfg);

// Windowed doubling schedule. The raw accounting ceil(k/s)*max(1, ceil(log2
// min(s,k))) is not monotone in s, so the planner picks the effective window
// size s_eff <= s that minimizes total depth (the minimal schedule consistent
// with the depth data points it must reproduce).
struct PdSchedule {
  int k = 0;
  int s = 0;           // requested cache size
  int s_eff = 0;       // window size actually used
  WindowPlan plan;     // windows(k, s_eff)
  int stages_per_window = 0;
  int depth = 0;       // plan.count() * stages_per_window

  nlohmann::json to_json() const;
};

PdSchedule pd_schedule(int n, int k, int s);

// Combinatorial-fidelity run of windowed pointer doubling: per window, a jump
// table over the window's <= s_eff chain positions doubles each stage, and
// the carried pointer advances by the window length via binary decomposition
// of the saturated tables. Succeeds iff the schedule fits the depth budget;
// on success the computed answer always equals the chain oracle.
struct WindowedPdResult {
  bool success = false;
  int answer = 0;       // valid only when success
  int depth_required = 0;
};

WindowedPdResult simulate_windowed_pd(const Permutation& pi, int k, int s, int L_budget);

}  // namespace kvchase
