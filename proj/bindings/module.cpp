// Python surface: task generation, the finite-precision engine, the windowed
// doubling construction, the exact probability laws, the depth-bound tables,
// and CSV experiment sweeps. Thin wrappers over the C++ core; permutations
// travel as plain 1-based lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "json.hpp"
#include "kvchase/bounds.hpp"
#include "kvchase/constructions.hpp"
#include "kvchase/controllers.hpp"
#include "kvchase/engine.hpp"
#include "kvchase/experiments.hpp"
#include "kvchase/rational.hpp"
#include "kvchase/task.hpp"
#include "kvchase/verify.hpp"

namespace py = pybind11;
using namespace kvchase;

namespace {

ModelConfig serial_config(int n, int k, int L) {
  ModelConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.L = L;
  cfg.H = 1;
  cfg.p = 4;
  const int c = cfg.pointer_coords();
  cfg.m = std::max(8, 1 + 2 * c);
  cfg.s = 1;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(kvchase, m) {
  m.doc() = "cache-restricted pointer chasing: task, engine, constructions, laws";

  m.def(
      "random_permutation",
      [](int n, std::uint64_t seed) { return random_permutation(n, seed).map(); },
      py::arg("n"), py::arg("seed"),
      "Seeded uniform permutation of 1..n as a 1-based list.");

  m.def(
      "chain_values",
      [](const std::vector<int>& map, int k) { return chain(Permutation(map), k).values; },
      py::arg("permutation"), py::arg("k"),
      "Hop values z_0..z_k starting from token 1.");

  m.def(
      "run_serial",
      [](const std::vector<int>& map, int k, int L) {
        const Permutation pi(map);
        const ModelConfig cfg = serial_config(pi.n(), k, L);
        const LayerProgram program = build_serial_program(cfg);
        auto controller = oracle_controller(pi, 1);
        return forward(program, pi, *controller, cfg).answer;
      },
      py::arg("permutation"), py::arg("k"), py::arg("L"),
      "Answer of the depth-L serial engine run with the oracle cache.");

  m.def(
      "simulate_windowed",
      [](const std::vector<int>& map, int k, int s, int L) {
        const WindowedPdResult r = simulate_windowed_pd(Permutation(map), k, s, L);
        py::dict out;
        out["success"] = r.success;
        out["answer"] = r.answer;
        out["depth_required"] = r.depth_required;
        return out;
      },
      py::arg("permutation"), py::arg("k"), py::arg("s"), py::arg("L"),
      "Windowed pointer doubling under a depth budget.");

  m.def(
      "pd_depth", [](int n, int k, int s) { return pd_schedule(n, k, s).depth; },
      py::arg("n"), py::arg("k"), py::arg("s"),
      "Depth of the windowed doubling schedule.");

  m.def(
      "pd_schedule_info",
      [](int n, int k, int s) { return pd_schedule(n, k, s).to_json().dump(); },
      py::arg("n"), py::arg("k"), py::arg("s"),
      "Schedule description (windows, stages, boundaries) as a JSON string.");

  m.def(
      "bounds_json",
      [](int n, int k, int s, int H, int m_, int p) {
        return bounds_report(n, k, s, H, m_, p).to_json().dump();
      },
      py::arg("n"), py::arg("k"), py::arg("s"), py::arg("H"), py::arg("m"),
      py::arg("p"), "Depth bound table as a JSON string.");

  m.def(
      "adaptive_exact",
      [](int n, int s) {
        const Rational r = adaptive_prob(n, s);
        return py::make_tuple(r.num(), r.den());
      },
      py::arg("n"), py::arg("s"),
      "Exact chain-tracking joint success probability as (numerator, denominator).");

  m.def(
      "oblivious_bound_json",
      [](int n, int s, int T) { return oblivious_prob_bound(n, s, T).to_json().dump(); },
      py::arg("n"), py::arg("s"), py::arg("T"),
      "Two-term oblivious success ceiling as a JSON string.");

  m.def(
      "serial_sweep_csv",
      [](int n, const std::vector<int>& ks, int L_max, long long trials,
         std::uint64_t seed) {
        return records_to_csv(run_serial_sweep(n, ks, L_max, trials, seed));
      },
      py::arg("n"), py::arg("ks"), py::arg("L_max"), py::arg("trials"), py::arg("seed"),
      "Serial threshold sweep as sorted CSV text.");
}
