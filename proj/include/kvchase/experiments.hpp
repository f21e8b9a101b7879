#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kvchase/json_fwd.hpp"

namespace kvchase {

// One sweep cell. `ref` is an optional analytic reference value (NaN when
// absent); it travels in JSON output only -- the CSV schema is fixed.
// Wall time is reported on the console, never in emitted files, so reruns
// with one seed are byte-identical.
struct ExperimentRecord {
  std::string experiment;
  int n = 0, k = 0, s = 0, L = 0, T = 0, H = 0, m = 0, p = 0;
  long long trials = 0;
  long long successes = 0;
  double accuracy = 0.0;
  std::uint64_t seed = 0;
  double ref;  // NaN unless set

  ExperimentRecord();
  bool has_ref() const;

  nlohmann::json to_json() const;
  static ExperimentRecord from_json(const nlohmann::json& j);
};

// Deterministic per-record seed: folds the master seed, the experiment id,
// and the parameter tuple, so cells can run in any order (or in parallel)
// without changing output.
std::uint64_t record_seed(std::uint64_t master_seed, const std::string& experiment,
                          int n, int k, int s, int L, int T, int H, int m, int p);

// Serial lookup program with the oracle cache: accuracy jumps to exactly 1
// at L = k. ks defaults to {1,2,4,8,12}, L runs 1..L_max.
std::vector<ExperimentRecord> run_serial_sweep(int n, std::vector<int> ks, int L_max,
                                               long long trials, std::uint64_t master_seed);

// Windowed doubling across cache sizes; also emits one minimum-depth row per
// s (the smallest L reaching accuracy 1).
std::vector<ExperimentRecord> run_windowed_sweep(int n, int k, std::vector<int> ss,
                                                 int L_max, long long trials,
                                                 std::uint64_t master_seed);

// Stage game against a shared uniform random cache, doubling destinations,
// T = max(1, ceil_log2(k)) stages. Each record's `ref` carries the analytic
// main-term ceiling (s/(n-T))^T.
std::vector<ExperimentRecord> run_random_cache_sweep(int n, int s, std::vector<int> ks,
                                                     long long trials,
                                                     std::uint64_t master_seed);

// Depth-versus-cache-size curves: per k in ks and s in ss, one row each for
// the window count floor ceil(k/s), the doubling-schedule depth, and the
// serial depth k (L column holds the depth; trials/successes are zero).
std::vector<ExperimentRecord> depth_curve_records(int n, std::vector<int> ks,
                                                  std::vector<int> ss);

// Sorts by (experiment, n, k, s, L, T, H, m, p) and writes CSV (fixed column
// order: experiment,n,k,s,L,T,H,m,p,trials,successes,accuracy,seed) or JSON.
void emit_records(std::vector<ExperimentRecord> records, const std::string& format,
                  const std::string& path);
std::string records_to_csv(std::vector<ExperimentRecord> records);
std::string records_to_json_text(std::vector<ExperimentRecord> records);
std::vector<ExperimentRecord> records_from_json_text(const std::string& text);

}  // namespace kvchase
