#pragma once

#include <cstdint>
#include <vector>

#include "kvchase/json_fwd.hpp"
#include "kvchase/task.hpp"

namespace kvchase {

class Controller;

// Model shape: depth L, heads H, width m, precision p bits per coordinate,
// cache size s, on the n-token task with k hops. Coordinates live in
// Q_p = {0..2^p-1}. The width must leave room for a role flag plus two
// pointer fields (see encode_token); s may include the query slot, hence
// s <= n+1. L = 0 is admitted as the no-op base case.
struct ModelConfig {
  int n = 1;
  int k = 1;
  int L = 1;
  int H = 1;
  int m = 3;
  int p = 1;
  int s = 1;

  void validate() const;

  // Digits of base 2^p needed for one pointer in [0..n].
  int pointer_coords() const;
  int payload_offset() const { return 1 + pointer_coords(); }
};

// Quantized representation: m coordinates in Q_p.
struct QVec {
  std::vector<std::uint32_t> coords;
  bool is_zero() const;
  bool operator==(const QVec& o) const { return coords == o.coords; }
  bool operator!=(const QVec& o) const { return coords != o.coords; }
  bool operator<(const QVec& o) const { return coords < o.coords; }
};

// Round-half-up then clamp each entry into Q_p. NaN is rejected.
QVec quantize(const std::vector<double>& v, int p);

// Token layout: coord 0 = role flag (1 iff query slot), coords 1..c = base-2^p
// digits of self_index (little-endian), coords c+1..2c = digits of payload,
// remaining coords 0. The query (self_index 0) carries its current pointer in
// the payload field.
QVec encode_token(int self_index, int payload, const ModelConfig& cfg);

enum class PointerField { self_index, payload };

// Reads one pointer field back out of a representation. A value exceeding n
// cannot come from a valid encoding.
int decode_pointer(const QVec& v, PointerField field, const ModelConfig& cfg);

// Representations of all n+1 positions (index 0 = query) at one layer.
struct LayerState {
  std::vector<QVec> reps;
};

// Per-layer cached position sets plus their union (always includes 0).
struct CacheTrace {
  std::vector<std::vector<int>> per_layer;
  std::vector<int> support;

  nlohmann::json to_json() const;
  static CacheTrace from_json(const nlohmann::json& j);
};

// What the engine runs: a sequence of layer ops. `lookup` layers let the
// query attend over the cached set; `carry` layers touch nothing (padding
// inserted when the budget exceeds the hops needed).
enum class LayerOp { lookup, carry };

struct LayerProgram {
  std::vector<LayerOp> layers;
  int depth() const { return static_cast<int>(layers.size()); }
};

// Saturated one-hot attention. Weight 1 goes to the unique cached key whose
// self-index digits equal the query's pointer (payload) digits; the returned
// vector carries that key's payload digits re-encoded into the query's
// pointer field, zeros elsewhere. No match returns the zero vector (the
// caller's residual path then preserves the query). Two cached keys with
// identical self digits cannot arise from valid encodings of distinct
// positions and are reported as corruption.
QVec hard_match_attend(const QVec& query, const std::vector<int>& cache_positions,
                       const LayerState& state, const ModelConfig& cfg);

struct ForwardResult {
  int answer = 0;
  CacheTrace trace;
  LayerState final_state;
};

// Runs the program layer by layer:
//   1. asks the controller for this layer's cached set, exposing only the
//      representations already inside the running support (position 0 union
//      every earlier cached set) -- locality is enforced architecturally;
//   2. resolves the query's lookup against the cached set;
//   3. carries every non-participating position forward unchanged;
//   4. keeps all coordinates inside Q_p.
// The answer is the query's payload field after the last layer.
ForwardResult forward(const LayerProgram& program, const Permutation& pi,
                      Controller& controller, const ModelConfig& cfg);

}  // namespace kvchase
