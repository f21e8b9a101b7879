#include "kvchase/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "kvchase/bounds.hpp"
#include "kvchase/controllers.hpp"
#include "kvchase/errors.hpp"

namespace kvchase {

void ModelConfig::validate() const {
  if (n < 1) throw std::invalid_argument("ModelConfig: n must be >= 1");
  if (k < 1) throw std::invalid_argument("ModelConfig: k must be >= 1");
  if (L < 0) throw std::invalid_argument("ModelConfig: L must be >= 0");
  if (H < 1) throw std::invalid_argument("ModelConfig: H must be >= 1");
  if (m < 1) throw std::invalid_argument("ModelConfig: m must be >= 1");
  if (p < 1 || p > 20) throw std::invalid_argument("ModelConfig: p must be in 1..20");
  if (s < 1) throw std::invalid_argument("ModelConfig: s must be >= 1");
  if (s > n + 1) throw std::invalid_argument("ModelConfig: s must be <= n+1");
}

int ModelConfig::pointer_coords() const {
  // digits of base 2^p covering values 0..n
  return static_cast<int>(ceil_div(ceil_log2(static_cast<long long>(n) + 1), p));
}

bool QVec::is_zero() const {
  for (const auto c : coords)
    if (c != 0) return false;
  return true;
}

QVec quantize(const std::vector<double>& v, int p) {
  if (p < 1 || p > 20) throw std::invalid_argument("quantize: p must be in 1..20");
  const std::uint32_t top = (1u << p) - 1u;
  QVec q;
  q.coords.reserve(v.size());
  for (const double x : v) {
    if (std::isnan(x)) throw std::invalid_argument("quantize: NaN coordinate");
    const double r = std::floor(x + 0.5);  // round half up
    std::uint32_t c = 0;
    if (r >= static_cast<double>(top))
      c = top;
    else if (r > 0.0)
      c = static_cast<std::uint32_t>(r);
    q.coords.push_back(c);
  }
  return q;
}

namespace {

void write_digits(QVec& v, int offset, int count, int value, int p) {
  const std::uint32_t base_mask = (1u << p) - 1u;
  std::uint32_t rest = static_cast<std::uint32_t>(value);
  for (int i = 0; i < count; ++i) {
    v.coords[static_cast<std::size_t>(offset + i)] = rest & base_mask;
    rest >>= p;
  }
}

int read_digits(const QVec& v, int offset, int count, int p) {
  long long value = 0;
  for (int i = count - 1; i >= 0; --i)
    value = (value << p) | v.coords[static_cast<std::size_t>(offset + i)];
  if (value > INT32_MAX) throw CorruptStateError("decode: digit overflow");
  return static_cast<int>(value);
}

bool digits_equal(const QVec& a, int off_a, const QVec& b, int off_b, int count) {
  for (int i = 0; i < count; ++i)
    if (a.coords[static_cast<std::size_t>(off_a + i)] !=
        b.coords[static_cast<std::size_t>(off_b + i)])
      return false;
  return true;
}

}  // namespace

QVec encode_token(int self_index, int payload, const ModelConfig& cfg) {
  cfg.validate();
  const int c = cfg.pointer_coords();
  if (cfg.m < 1 + 2 * c)
    throw std::invalid_argument("encode_token: width m too small for two pointer fields");
  if (self_index < 0 || self_index > cfg.n)
    throw std::invalid_argument("encode_token: self_index out of range");
  if (payload < 0 || payload > cfg.n)
    throw std::invalid_argument("encode_token: payload out of range");
  QVec v;
  v.coords.assign(static_cast<std::size_t>(cfg.m), 0);
  v.coords[0] = self_index == 0 ? 1u : 0u;  // role flag: 1 marks the query slot
  write_digits(v, 1, c, self_index, cfg.p);
  write_digits(v, 1 + c, c, payload, cfg.p);
  return v;
}

int decode_pointer(const QVec& v, PointerField field, const ModelConfig& cfg) {
  const int c = cfg.pointer_coords();
  if (static_cast<int>(v.coords.size()) < 1 + 2 * c)
    throw std::invalid_argument("decode_pointer: vector narrower than the token layout");
  const int offset = field == PointerField::self_index ? 1 : 1 + c;
  const int value = read_digits(v, offset, c, cfg.p);
  if (value > cfg.n)
    throw CorruptStateError("decode_pointer: value " + std::to_string(value) +
                            " exceeds n=" + std::to_string(cfg.n));
  return value;
}

nlohmann::json CacheTrace::to_json() const {
  nlohmann::json j;
  j["layers"] = per_layer;
  j["support"] = support;
  return j;
}

CacheTrace CacheTrace::from_json(const nlohmann::json& j) {
  CacheTrace t;
  t.per_layer = j.at("layers").get<std::vector<std::vector<int>>>();
  t.support = j.at("support").get<std::vector<int>>();
  return t;
}

QVec hard_match_attend(const QVec& query, const std::vector<int>& cache_positions,
                       const LayerState& state, const ModelConfig& cfg) {
  const int c = cfg.pointer_coords();
  const int payload_off = 1 + c;
  int match = -1;
  for (const int pos : cache_positions) {
    const QVec& key = state.reps[static_cast<std::size_t>(pos)];
    if (!digits_equal(key, 1, query, payload_off, c)) continue;
    if (match >= 0)
      throw CorruptStateError("hard_match_attend: two cached keys share self digits");
    match = pos;
  }
  QVec out;
  out.coords.assign(query.coords.size(), 0);
  if (match >= 0) {
    const QVec& key = state.reps[static_cast<std::size_t>(match)];
    for (int i = 0; i < c; ++i)
      out.coords[static_cast<std::size_t>(payload_off + i)] =
          key.coords[static_cast<std::size_t>(payload_off + i)];
  }
  return out;
}

ForwardResult forward(const LayerProgram& program, const Permutation& pi,
                      Controller& controller, const ModelConfig& cfg) {
  cfg.validate();
  if (pi.n() != cfg.n) throw std::invalid_argument("forward: permutation size != cfg.n");

  LayerState state;
  state.reps.reserve(static_cast<std::size_t>(cfg.n) + 1);
  state.reps.push_back(encode_token(0, 1, cfg));  // query starts at z_0 = 1
  for (int i = 1; i <= cfg.n; ++i) state.reps.push_back(encode_token(i, pi.apply(i), cfg));

  std::vector<int> support = {0};
  CacheTrace trace;
  trace.per_layer.reserve(program.layers.size());

  const int c = cfg.pointer_coords();
  const int payload_off = 1 + c;

  for (std::size_t li = 0; li < program.layers.size(); ++li) {
    if (program.layers[li] == LayerOp::carry) {
      trace.per_layer.emplace_back();  // nothing cached, everything carried
      continue;
    }
    EngineView view(support, state, cfg);
    std::vector<int> cached = controller.select_cache(static_cast<int>(li) + 1, view);
    std::sort(cached.begin(), cached.end());
    cached.erase(std::unique(cached.begin(), cached.end()), cached.end());
    if (static_cast<int>(cached.size()) > cfg.s)
      throw CacheOverflowError("forward: controller cached " +
                               std::to_string(cached.size()) + " > s=" +
                               std::to_string(cfg.s) + " positions");
    for (const int pos : cached)
      if (pos < 0 || pos > cfg.n)
        throw std::invalid_argument("forward: cached position out of range");

    // The query attends over the cached set; a hit rewrites its pointer
    // field, a miss leaves it to the residual path. Every other position is
    // carried forward unchanged (evicted tokens keep their last state).
    const QVec out = hard_match_attend(state.reps[0], cached, state, cfg);
    if (!out.is_zero()) {
      for (int i = 0; i < c; ++i)
        state.reps[0].coords[static_cast<std::size_t>(payload_off + i)] =
            out.coords[static_cast<std::size_t>(payload_off + i)];
    }

    trace.per_layer.push_back(cached);
    std::vector<int> merged;
    std::set_union(support.begin(), support.end(), cached.begin(), cached.end(),
                   std::back_inserter(merged));
    support = std::move(merged);
  }

  ForwardResult result;
  result.trace.per_layer = std::move(trace.per_layer);
  result.trace.support = std::move(support);
  result.answer = decode_pointer(state.reps[0], PointerField::payload, cfg);
  result.final_state = std::move(state);
  return result;
}

}  // namespace kvchase
