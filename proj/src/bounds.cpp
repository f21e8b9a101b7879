#include "kvchase/bounds.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace kvchase {

int ceil_log2(long long n) {
  if (n < 1) throw std::invalid_argument("ceil_log2: n must be >= 1");
  int t = 0;
  long long v = 1;
  while (v < n) {
    v <<= 1;
    ++t;
  }
  return t;
}

long long ceil_div(long long a, long long b) {
  if (b < 1) throw std::invalid_argument("ceil_div: divisor must be >= 1");
  if (a < 0) throw std::invalid_argument("ceil_div: dividend must be >= 0");
  return (a + b - 1) / b;
}

BoundsReport bounds_report(int n, int k, int s, int H, int m, int p) {
  if (n < 2) throw std::invalid_argument("bounds_report: n must be >= 2");
  if (k < 1) throw std::invalid_argument("bounds_report: k must be >= 1");
  if (s < 1) throw std::invalid_argument("bounds_report: s must be >= 1");
  if (H < 1 || m < 1 || p < 1)
    throw std::invalid_argument("bounds_report: H, m, p must be >= 1");

  BoundsReport r;
  r.n = n;
  r.k = k;
  r.s = s;
  r.H = H;
  r.m = m;
  r.p = p;

  const long long read_bits = static_cast<long long>(H) * m * p;
  const int log_n = ceil_log2(n);

  r.W = static_cast<int>(ceil_div(k, s));
  r.B = static_cast<int>(ceil_div(log_n, read_bits));
  r.barrier_regime = read_bits >= log_n;
  r.product_regime =
      16LL * s * s <= n && static_cast<long long>(n) >= 4LL * k;

  // The stronger per-window reach count needs the cycle-structure argument,
  // which is available only in the product regime.
  r.reach_factor = r.product_regime ? r.W : static_cast<int>(ceil_div(k - 1, s));
  r.lower_max = std::max<long long>(r.reach_factor, r.B);
  r.lower_product = static_cast<long long>(r.W) * r.B;
  r.lower_product_conjectural = true;

  const long long route = std::min<long long>(
      k, static_cast<long long>(r.W) * ceil_log2(2LL * s));
  r.upper = route * ceil_div(log_n, static_cast<long long>(m) * p);

  r.s_star = Rational(static_cast<long long>(n) * ceil_log2(k), k);

  r.min_cache_reach_coeff = Rational(k);
  r.min_cache_bandwidth_coeff = Rational(static_cast<long long>(k) * log_n, read_bits);
  return r;
}

Rational BoundsReport::min_cache_for_depth(int L) const {
  if (L < 1) throw std::invalid_argument("min_cache_for_depth: L must be >= 1");
  const Rational inv(1, L);
  return std::max(min_cache_reach_coeff * inv, min_cache_bandwidth_coeff * inv);
}

nlohmann::json BoundsReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["k"] = k;
  j["s"] = s;
  j["H"] = H;
  j["m"] = m;
  j["p"] = p;
  j["windows"] = W;
  j["pointer_layers"] = B;
  j["reach_factor"] = reach_factor;
  j["lower_max"] = lower_max;
  j["lower_product"] = lower_product;
  j["lower_product_conjectural"] = lower_product_conjectural;
  j["upper"] = upper;
  j["barrier_regime"] = barrier_regime;
  j["product_regime"] = product_regime;
  j["s_star"] = s_star.value();
  j["s_star_exact"] = s_star.str();
  j["min_cache_reach_coeff"] = min_cache_reach_coeff.str();
  j["min_cache_bandwidth_coeff"] = min_cache_bandwidth_coeff.str();
  return j;
}

std::string BoundsReport::to_text() const {
  std::ostringstream out;
  auto row = [&out](const std::string& label, const std::string& value,
                    const std::string& note) {
    out << "  " << label;
    for (std::size_t i = label.size(); i < 34; ++i) out << ' ';
    out << value;
    for (std::size_t i = value.size(); i < 14; ++i) out << ' ';
    out << note << "\n";
  };
  out << "depth bounds for n=" << n << " k=" << k << " s=" << s << " H=" << H
      << " m=" << m << " p=" << p << "\n";
  row("windows ceil(k/s)", std::to_string(W), "");
  row("pointer layers B", std::to_string(B), "ceil(log2 n / (H*m*p))");
  row("lower bound (max form)", std::to_string(lower_max),
      "max(reach " + std::to_string(reach_factor) + ", B)");
  row("lower bound (product form)", std::to_string(lower_product), "conjectured");
  row("upper bound (windowed doubling)", std::to_string(upper), "constructive");
  row("serial depth", std::to_string(k), "exact at L = k");
  row("cache transition s*", s_star.str(), "n*ceil(log2 k)/k");
  row("barrier regime", barrier_regime ? "yes" : "no", "H*m*p >= log2 n");
  row("product regime", product_regime ? "yes" : "no", "16 s^2 <= n and n >= 4k");
  out << "attention depth, this task:\n";
  row("full attention", std::to_string(W) + " .. " +
      std::to_string(static_cast<long long>(W) * ceil_log2(2LL * s)),
      "window floor .. doubling route");
  row("recurrent / linear attention", std::to_string(k), "one hop per step");
  return out.str();
}

ObliviousBound oblivious_prob_bound(int n, int s, int T) {
  if (T < 1) throw std::invalid_argument("oblivious_prob_bound: T must be >= 1");
  if (n < T + 1) throw std::invalid_argument("oblivious_prob_bound: need n >= T+1");
  if (s < 0) throw std::invalid_argument("oblivious_prob_bound: s must be >= 0");

  ObliviousBound b;
  b.main = Rational::pow(Rational(s, n - T), T);
  b.error = Rational(2LL * T * T * T, n);
  b.total = b.main + b.error;
  b.vacuous = b.total >= Rational(1);

  // s^T >= 2 T^3 n^(T-1), evaluated exactly
  __int128 lhs = 1, rhs = 2LL * T * T * T;
  bool overflow = false;
  for (int i = 0; i < T && !overflow; ++i) {
    lhs *= s;
    if (lhs > static_cast<__int128>(1) << 100) overflow = true;
  }
  for (int i = 0; i < T - 1 && !overflow; ++i) {
    rhs *= n;
    if (rhs > static_cast<__int128>(1) << 100) overflow = true;
  }
  if (overflow) throw std::overflow_error("oblivious_prob_bound: predicate overflow");
  b.main_term_dominates = lhs >= rhs;
  return b;
}

nlohmann::json ObliviousBound::to_json() const {
  nlohmann::json j;
  j["main"] = main.value();
  j["main_exact"] = main.str();
  j["error"] = error.value();
  j["error_exact"] = error.str();
  j["total"] = total.value();
  j["vacuous"] = vacuous;
  j["main_term_dominates"] = main_term_dominates;
  return j;
}

Rational adaptive_prob(int n, int s) {
  if (n < 1) throw std::invalid_argument("adaptive_prob: n must be >= 1");
  if (s < 1 || s > n) throw std::invalid_argument("adaptive_prob: need 1 <= s <= n");
  return Rational(s, n);
}

SeparationRatio separation_ratio(int n, int s, int T) {
  if (T < 1) throw std::invalid_argument("separation_ratio: T must be >= 1");
  if (s < 1 || s > n) throw std::invalid_argument("separation_ratio: need 1 <= s <= n");
  if (n < T + 1) throw std::invalid_argument("separation_ratio: need n >= T+1");

  const ObliviousBound b = oblivious_prob_bound(n, s, T);
  SeparationRatio r;
  r.main_term_regime = b.main_term_dominates && 4LL * T * T <= n;
  if (r.main_term_regime)
    r.ratio = Rational::pow(Rational(n, s), T - 1) * Rational(1, 4);
  else
    r.ratio = Rational(s, 4LL * T * T * T);
  return r;
}

nlohmann::json SeparationRatio::to_json() const {
  nlohmann::json j;
  j["ratio"] = ratio.value();
  j["ratio_exact"] = ratio.str();
  j["main_term_regime"] = main_term_regime;
  return j;
}

}  // namespace kvchase
