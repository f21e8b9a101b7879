#pragma once

#include <cstdint>
#include <string>

#include "kvchase/json_fwd.hpp"
#include "kvchase/rational.hpp"

namespace kvchase {

// Smallest t >= 0 with 2^t >= n (n >= 1). All depth/bandwidth formulas below
// use this exact integer form; the nested-ceiling identity
// ceil(log2(n)/q) == ceil(ceil_log2(n)/q) keeps divisions exact too.
int ceil_log2(long long n);

long long ceil_div(long long a, long long b);

// Depth bounds for one (n, k, s, H, m, p) tuple. B is the number of layers
// needed to move one pointer's worth of information through the per-layer
// read budget of H*m*p bits. lower_max is proved; lower_product is the
// conjectured window-times-bandwidth form and is flagged as such. upper is
// the constructive windowed-doubling depth (its encode factor uses m*p: one
// head suffices to write a pointer).
struct BoundsReport {
  int n = 0, k = 0, s = 0, H = 0, m = 0, p = 0;

  int W = 0;                    // ceil(k/s)
  int B = 0;                    // ceil(ceil_log2(n) / (H*m*p))
  int reach_factor = 0;         // ceil(k/s) in the product regime, else ceil((k-1)/s)
  long long lower_max = 0;      // max(reach_factor, B)
  long long lower_product = 0;  // W * B
  bool lower_product_conjectural = true;
  long long upper = 0;          // min(k, W*ceil_log2(2s)) * ceil(ceil_log2(n)/(m*p))

  bool barrier_regime = false;  // H*m*p >= log2(n): one layer moves a pointer
  bool product_regime = false;  // 16*s^2 <= n and n >= 4k

  // Cache-size transition point s* = n*ceil_log2(k)/k, exact.
  Rational s_star;

  // Minimum cache for a depth-L run: max(k/L, k*ceil_log2(n)/(L*H*m*p)),
  // constants omitted. Stored as the two L=1 coefficients; the second term
  // inherits the conjectural flag.
  Rational min_cache_reach_coeff;      // k
  Rational min_cache_bandwidth_coeff;  // k*ceil_log2(n)/(H*m*p)
  Rational min_cache_for_depth(int L) const;

  nlohmann::json to_json() const;
  std::string to_text() const;  // aligned table, includes the regime rows
};

BoundsReport bounds_report(int n, int k, int s, int H, int m, int p);

// Joint-success ceiling for oblivious (permutation-independent) cache
// choices over T consecutive stages: main term (s/(n-T))^T covers
// non-degenerate chains, 2T^3/n covers the rest. Requires n >= T+1.
struct ObliviousBound {
  Rational main;
  Rational error;
  Rational total;
  bool vacuous = false;         // total >= 1
  bool main_term_dominates = false;  // s^T >= 2*T^3*n^(T-1)

  nlohmann::json to_json() const;
};

ObliviousBound oblivious_prob_bound(int n, int s, int T);

// Exact joint-success law for the chain-tracking policy: s/n, independent of
// the stage count.
Rational adaptive_prob(int n, int s);

// Guaranteed adaptive/oblivious success ratio floor. In the main-term regime
// (s^T >= 2*T^3*n^(T-1) and 4*T^2 <= n) the floor is (n/s)^(T-1)/4;
// otherwise it is s/(4*T^3).
struct SeparationRatio {
  Rational ratio;
  bool main_term_regime = false;

  nlohmann::json to_json() const;
};

SeparationRatio separation_ratio(int n, int s, int T);

}  // namespace kvchase
