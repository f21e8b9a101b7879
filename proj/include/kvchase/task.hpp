#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kvchase/json_fwd.hpp"

namespace kvchase {

// Permutation of {1..n}. Storage is a 0-based vector of 1-based values:
// map()[i-1] == pi(i). Position 0 (the query slot) is outside the domain.
class Permutation {
 public:
  explicit Permutation(std::vector<int> one_based_map);
  static Permutation identity(int n);

  int n() const { return static_cast<int>(map_.size()); }
  int apply(int x) const;    // pi(x), x in 1..n
  int inverse(int y) const;  // pi^{-1}(y), y in 1..n
  const std::vector<int>& map() const { return map_; }

  bool operator==(const Permutation& o) const { return map_ == o.map_; }
  bool operator!=(const Permutation& o) const { return map_ != o.map_; }

  nlohmann::json to_json() const;
  static Permutation from_json(const nlohmann::json& j);

 private:
  std::vector<int> map_;
  std::vector<int> inv_;
};

// Seeded Fisher-Yates over [1..n]. Same (n, seed) gives the same permutation
// on every platform. n >= 1.
Permutation random_permutation(int n, std::uint64_t seed);

// Hop sequence z_0 = 1, z_{t+1} = pi(z_t). values has k+1 entries; the task
// answer is the final one.
struct Chain {
  std::vector<int> values;
  int hops() const { return static_cast<int>(values.size()) - 1; }
  int answer() const { return values.back(); }
};

Chain chain(const Permutation& pi, int k);  // k >= 0

// Partition of k hops into windows of at most s, with cumulative boundaries
// tau_j = min(j*s, k). count == ceil(k/s), boundaries.back() == k.
struct WindowPlan {
  int k = 0;
  int s = 0;
  std::vector<int> boundaries;
  int count() const { return static_cast<int>(boundaries.size()); }
};

WindowPlan windows(int k, int s);  // k >= 1, s >= 1

// Length of the cycle of pi containing 1.
int cycle_of_one(const Permutation& pi);

// True iff some cycle NOT containing 1 has length <= s.
bool has_short_nonprincipal_cycle(const Permutation& pi, int s);

// True iff z_1..z_T are pairwise distinct and none equals 1.
bool good_chain(const Permutation& pi, int T);

// Exhaustive iteration over S_n in lexicographic order (n <= ~8 intended).
void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn);

}  // namespace kvchase
