#include "kvchase/task.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "kvchase/rng.hpp"

namespace kvchase {

Permutation::Permutation(std::vector<int> one_based_map) : map_(std::move(one_based_map)) {
  const int n = static_cast<int>(map_.size());
  if (n == 0) throw std::invalid_argument("Permutation: empty map");
  inv_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const int v = map_[i];
    if (v < 1 || v > n)
      throw std::invalid_argument("Permutation: value out of range at position " +
                                  std::to_string(i + 1));
    if (inv_[v - 1] != 0)
      throw std::invalid_argument("Permutation: duplicate value " + std::to_string(v));
    inv_[v - 1] = i + 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 1);
  return Permutation(std::move(m));
}

int Permutation::apply(int x) const {
  if (x < 1 || x > n()) throw std::out_of_range("Permutation::apply: " + std::to_string(x));
  return map_[x - 1];
}

int Permutation::inverse(int y) const {
  if (y < 1 || y > n()) throw std::out_of_range("Permutation::inverse: " + std::to_string(y));
  return inv_[y - 1];
}

nlohmann::json Permutation::to_json() const { return nlohmann::json(map_); }

Permutation Permutation::from_json(const nlohmann::json& j) {
  return Permutation(j.get<std::vector<int>>());
}

Permutation random_permutation(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_permutation: n must be >= 1");
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 1);
  SplitMix64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(m[i], m[j]);
  }
  return Permutation(std::move(m));
}

Chain chain(const Permutation& pi, int k) {
  if (k < 0) throw std::invalid_argument("chain: k must be >= 0");
  Chain c;
  c.values.reserve(static_cast<std::size_t>(k) + 1);
  int z = 1;
  c.values.push_back(z);
  for (int t = 0; t < k; ++t) {
    z = pi.apply(z);
    c.values.push_back(z);
  }
  return c;
}

WindowPlan windows(int k, int s) {
  if (k < 1) throw std::invalid_argument("windows: k must be >= 1");
  if (s < 1) throw std::invalid_argument("windows: s must be >= 1");
  WindowPlan plan;
  plan.k = k;
  plan.s = s;
  for (int j = 1; static_cast<long long>(j - 1) * s < k; ++j)
    plan.boundaries.push_back(std::min(j * s, k));
  return plan;
}

int cycle_of_one(const Permutation& pi) {
  int len = 1;
  for (int z = pi.apply(1); z != 1; z = pi.apply(z)) ++len;
  return len;
}

bool has_short_nonprincipal_cycle(const Permutation& pi, int s) {
  const int n = pi.n();
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  // mark the principal cycle
  for (int z = 1; !seen[z]; z = pi.apply(z)) seen[z] = 1;
  for (int start = 2; start <= n; ++start) {
    if (seen[start]) continue;
    int len = 0;
    for (int z = start; !seen[z]; z = pi.apply(z)) {
      seen[z] = 1;
      ++len;
    }
    if (len <= s) return true;
  }
  return false;
}

bool good_chain(const Permutation& pi, int T) {
  if (T < 0) throw std::invalid_argument("good_chain: T must be >= 0");
  // z_1..z_T distinct and different from 1 <=> 1's cycle is longer than T.
  return cycle_of_one(pi) > T;
}

void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn) {
  if (n < 1) throw std::invalid_argument("for_each_permutation: n must be >= 1");
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 1);
  do {
    fn(Permutation(m));
  } while (std::next_permutation(m.begin(), m.end()));
}

}  // namespace kvchase
