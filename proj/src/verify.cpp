#include "kvchase/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kvchase/bounds.hpp"
#include "kvchase/constructions.hpp"
#include "kvchase/errors.hpp"
#include "kvchase/rng.hpp"

namespace kvchase {

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["space"] = space;
  j["instances"] = instances;
  j["violations"] = violations;
  j["passed"] = passed();
  if (!witness.empty()) j["witness"] = witness;
  return j;
}

std::string VerificationReport::to_line() const {
  std::ostringstream out;
  out << (passed() ? "ok  " : "FAIL") << "  " << check << "  [" << space << "]  "
      << instances << " instances, " << violations << " violations";
  if (!witness.empty()) out << "  witness: " << witness;
  return out.str();
}

namespace {

std::string perm_str(const Permutation& pi) {
  std::string s = "[";
  for (int i = 1; i <= pi.n(); ++i) {
    if (i > 1) s += ",";
    s += std::to_string(pi.apply(i));
  }
  return s + "]";
}

ModelConfig engine_config(int n, int L, int s) {
  ModelConfig cfg;
  cfg.n = n;
  cfg.k = std::max(1, L);  // every budgeted layer is a lookup layer
  cfg.L = L;
  cfg.H = 1;
  cfg.p = 4;
  cfg.m = 1 + 2 * static_cast<int>(ceil_div(ceil_log2(static_cast<long long>(n) + 1), 4));
  cfg.s = s;
  cfg.validate();
  return cfg;
}

LayerProgram lookup_program(int L) {
  LayerProgram program;
  program.layers.assign(static_cast<std::size_t>(L), LayerOp::lookup);
  return program;
}

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long long factorial(int n) {
  long long r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

std::vector<ZooEntry> engine_controller_zoo(int n, int s) {
  std::vector<ZooEntry> zoo;
  zoo.push_back({"adaptive-chain-tracking", [n, s](std::uint64_t) {
                   return adaptive_chain_tracking_controller(n, s);
                 }});
  zoo.push_back({"oblivious-fixed-rotating", [n, s](std::uint64_t) {
                   std::vector<std::vector<int>> sets;
                   for (int off = 0; off < n; ++off) {
                     std::vector<int> set;
                     for (int i = 0; i < std::min(s, n); ++i)
                       set.push_back((off + i) % n + 1);
                     std::sort(set.begin(), set.end());
                     sets.push_back(std::move(set));
                   }
                   return oblivious_fixed_controller(std::move(sets));
                 }});
  zoo.push_back({"oblivious-random-shared", [n, s](std::uint64_t seed) {
                   return oblivious_random_controller(n, s, seed_combine(seed, 101), true);
                 }});
  zoo.push_back({"oblivious-random-fresh", [n, s](std::uint64_t seed) {
                   return oblivious_random_controller(n, s, seed_combine(seed, 202), false);
                 }});
  return zoo;
}

ReachabilityReport verify_reachability(int n, int L, int s) {
  const ModelConfig cfg = engine_config(n, L, s);
  const LayerProgram program = lookup_program(L);
  const long long cap = 1 + static_cast<long long>(L) * s;

  ReachabilityReport out;
  out.report.check = "support-growth";
  out.report.space = "S_" + std::to_string(n) + " x zoo, L=" + std::to_string(L) +
                     " s=" + std::to_string(s);

  const auto zoo = engine_controller_zoo(n, s);
  for_each_permutation(n, [&](const Permutation& pi) {
    std::uint64_t which = 0;
    for (const auto& entry : zoo) {
      auto controller = entry.make(++which);
      const ForwardResult r = forward(program, pi, *controller, cfg);
      out.report.instances += 1;
      const int size = static_cast<int>(r.trace.support.size());
      out.max_support = std::max(out.max_support, size);
      const bool has_query = std::binary_search(r.trace.support.begin(),
                                                r.trace.support.end(), 0);
      if (size > cap || !has_query) {
        out.report.violations += 1;
        if (out.report.witness.empty())
          out.report.witness = entry.name + " pi=" + perm_str(pi) + " support=" +
                               std::to_string(size) + " cap=" + std::to_string(cap);
      }
    }
  });
  return out;
}

VerificationReport verify_trace_equivalence(int n, int L, int s,
                                            const RunControllerFactory& make) {
  const ModelConfig cfg = engine_config(n, L, s);
  const LayerProgram program = lookup_program(L);

  VerificationReport report;
  report.check = "trace-agreement";
  report.space = "S_" + std::to_string(n) + " x agreeing pairs, L=" +
                 std::to_string(L) + " s=" + std::to_string(s);

  for_each_permutation(n, [&](const Permutation& pi1) {
    auto c1 = make(pi1);
    const ForwardResult r1 = forward(program, pi1, *c1, cfg);

    // free = positions outside the support; their images may be rewired to
    // any arrangement of the unused values
    std::vector<int> free_pos;
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    for (int pos = 1; pos <= n; ++pos)
      if (std::binary_search(r1.trace.support.begin(), r1.trace.support.end(), pos))
        used[static_cast<std::size_t>(pi1.apply(pos))] = 1;
      else
        free_pos.push_back(pos);
    std::vector<int> free_val;
    for (int v = 1; v <= n; ++v)
      if (!used[static_cast<std::size_t>(v)]) free_val.push_back(v);

    std::vector<int> arrangement = free_val;
    do {
      std::vector<int> map2 = pi1.map();
      for (std::size_t i = 0; i < free_pos.size(); ++i)
        map2[static_cast<std::size_t>(free_pos[i] - 1)] = arrangement[i];
      const Permutation pi2(std::move(map2));

      auto c2 = make(pi2);
      const ForwardResult r2 = forward(program, pi2, *c2, cfg);
      report.instances += 1;

      bool same = r2.trace.per_layer == r1.trace.per_layer &&
                  r2.trace.support == r1.trace.support &&
                  r2.final_state.reps[0] == r1.final_state.reps[0];
      if (same)
        for (const int pos : r1.trace.support)
          if (!(r2.final_state.reps[static_cast<std::size_t>(pos)] ==
                r1.final_state.reps[static_cast<std::size_t>(pos)])) {
            same = false;
            break;
          }
      if (!same) {
        report.violations += 1;
        if (report.witness.empty())
          report.witness = "pi1=" + perm_str(pi1) + " pi2=" + perm_str(pi2);
      }
    } while (std::next_permutation(arrangement.begin(), arrangement.end()));
  });
  return report;
}

namespace {

// Negative control: keys its cache choices off pointer values at positions
// it never cached. Trace agreement must flag it.
class PeekingController final : public Controller {
 public:
  PeekingController(const Permutation& pi, int s) : pi_(pi), s_(s) {}

  std::string name() const override { return "peeking-test-double"; }
  bool locality_respecting() const override { return false; }

  std::vector<int> select_cache(int layer, const EngineView&) override { return pick(layer); }

  std::vector<int> select_stage_cache(int stage, const StageView&) override {
    return pick(stage);
  }

 private:
  std::vector<int> pick(int layer) const {
    const int n = pi_.n();
    const int probe = n - (layer - 1) % n;  // n, n-1, ...
    std::vector<int> cache = {pi_.apply(probe)};
    for (int pos = 1; pos <= n && static_cast<int>(cache.size()) < std::min(s_, n); ++pos)
      if (std::find(cache.begin(), cache.end(), pos) == cache.end()) cache.push_back(pos);
    std::sort(cache.begin(), cache.end());
    return cache;
  }

  const Permutation& pi_;
  int s_;
};

}  // namespace

VerificationReport verify_trace_equivalence_negative(int n, int L, int s) {
  VerificationReport report = verify_trace_equivalence(
      n, L, s,
      [s](const Permutation& pi) -> std::unique_ptr<Controller> {
        return std::make_unique<PeekingController>(pi, s);
      });
  report.check = "trace-agreement-negative-control";
  // the control passes when the cheat IS detected
  if (report.violations == 0) {
    report.violations = 1;
    report.witness = "peeking controller went undetected";
  } else {
    report.violations = 0;
    report.witness.clear();
  }
  return report;
}

long long count_reachable_states(const QVec& x0, int B, const ModelConfig& cfg) {
  cfg.validate();
  if (B < 0) throw std::invalid_argument("count_reachable_states: B must be >= 0");
  if (static_cast<int>(x0.coords.size()) != cfg.m)
    throw std::invalid_argument("count_reachable_states: x0 width != m");

  std::set<QVec> seen;
  if (B == 0) {
    seen.insert(x0);
    return 1;
  }

  const bool encodable = cfg.m >= 1 + 2 * cfg.pointer_coords();
  const std::uint32_t mask = (1u << cfg.p) - 1u;

  // View-independent policies only: pointer-decoding controllers presuppose
  // the full token layout, which narrow widths cannot carry.
  std::vector<ControllerFactory> zoo;
  zoo.push_back([&cfg](std::uint64_t) {
    std::vector<std::vector<int>> sets;
    for (int off = 0; off < cfg.n; ++off) {
      std::vector<int> set;
      for (int i = 0; i < std::min(cfg.s, cfg.n); ++i) set.push_back((off + i) % cfg.n + 1);
      std::sort(set.begin(), set.end());
      sets.push_back(std::move(set));
    }
    return oblivious_fixed_controller(std::move(sets));
  });
  for (const std::uint64_t seed : {11ULL, 12ULL, 13ULL})
    zoo.push_back([&cfg, seed](std::uint64_t) {
      return oblivious_random_controller(cfg.n, cfg.s, seed, false);
    });
  for (const std::uint64_t seed : {21ULL, 22ULL})
    zoo.push_back([&cfg, seed](std::uint64_t) {
      return oblivious_random_controller(cfg.n, cfg.s, seed, true);
    });

  for_each_permutation(cfg.n, [&](const Permutation& pi) {
    for (const auto& make : zoo) {
      auto controller = make(0);
      if (encodable) {
        // real lookup dynamics, started from x0
        LayerState state;
        state.reps.push_back(x0);
        for (int i = 1; i <= cfg.n; ++i) state.reps.push_back(encode_token(i, pi.apply(i), cfg));
        std::vector<int> support = {0};
        const int c = cfg.pointer_coords();
        for (int layer = 1; layer <= B; ++layer) {
          EngineView view(support, state, cfg);
          std::vector<int> cached = controller->select_cache(layer, view);
          std::sort(cached.begin(), cached.end());
          const QVec out = hard_match_attend(state.reps[0], cached, state, cfg);
          if (!out.is_zero())
            for (int i = 0; i < c; ++i)
              state.reps[0].coords[static_cast<std::size_t>(1 + c + i)] =
                  out.coords[static_cast<std::size_t>(1 + c + i)];
          std::vector<int> merged;
          std::set_union(support.begin(), support.end(), cached.begin(), cached.end(),
                         std::back_inserter(merged));
          support = std::move(merged);
        }
        seen.insert(state.reps[0]);
      } else {
        // toy in-model update: one attention read of the lowest cached
        // pointer, added coordinatewise mod 2^p
        QVec x = x0;
        LayerState dummy;
        dummy.reps.assign(1, x0);
        std::vector<int> support = {0};
        for (int layer = 1; layer <= B; ++layer) {
          EngineView view(support, dummy, cfg);
          std::vector<int> cached = controller->select_cache(layer, view);
          if (cached.empty()) continue;
          const int lowest = *std::min_element(cached.begin(), cached.end());
          const std::uint32_t a = static_cast<std::uint32_t>(pi.apply(lowest)) & mask;
          for (auto& coord : x.coords) coord = (coord + a) & mask;
        }
        seen.insert(x);
      }
    }
  });
  return static_cast<long long>(seen.size());
}

VerificationReport verify_state_census(const ModelConfig& cfg, int B) {
  VerificationReport report;
  report.check = "state-census";
  report.space = "S_" + std::to_string(cfg.n) + " x oblivious zoo, B=" +
                 std::to_string(B) + " m=" + std::to_string(cfg.m) + " p=" +
                 std::to_string(cfg.p);

  QVec x0;
  if (cfg.m >= 1 + 2 * cfg.pointer_coords())
    x0 = encode_token(0, 1, cfg);
  else
    x0.coords.assign(static_cast<std::size_t>(cfg.m), 0);
  const long long count = count_reachable_states(x0, B, cfg);

  const long long bits = static_cast<long long>(cfg.H) * cfg.m * cfg.p;
  const long long span_cap =
      B * bits >= 62 ? INT64_MAX : (1LL << (B * bits));
  const long long width_cap =
      static_cast<long long>(cfg.m) * cfg.p >= 62
          ? INT64_MAX
          : (1LL << (static_cast<long long>(cfg.m) * cfg.p));

  report.instances = count;
  if (count > span_cap || count > width_cap) {
    report.violations = 1;
    report.witness = "count=" + std::to_string(count) + " caps=(" +
                     std::to_string(span_cap) + "," + std::to_string(width_cap) + ")";
  }
  return report;
}

Permutation build_adversarial_swap(const Permutation& pi1, const std::set<int>& T1,
                                   int u, int d, int k) {
  const int n = pi1.n();
  if (u < 1 || u > n || d < 1 || d > n)
    throw InvalidTargetError("build_adversarial_swap: u, d must be in 1..n");
  if (T1.count(u)) throw InvalidTargetError("build_adversarial_swap: u lies in T1");
  if (T1.count(d)) throw InvalidTargetError("build_adversarial_swap: d lies in T1");
  const Chain zs = chain(pi1, k);
  if (std::find(zs.values.begin(), zs.values.end(), d) != zs.values.end())
    throw InvalidTargetError("build_adversarial_swap: d lies on the chain");
  for (const int pos : T1)
    if (pos >= 1 && pos <= n && pi1.apply(pos) == d)
      throw InvalidTargetError("build_adversarial_swap: d lies in pi1(T1)");

  if (pi1.apply(u) == d) return pi1;  // the rewiring is already in place

  std::vector<int> map = pi1.map();
  const int displaced = pi1.apply(u);
  const int collide = pi1.inverse(d);
  map[static_cast<std::size_t>(u - 1)] = d;
  map[static_cast<std::size_t>(collide - 1)] = displaced;
  Permutation out(std::move(map));  // constructor re-checks bijectivity
  for (const int pos : T1)
    if (pos >= 1 && pos <= n && out.apply(pos) != pi1.apply(pos))
      throw CorruptStateError("build_adversarial_swap: construction touched T1");
  return out;
}

VerificationReport verify_adversarial_swap(int n, int k, int L, int s) {
  const ModelConfig cfg = engine_config(n, L, s);
  const LayerProgram program = lookup_program(L);

  VerificationReport report;
  report.check = "swap-indistinguishability";
  report.space = "S_" + std::to_string(n) + " x valid targets, k=" + std::to_string(k) +
                 " L=" + std::to_string(L) + " s=" + std::to_string(s);

  for_each_permutation(n, [&](const Permutation& pi1) {
    auto c1 = adaptive_chain_tracking_controller(n, s);
    const ForwardResult r1 = forward(program, pi1, *c1, cfg);
    const std::set<int> T1(r1.trace.support.begin(), r1.trace.support.end());
    const Chain zs = chain(pi1, k);

    int swap_step = 0;  // first hop whose source fell outside the support
    for (int t = 1; t <= k; ++t)
      if (!T1.count(zs.values[static_cast<std::size_t>(t - 1)])) {
        swap_step = t;
        break;
      }
    if (swap_step == 0) return;
    const int u = zs.values[static_cast<std::size_t>(swap_step - 1)];

    std::set<int> excluded(T1.begin(), T1.end());
    excluded.insert(zs.values.begin(), zs.values.end());
    for (const int pos : T1)
      if (pos >= 1 && pos <= n) excluded.insert(pi1.apply(pos));

    for (int d = 1; d <= n; ++d) {
      if (excluded.count(d)) continue;
      report.instances += 1;
      const Permutation pid = build_adversarial_swap(pi1, T1, u, d, k);

      auto c2 = adaptive_chain_tracking_controller(n, s);
      const ForwardResult r2 = forward(program, pid, *c2, cfg);

      const bool same_view = r2.trace.per_layer == r1.trace.per_layer &&
                             r2.trace.support == r1.trace.support &&
                             r2.final_state.reps[0] == r1.final_state.reps[0];
      const bool lands_on_d =
          chain(pid, swap_step).values[static_cast<std::size_t>(swap_step)] == d;
      if (!same_view || !lands_on_d) {
        report.violations += 1;
        if (report.witness.empty())
          report.witness = "pi1=" + perm_str(pi1) + " d=" + std::to_string(d) +
                           (same_view ? " (chain missed d)" : " (trace split)");
      }
    }
  });
  return report;
}

namespace {

// Locality-respecting adaptive policy that chases images of whatever it has
// already read; deliberately does not start at 1.
class FollowerController final : public Controller {
 public:
  FollowerController(int n, int s) : n_(n), s_(std::min(s, n)) {}

  std::string name() const override { return "follower"; }

  std::vector<int> select_cache(int, const EngineView&) override {
    std::vector<int> cache;
    for (int pos = n_; pos >= 1 && static_cast<int>(cache.size()) < s_; --pos)
      cache.push_back(pos);
    std::sort(cache.begin(), cache.end());
    return cache;
  }

  std::vector<int> select_stage_cache(int stage, const StageView& view) override {
    std::vector<int> cache;
    if (stage == 1) {
      for (int pos = n_; pos >= 1 && static_cast<int>(cache.size()) < s_; --pos)
        cache.push_back(pos);
    } else {
      for (const int pos : view.readable()) {
        if (static_cast<int>(cache.size()) >= s_) break;
        const int image = view.pointer_at(pos);
        if (std::find(cache.begin(), cache.end(), image) == cache.end())
          cache.push_back(image);
      }
      for (int pos = 1; pos <= n_ && static_cast<int>(cache.size()) < s_; ++pos)
        if (std::find(cache.begin(), cache.end(), pos) == cache.end()) cache.push_back(pos);
    }
    std::sort(cache.begin(), cache.end());
    return cache;
  }

 private:
  int n_;
  int s_;
};

}  // namespace

std::unique_ptr<Controller> StagePolicy::instantiate(int n, int s, std::uint64_t seed) const {
  switch (kind) {
    case Kind::fixed:
      return oblivious_fixed_controller(fixed_sets);
    case Kind::shared_uniform:
      return oblivious_random_controller(n, s, seed, true);
    case Kind::iid_uniform:
      return oblivious_random_controller(n, s, seed, false);
    case Kind::chain_tracking:
      return adaptive_chain_tracking_controller(n, s);
    case Kind::follower:
      return std::make_unique<FollowerController>(n, s);
  }
  throw std::logic_error("StagePolicy: unknown kind");
}

std::vector<StagePolicy> stage_policy_zoo(int n, int s) {
  const int size = std::min(s, n);
  std::vector<StagePolicy> zoo;

  StagePolicy low;
  low.kind = StagePolicy::Kind::fixed;
  low.name = "fixed-low";
  low.oblivious = true;
  std::vector<int> lowset;
  for (int i = 1; i <= size; ++i) lowset.push_back(i);
  low.fixed_sets = {lowset};
  zoo.push_back(low);

  StagePolicy rot;
  rot.kind = StagePolicy::Kind::fixed;
  rot.name = "fixed-rotating";
  rot.oblivious = true;
  for (int off = 0; off < n; ++off) {
    std::vector<int> set;
    for (int i = 0; i < size; ++i) set.push_back((off + i) % n + 1);
    std::sort(set.begin(), set.end());
    rot.fixed_sets.push_back(std::move(set));
  }
  zoo.push_back(rot);

  StagePolicy shared;
  shared.kind = StagePolicy::Kind::shared_uniform;
  shared.name = "uniform-shared";
  shared.oblivious = true;
  zoo.push_back(shared);

  StagePolicy fresh;
  fresh.kind = StagePolicy::Kind::iid_uniform;
  fresh.name = "uniform-fresh";
  fresh.oblivious = true;
  zoo.push_back(fresh);

  StagePolicy tracker;
  tracker.kind = StagePolicy::Kind::chain_tracking;
  tracker.name = "chain-tracking";
  tracker.oblivious = false;
  zoo.push_back(tracker);

  StagePolicy follower;
  follower.kind = StagePolicy::Kind::follower;
  follower.name = "follower";
  follower.oblivious = false;
  zoo.push_back(follower);

  return zoo;
}

namespace {

Rational exact_joint(const StagePolicy& policy, int n, int s, int T, bool need_good) {
  if (n < 1 || s < 1 || s > n || T < 1)
    throw std::invalid_argument("exact_joint_success: need 1 <= s <= n, T >= 1");

  const long long total = factorial(n);
  const int size = std::min(s, n);
  Rational sum(0);

  for_each_permutation(n, [&](const Permutation& pi) {
    if (need_good && !good_chain(pi, T)) return;

    if (policy.kind == StagePolicy::Kind::shared_uniform) {
      // one uniform size-s subset reused at every stage: the success weight
      // is the hypergeometric mass of covering the destination set
      const Chain zs = chain(pi, T);
      std::set<int> dests(zs.values.begin() + 1, zs.values.end());
      const long long zcount = static_cast<long long>(dests.size());
      const Rational weight(binom(n - static_cast<int>(zcount), size - static_cast<int>(zcount)),
                            binom(n, size));
      sum = sum + weight * Rational(1, total);
    } else if (policy.kind == StagePolicy::Kind::iid_uniform) {
      sum = sum + Rational::pow(Rational(size, n), T) * Rational(1, total);
    } else {
      auto controller = policy.instantiate(n, s);
      const StageGame game = StageGame::consecutive(n, s, T);
      const std::vector<bool> hits = run_stage_game(pi, *controller, game);
      if (std::all_of(hits.begin(), hits.end(), [](bool h) { return h; }))
        sum = sum + Rational(1, total);
    }
  });
  return sum;
}

}  // namespace

Rational exact_joint_success(const StagePolicy& policy, int n, int s, int T) {
  return exact_joint(policy, n, s, T, false);
}

Rational exact_joint_success_good(const StagePolicy& policy, int n, int s, int T) {
  return exact_joint(policy, n, s, T, true);
}

VerificationReport verify_adaptive_exactness(const std::vector<int>& ns, int T_max) {
  VerificationReport report;
  report.check = "adaptive-exactness";
  report.space = "chain tracking, exhaustive stage games";
  StagePolicy tracker;
  tracker.kind = StagePolicy::Kind::chain_tracking;
  tracker.name = "chain-tracking";
  tracker.oblivious = false;

  for (const int n : ns)
    for (int s = 1; s <= n; ++s)
      for (int T = 1; T <= T_max; ++T) {
        if (n < T + 1) continue;
        report.instances += 1;
        const Rational got = exact_joint_success(tracker, n, s, T);
        if (got != Rational(s, n)) {
          report.violations += 1;
          if (report.witness.empty())
            report.witness = "n=" + std::to_string(n) + " s=" + std::to_string(s) +
                             " T=" + std::to_string(T) + " got " + got.str();
        }
      }
  return report;
}

VerificationReport verify_oblivious_soundness(const std::vector<int>& ns, int T_max) {
  VerificationReport report;
  report.check = "oblivious-ceiling";
  report.space = "oblivious zoo, exhaustive stage games";

  for (const int n : ns)
    for (int s = 1; s <= n; ++s)
      for (int T = 1; T <= T_max; ++T) {
        if (n < T + 1) continue;
        const ObliviousBound bound = oblivious_prob_bound(n, s, T);
        const Rational main_cap = bound.main;
        const Rational total_cap = bound.total;
        for (const StagePolicy& policy : stage_policy_zoo(n, s)) {
          if (!policy.oblivious) continue;
          report.instances += 1;
          const Rational joint = exact_joint_success(policy, n, s, T);
          const Rational joint_good = exact_joint_success_good(policy, n, s, T);
          if (joint_good > main_cap || joint > total_cap) {
            report.violations += 1;
            if (report.witness.empty())
              report.witness = policy.name + " n=" + std::to_string(n) + " s=" +
                               std::to_string(s) + " T=" + std::to_string(T) +
                               " joint=" + joint.str() + " good=" + joint_good.str();
          }
        }
      }
  return report;
}

VerificationReport verify_adaptive_ceiling(const std::vector<int>& ns, int T_max) {
  VerificationReport report;
  report.check = "adaptive-ceiling";
  report.space = "locality-respecting zoo, exhaustive stage games";

  for (const int n : ns)
    for (int s = 1; s <= n; ++s)
      for (int T = 1; T <= T_max; ++T) {
        if (n < T + 1) continue;
        for (const StagePolicy& policy : stage_policy_zoo(n, s)) {
          report.instances += 1;
          const Rational joint = exact_joint_success(policy, n, s, T);
          if (joint > Rational(s, n)) {
            report.violations += 1;
            if (report.witness.empty())
              report.witness = policy.name + " n=" + std::to_string(n) + " s=" +
                               std::to_string(s) + " T=" + std::to_string(T) +
                               " joint=" + joint.str();
          }
        }
      }
  return report;
}

StarEstimate estimate_star(const ControllerFactory& make, const ModelConfig& cfg,
                           int window_index, long long trials, std::uint64_t seed) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("estimate_star: trials must be >= 1");
  const WindowPlan plan = windows(cfg.k, cfg.s);
  if (window_index < 1 || window_index > plan.count())
    throw std::invalid_argument("estimate_star: window index out of range");
  const int sigma = plan.boundaries[static_cast<std::size_t>(window_index - 1)] - 1;

  const LayerProgram program = lookup_program(cfg.L);
  StarEstimate est;
  est.trials = trials;
  double support_sum = 0.0;

  for (long long i = 0; i < trials; ++i) {
    const std::uint64_t trial_seed = seed_combine(seed, static_cast<std::uint64_t>(i));
    const Permutation pi = random_permutation(cfg.n, trial_seed);
    if (cycle_of_one(pi) <= cfg.k) continue;  // first k hops must be distinct

    auto controller = make(seed_combine(trial_seed, 1));
    const ForwardResult r = forward(program, pi, *controller, cfg);
    est.conditioned += 1;
    support_sum += static_cast<double>(r.trace.support.size());

    const int z = chain(pi, sigma).answer();
    if (std::binary_search(r.trace.support.begin(), r.trace.support.end(), z))
      est.hits += 1;
  }

  if (est.conditioned == 0)
    throw InsufficientSamplesError("estimate_star: no trial met the chain condition");

  const double nn = static_cast<double>(est.conditioned);
  const double phat = static_cast<double>(est.hits) / nn;
  const double zc = 1.959963984540054;  // central 95%
  const double z2 = zc * zc;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      zc * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  est.estimate = phat;
  est.wilson_low = std::max(0.0, center - half);
  est.wilson_high = std::min(1.0, center + half);
  est.mean_support_fraction = support_sum / nn / static_cast<double>(cfg.n - 1);
  return est;
}

nlohmann::json StarEstimate::to_json() const {
  nlohmann::json j;
  j["trials"] = trials;
  j["conditioned"] = conditioned;
  j["hits"] = hits;
  j["estimate"] = estimate;
  j["wilson_low"] = wilson_low;
  j["wilson_high"] = wilson_high;
  j["mean_support_fraction"] = mean_support_fraction;
  j["threshold"] = threshold;
  return j;
}

}  // namespace kvchase
