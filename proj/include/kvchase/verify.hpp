#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "kvchase/controllers.hpp"
#include "kvchase/engine.hpp"
#include "kvchase/json_fwd.hpp"
#include "kvchase/rational.hpp"
#include "kvchase/task.hpp"

namespace kvchase {

// Outcome of one exhaustive check: how many instances were enumerated, how
// many violated the property, and a printable witness for the first failure.
struct VerificationReport {
  std::string check;
  std::string space;
  long long instances = 0;
  long long violations = 0;
  std::string witness;

  bool passed() const { return violations == 0; }
  nlohmann::json to_json() const;
  std::string to_line() const;
};

struct ZooEntry {
  std::string name;
  ControllerFactory make;
};

// Locality-respecting controllers used by the exhaustive suites: rotating
// fixed sets, seeded random sets (shared and fresh), and chain tracking.
std::vector<ZooEntry> engine_controller_zoo(int n, int s);

// Support growth: over all pi in S_n and every zoo controller, the trace
// support of an L-layer run has at most 1 + L*s positions. Also records the
// maximum support actually observed (tightness is asserted by tests).
struct ReachabilityReport {
  VerificationReport report;
  int max_support = 0;
};
ReachabilityReport verify_reachability(int n, int L, int s);

// Controller builder for exhaustive sweeps. Honest controllers ignore the
// permutation argument; the deliberately cheating test double peeks at it.
using RunControllerFactory =
    std::function<std::unique_ptr<Controller>(const Permutation& pi)>;

// Trace determinism: for every reference pi1 and every pi2 agreeing with pi1
// on the support of pi1's run, the controller must produce the identical
// trace, identical final query state, and identical final states on the
// support. Run with a locality-respecting controller this must never fail;
// verify_trace_equivalence_negative runs a controller that keys its caches
// off uncached pointer values and must be caught, proving the check has
// teeth.
VerificationReport verify_trace_equivalence(int n, int L, int s,
                                            const RunControllerFactory& make);
VerificationReport verify_trace_equivalence_negative(int n, int L, int s);

// State census: distinct query representations reachable after B layers from
// the fixed start state, over all pi in S_n and the oblivious zoo. Uses the
// lookup engine when the width permits pointer encoding, otherwise a
// documented in-model toy update (state + pointer-at-lowest-cached, mod 2^p).
// The count can never exceed 2^(B*H*m*p), nor 2^(m*p).
long long count_reachable_states(const QVec& x0, int B, const ModelConfig& cfg);
VerificationReport verify_state_census(const ModelConfig& cfg, int B);

// Pointer rewiring that no trace can distinguish: sends u to d and patches
// the one preimage that collides, leaving the map untouched on T1. Requires
// u outside T1 and d outside T1, the k-hop chain, and pi1(T1).
Permutation build_adversarial_swap(const Permutation& pi1, const std::set<int>& T1,
                                   int u, int d, int k);

// Exhaustive S_n sweep: every valid (pi1, d) pair must give an identical
// trace and final query state, while the rewired chain actually passes
// through d at the swap step.
VerificationReport verify_adversarial_swap(int n, int k, int L, int s);

// Stage-game policies with exact joint-success evaluation. Random draws are
// integrated analytically: a shared uniform s-subset weights each permutation
// by the hypergeometric mass of covering its destination set, and fresh
// per-stage draws contribute (s/n)^T.
struct StagePolicy {
  enum class Kind { fixed, shared_uniform, iid_uniform, chain_tracking, follower };
  Kind kind = Kind::fixed;
  std::string name;
  bool oblivious = true;
  std::vector<std::vector<int>> fixed_sets;  // Kind::fixed, cycled over stages

  std::unique_ptr<Controller> instantiate(int n, int s, std::uint64_t seed = 0) const;
};

std::vector<StagePolicy> stage_policy_zoo(int n, int s);

// Pr[every stage of the consecutive game hits], exact over S_n.
Rational exact_joint_success(const StagePolicy& policy, int n, int s, int T);
// Pr[every stage hits AND z_1..z_T are distinct and nonprincipal].
Rational exact_joint_success_good(const StagePolicy& policy, int n, int s, int T);

// Law suites over exhaustive stage games, n in ns, 1 <= s <= n, 1 <= T <=
// T_max (skipping tuples with n < T+1):
//   adaptive exactness  -- chain tracking succeeds with probability exactly s/n;
//   oblivious soundness -- every oblivious policy obeys the two-term ceiling,
//                          and its non-degenerate-chain part obeys the main term;
//   adaptive ceiling    -- no locality-respecting policy in the zoo beats s/n.
VerificationReport verify_adaptive_exactness(const std::vector<int>& ns, int T_max);
VerificationReport verify_oblivious_soundness(const std::vector<int>& ns, int T_max);
VerificationReport verify_adaptive_ceiling(const std::vector<int>& ns, int T_max);

// Monte Carlo estimate of the chain-exit mass: probability that the chain
// value at the last hop before a window boundary lands inside the trace
// support, conditioned on the first k hops being distinct. Evidence only;
// never a pass/fail criterion.
struct StarEstimate {
  long long trials = 0;
  long long conditioned = 0;
  long long hits = 0;
  double estimate = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  double mean_support_fraction = 0.0;  // E[|T|] / (n-1), same samples
  double threshold = 1.0 / 3.0;

  nlohmann::json to_json() const;
};

StarEstimate estimate_star(const ControllerFactory& make, const ModelConfig& cfg,
                           int window_index, long long trials, std::uint64_t seed);

}  // namespace kvchase
