#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kvchase/engine.hpp"
#include "kvchase/task.hpp"

namespace kvchase {

// Read-gated view of the engine state a controller may consult when picking
// the next cached set: positions currently in the support, and their
// representations. Reading anything else throws.
class EngineView {
 public:
  EngineView(const std::vector<int>& support, const LayerState& state,
             const ModelConfig& cfg)
      : support_(support), state_(state), cfg_(cfg) {}

  const std::vector<int>& support() const { return support_; }
  bool readable(int pos) const;
  const QVec& rep(int pos) const;  // throws LocalityViolationError outside support
  const ModelConfig& config() const { return cfg_; }

 private:
  const std::vector<int>& support_;
  const LayerState& state_;
  const ModelConfig& cfg_;
};

// Read-gated view for the stage game: the pointer map restricted to
// positions cached at earlier stages.
class StageView {
 public:
  StageView(const Permutation& pi, const std::vector<int>& readable)
      : pi_(pi), readable_(readable) {}

  const std::vector<int>& readable() const { return readable_; }
  bool can_read(int pos) const;
  int pointer_at(int pos) const;  // throws LocalityViolationError if not cached before

 private:
  const Permutation& pi_;
  const std::vector<int>& readable_;
};

// Cache-eviction policy. One instance per trial; instances may keep state
// across layers/stages of their own run but are never shared. The same
// object serves both runtimes: layer-level runs call select_cache, the
// stage game calls select_stage_cache.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string name() const = 0;

  // False only for controllers that consult the permutation directly instead
  // of going through the views (kept out of lower-bound and locality suites).
  virtual bool locality_respecting() const { return true; }

  // Cached positions for engine layer `layer` (1-based), subset of [0..n],
  // size <= s.
  virtual std::vector<int> select_cache(int layer, const EngineView& view) = 0;

  // Cached positions for game stage `stage` (1-based), subset of [1..n],
  // size <= s.
  virtual std::vector<int> select_stage_cache(int stage, const StageView& view) = 0;
};

using ControllerFactory = std::function<std::unique_ptr<Controller>(std::uint64_t seed)>;

enum class ControllerKind {
  oblivious_fixed,
  oblivious_random,
  adaptive_chain_tracking,
  oracle,
};

const char* controller_kind_name(ControllerKind kind);

// Fixed cached sets, one per layer/stage, cycled when the run is longer than
// the list. Ignores every observation.
std::unique_ptr<Controller> oblivious_fixed_controller(std::vector<std::vector<int>> sets);

// Uniformly random s-subsets of [1..n] drawn from the seed, independent of
// the permutation. shared=true draws once and reuses the same set at every
// layer/stage (the default used by the randomized-cache experiment);
// shared=false draws fresh at each step.
std::unique_ptr<Controller> oblivious_random_controller(int n, int s, std::uint64_t seed,
                                                        bool shared = true);

// Layer-level behavior: caches the position the query currently points to
// (read from the query's own representation) plus lowest-index fillers.
// Stage-game behavior: stage 1 caches {1} plus the s-1 lowest fillers, then
// keeps placing the next chain value while its predecessor was cached; after
// the chain is lost it falls back to the fixed lowest-index set.
std::unique_ptr<Controller> adaptive_chain_tracking_controller(int n, int s);

// Holds the permutation itself and caches exactly what the next lookup
// needs (plus fillers). Not locality-respecting; excluded from lower-bound
// and locality test suites.
std::unique_ptr<Controller> oracle_controller(const Permutation& pi, int s);

// T stages against destinations d_t = z_{destination_hops[t-1]}. The default
// game is the consecutive one (hops 1..T). The pointer-doubling variant has
// hops min(2^t, k), which is what the randomized-cache experiment plays.
struct StageGame {
  int n = 1;
  int s = 1;
  std::vector<int> destination_hops;

  int stages() const { return static_cast<int>(destination_hops.size()); }

  static StageGame consecutive(int n, int s, int T);
  static StageGame doubling(int n, int s, int k);
};

// Runs the game: at stage t the controller proposes C_t (it may read the
// pointer map only at positions cached in stages < t; requests outside that
// set throw), and the stage is a hit iff d_t lands in C_t.
std::vector<bool> run_stage_game(const Permutation& pi, Controller& controller,
                                 const StageGame& game);

}  // namespace kvchase
