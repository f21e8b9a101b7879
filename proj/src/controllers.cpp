#include "kvchase/controllers.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "kvchase/bounds.hpp"
#include "kvchase/errors.hpp"
#include "kvchase/rng.hpp"

namespace kvchase {

bool EngineView::readable(int pos) const {
  return std::binary_search(support_.begin(), support_.end(), pos);
}

const QVec& EngineView::rep(int pos) const {
  if (!readable(pos))
    throw LocalityViolationError("controller read position " + std::to_string(pos) +
                                 " outside the cached support");
  return state_.reps[static_cast<std::size_t>(pos)];
}

bool StageView::can_read(int pos) const {
  return std::binary_search(readable_.begin(), readable_.end(), pos);
}

int StageView::pointer_at(int pos) const {
  if (!can_read(pos))
    throw LocalityViolationError("controller read pointer at position " +
                                 std::to_string(pos) + " never cached before");
  return pi_.apply(pos);
}

const char* controller_kind_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::oblivious_fixed: return "oblivious-fixed";
    case ControllerKind::oblivious_random: return "oblivious-random";
    case ControllerKind::adaptive_chain_tracking: return "adaptive-chain-tracking";
    case ControllerKind::oracle: return "oracle";
  }
  return "unknown";
}

namespace {

// Lowest-index positions from [1..n] not already taken, until size hits s.
void fill_to_size(std::vector<int>& cache, int n, int s) {
  for (int pos = 1; pos <= n && static_cast<int>(cache.size()) < s; ++pos)
    if (std::find(cache.begin(), cache.end(), pos) == cache.end()) cache.push_back(pos);
}

class ObliviousFixedController final : public Controller {
 public:
  explicit ObliviousFixedController(std::vector<std::vector<int>> sets)
      : sets_(std::move(sets)) {
    if (sets_.empty()) throw std::invalid_argument("oblivious_fixed: no sets given");
  }

  std::string name() const override { return "oblivious-fixed"; }

  std::vector<int> select_cache(int layer, const EngineView&) override {
    return sets_[static_cast<std::size_t>((layer - 1) % static_cast<int>(sets_.size()))];
  }

  std::vector<int> select_stage_cache(int stage, const StageView&) override {
    return sets_[static_cast<std::size_t>((stage - 1) % static_cast<int>(sets_.size()))];
  }

 private:
  std::vector<std::vector<int>> sets_;
};

class ObliviousRandomController final : public Controller {
 public:
  ObliviousRandomController(int n, int s, std::uint64_t seed, bool shared)
      : n_(n), s_(std::min(s, n)), rng_(seed), shared_(shared) {
    if (n < 1) throw std::invalid_argument("oblivious_random: n must be >= 1");
    if (s < 1) throw std::invalid_argument("oblivious_random: s must be >= 1");
    if (shared_) shared_set_ = draw();
  }

  std::string name() const override {
    return shared_ ? "oblivious-random-shared" : "oblivious-random-fresh";
  }

  std::vector<int> select_cache(int, const EngineView&) override { return pick(); }
  std::vector<int> select_stage_cache(int, const StageView&) override { return pick(); }

 private:
  std::vector<int> pick() { return shared_ ? shared_set_ : draw(); }

  // Uniform s-subset of [1..n]: first s cells of a partial Fisher-Yates pass.
  std::vector<int> draw() {
    std::vector<int> pool(static_cast<std::size_t>(n_));
    std::iota(pool.begin(), pool.end(), 1);
    for (int i = 0; i < s_; ++i) {
      const int j = i + static_cast<int>(rng_.below(static_cast<std::uint64_t>(n_ - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(s_));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  int n_;
  int s_;
  SplitMix64 rng_;
  bool shared_;
  std::vector<int> shared_set_;
};

class ChainTrackingController final : public Controller {
 public:
  ChainTrackingController(int n, int s) : n_(n), s_(std::min(s, n)) {
    if (n < 1) throw std::invalid_argument("chain_tracking: n must be >= 1");
    if (s < 1) throw std::invalid_argument("chain_tracking: s must be >= 1");
  }

  std::string name() const override { return "adaptive-chain-tracking"; }

  // Layer runtime: the query's own representation (always readable) names the
  // position its next lookup needs; cache that plus fillers.
  std::vector<int> select_cache(int, const EngineView& view) override {
    const int target = decode_pointer(view.rep(0), PointerField::payload, view.config());
    std::vector<int> cache;
    if (target >= 1) cache.push_back(target);
    fill_to_size(cache, n_, s_);
    std::sort(cache.begin(), cache.end());
    return cache;
  }

  // Stage runtime: gamble on {1, fillers}, then follow the chain while every
  // predecessor stayed cached; once the chain is lost, fall back to the fixed
  // lowest-index set.
  std::vector<int> select_stage_cache(int stage, const StageView& view) override {
    std::vector<int> cache;
    if (stage == 1) {
      cache.push_back(1);
    } else if (!lost_) {
      // walk as far as the readable pointer map reaches from 1
      int z = 1;
      int hops = 0;
      while (view.can_read(z) && hops < stage) {
        z = view.pointer_at(z);
        ++hops;
      }
      if (hops == stage)
        cache.push_back(z);  // z == z_stage, guaranteed hit
      else
        lost_ = true;
    }
    fill_to_size(cache, n_, s_);
    std::sort(cache.begin(), cache.end());
    return cache;
  }

 private:
  int n_;
  int s_;
  bool lost_ = false;
};

class OracleController final : public Controller {
 public:
  OracleController(const Permutation& pi, int s)
      : n_(pi.n()), s_(std::min(s, pi.n())), chain_(chain(pi, pi.n())) {}

  std::string name() const override { return "oracle"; }
  bool locality_respecting() const override { return false; }

  // The i-th lookup of a run needs position z_{i-1} cached. Lookups are
  // counted here rather than read off the layer number, so interleaved carry
  // layers cannot desynchronize the oracle from the query's progress.
  std::vector<int> select_cache(int, const EngineView&) override {
    const std::size_t idx = lookups_ % chain_.values.size();
    ++lookups_;
    return around(chain_.values[idx]);
  }

  std::vector<int> select_stage_cache(int stage, const StageView&) override {
    return around(chain_.values[static_cast<std::size_t>(stage %
                                                         static_cast<int>(chain_.values.size()))]);
  }

 private:
  std::vector<int> around(int must_have) {
    std::vector<int> cache = {must_have};
    fill_to_size(cache, n_, s_);
    std::sort(cache.begin(), cache.end());
    return cache;
  }

  int n_;
  int s_;
  Chain chain_;
  std::size_t lookups_ = 0;
};

}  // namespace

std::unique_ptr<Controller> oblivious_fixed_controller(std::vector<std::vector<int>> sets) {
  return std::make_unique<ObliviousFixedController>(std::move(sets));
}

std::unique_ptr<Controller> oblivious_random_controller(int n, int s, std::uint64_t seed,
                                                        bool shared) {
  return std::make_unique<ObliviousRandomController>(n, s, seed, shared);
}

std::unique_ptr<Controller> adaptive_chain_tracking_controller(int n, int s) {
  return std::make_unique<ChainTrackingController>(n, s);
}

std::unique_ptr<Controller> oracle_controller(const Permutation& pi, int s) {
  return std::make_unique<OracleController>(pi, s);
}

StageGame StageGame::consecutive(int n, int s, int T) {
  if (T < 1) throw std::invalid_argument("StageGame: T must be >= 1");
  StageGame g;
  g.n = n;
  g.s = s;
  g.destination_hops.resize(static_cast<std::size_t>(T));
  std::iota(g.destination_hops.begin(), g.destination_hops.end(), 1);
  return g;
}

StageGame StageGame::doubling(int n, int s, int k) {
  if (k < 1) throw std::invalid_argument("StageGame: k must be >= 1");
  StageGame g;
  g.n = n;
  g.s = s;
  const int T = std::max(1, ceil_log2(k));
  for (int t = 1; t <= T; ++t)
    g.destination_hops.push_back(std::min(1 << t, k));
  return g;
}

std::vector<bool> run_stage_game(const Permutation& pi, Controller& controller,
                                 const StageGame& game) {
  if (pi.n() != game.n) throw std::invalid_argument("run_stage_game: size mismatch");
  const int max_hop =
      *std::max_element(game.destination_hops.begin(), game.destination_hops.end());
  const Chain zs = chain(pi, max_hop);

  std::vector<int> readable;  // union of caches from earlier stages, sorted
  std::vector<bool> hits;
  hits.reserve(game.destination_hops.size());

  for (int t = 1; t <= game.stages(); ++t) {
    StageView view(pi, readable);
    std::vector<int> cache = controller.select_stage_cache(t, view);
    std::sort(cache.begin(), cache.end());
    cache.erase(std::unique(cache.begin(), cache.end()), cache.end());
    if (static_cast<int>(cache.size()) > game.s)
      throw CacheOverflowError("run_stage_game: cache larger than s");
    for (const int pos : cache)
      if (pos < 1 || pos > game.n)
        throw std::invalid_argument("run_stage_game: cached position out of range");

    const int dest = zs.values[static_cast<std::size_t>(game.destination_hops[t - 1])];
    hits.push_back(std::binary_search(cache.begin(), cache.end(), dest));

    std::vector<int> merged;
    std::set_union(readable.begin(), readable.end(), cache.begin(), cache.end(),
                   std::back_inserter(merged));
    readable = std::move(merged);
  }
  return hits;
}

}  // namespace kvchase
