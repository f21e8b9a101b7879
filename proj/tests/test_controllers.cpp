#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kvchase/controllers.hpp"
#include "kvchase/engine.hpp"
#include "kvchase/errors.hpp"
#include "kvchase/task.hpp"

using namespace kvchase;

TEST_CASE("engine view gates reads to the support") {
  ModelConfig cfg;
  cfg.n = 4;
  cfg.k = 1;
  cfg.L = 1;
  cfg.m = 5;
  cfg.p = 3;
  cfg.s = 2;
  cfg.validate();
  const Permutation pi({2, 3, 4, 1});
  LayerState state;
  state.reps.push_back(encode_token(0, 1, cfg));
  for (int i = 1; i <= 4; ++i) state.reps.push_back(encode_token(i, pi.apply(i), cfg));

  const std::vector<int> support = {0, 2};
  EngineView view(support, state, cfg);
  CHECK(view.readable(0));
  CHECK(view.readable(2));
  CHECK(!view.readable(1));
  CHECK(view.rep(2) == state.reps[2]);
  CHECK_THROWS_AS(view.rep(1), LocalityViolationError);
  CHECK(view.support() == support);
}

TEST_CASE("stage view exposes the pointer map only where cached") {
  const Permutation pi({2, 3, 1});
  const std::vector<int> readable = {2};
  StageView view(pi, readable);
  CHECK(view.can_read(2));
  CHECK(!view.can_read(1));
  CHECK(view.pointer_at(2) == 3);
  CHECK_THROWS_AS(view.pointer_at(1), LocalityViolationError);
}

TEST_CASE("fixed controller cycles its sets") {
  auto c = oblivious_fixed_controller({{1, 2}, {3}});
  const Permutation pi({2, 3, 4, 1});
  StageView view(pi, {});
  CHECK(c->select_stage_cache(1, view) == std::vector<int>{1, 2});
  CHECK(c->select_stage_cache(2, view) == std::vector<int>{3});
  CHECK(c->select_stage_cache(3, view) == std::vector<int>{1, 2});
  CHECK(c->locality_respecting());
  CHECK_THROWS_AS(oblivious_fixed_controller({}), std::invalid_argument);
}

TEST_CASE("random controller draws sorted uniform subsets") {
  const Permutation pi({2, 3, 4, 5, 6, 7, 8, 1});
  StageView view(pi, {});

  auto shared = oblivious_random_controller(8, 3, 42, true);
  const auto first = shared->select_stage_cache(1, view);
  CHECK(first.size() == 3);
  CHECK(std::is_sorted(first.begin(), first.end()));
  for (int t = 2; t <= 5; ++t) CHECK(shared->select_stage_cache(t, view) == first);

  auto fresh = oblivious_random_controller(8, 3, 42, false);
  bool varied = false;
  const auto base = fresh->select_stage_cache(1, view);
  for (int t = 2; t <= 8; ++t) varied = varied || fresh->select_stage_cache(t, view) != base;
  CHECK(varied);

  // same seed, same stream
  auto again = oblivious_random_controller(8, 3, 42, true);
  CHECK(again->select_stage_cache(1, view) == first);

  // s >= n degenerates to the full set
  auto full = oblivious_random_controller(4, 9, 7, false);
  const Permutation pi4({2, 3, 4, 1});
  StageView view4(pi4, {});
  CHECK(full->select_stage_cache(1, view4) == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("random subsets include each element at rate s/n") {
  const Permutation pi({2, 3, 4, 5, 6, 7, 8, 1});
  StageView view(pi, {});
  std::map<int, int> inclusion;
  const int draws = 20000;
  auto c = oblivious_random_controller(8, 3, 99, false);
  for (int t = 1; t <= draws; ++t)
    for (const int pos : c->select_stage_cache(t, view)) inclusion[pos] += 1;
  // expected 7500 each, 5-sigma binomial band
  for (int pos = 1; pos <= 8; ++pos) {
    CHECK(inclusion[pos] >= 7157);
    CHECK(inclusion[pos] <= 7843);
  }
}

TEST_CASE("chain tracking follows the chain after a stage-one hit") {
  const Permutation pi({2, 3, 4, 5, 1});
  auto c = adaptive_chain_tracking_controller(5, 2);
  const StageGame game = StageGame::consecutive(5, 2, 3);
  const std::vector<bool> hits = run_stage_game(pi, *c, game);
  CHECK(hits == std::vector<bool>{true, true, true});
}

TEST_CASE("chain tracking falls back once the chain is lost") {
  const Permutation pi({3, 4, 5, 1, 2});
  auto c = adaptive_chain_tracking_controller(5, 1);
  const StageGame game = StageGame::consecutive(5, 1, 2);
  const std::vector<bool> hits = run_stage_game(pi, *c, game);
  CHECK(hits == std::vector<bool>{false, false});
}

TEST_CASE("stage game scores destinations against the cache") {
  const Permutation pi({2, 3, 4, 1});
  auto c = oblivious_fixed_controller({{2}});
  const std::vector<bool> hits = run_stage_game(pi, *c, StageGame::consecutive(4, 1, 2));
  CHECK(hits == std::vector<bool>{true, false});
}

TEST_CASE("stage game enforces cache size and range") {
  const Permutation pi({2, 3, 4, 1});
  auto fat = oblivious_fixed_controller({{1, 2, 3}});
  CHECK_THROWS_AS(run_stage_game(pi, *fat, StageGame::consecutive(4, 2, 1)),
                  CacheOverflowError);
  auto wild = oblivious_fixed_controller({{9}});
  CHECK_THROWS_AS(run_stage_game(pi, *wild, StageGame::consecutive(4, 1, 1)),
                  std::invalid_argument);
}

TEST_CASE("stage games place destinations consecutively or doubling") {
  CHECK(StageGame::consecutive(5, 2, 3).destination_hops == std::vector<int>{1, 2, 3});
  CHECK(StageGame::doubling(16, 8, 8).destination_hops == std::vector<int>{2, 4, 8});
  CHECK(StageGame::doubling(16, 8, 1).destination_hops == std::vector<int>{1});
  CHECK(StageGame::doubling(16, 8, 2).destination_hops == std::vector<int>{2});
  CHECK(StageGame::doubling(16, 8, 5).destination_hops == std::vector<int>{2, 4, 5});
  CHECK(StageGame::doubling(16, 8, 8).stages() == 3);
  CHECK_THROWS_AS(StageGame::consecutive(5, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(StageGame::doubling(5, 2, 0), std::invalid_argument);
}

TEST_CASE("oracle controller is flagged as permutation-aware") {
  const Permutation pi({2, 3, 4, 1});
  auto oracle = oracle_controller(pi, 1);
  CHECK(!oracle->locality_respecting());
  auto tracker = adaptive_chain_tracking_controller(4, 1);
  CHECK(tracker->locality_respecting());
  auto fixed = oblivious_fixed_controller({{1}});
  CHECK(fixed->locality_respecting());
}

TEST_CASE("controller kind names are stable") {
  CHECK(std::string(controller_kind_name(ControllerKind::oblivious_fixed)) ==
        "oblivious-fixed");
  CHECK(std::string(controller_kind_name(ControllerKind::oracle)) == "oracle");
}
