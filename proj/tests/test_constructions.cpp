#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "kvchase/constructions.hpp"
#include "kvchase/engine.hpp"
#include "kvchase/task.hpp"

using namespace kvchase;

TEST_CASE("serial program spends lookups first, then carries") {
  ModelConfig cfg;
  cfg.n = 16;
  cfg.k = 3;
  cfg.L = 6;
  cfg.m = 8;
  cfg.p = 4;
  cfg.s = 1;
  cfg.validate();
  const LayerProgram prog = build_serial_program(cfg);
  CHECK(prog.depth() == 6);
  for (int i = 0; i < 3; ++i) CHECK(prog.layers[static_cast<std::size_t>(i)] == LayerOp::lookup);
  for (int i = 3; i < 6; ++i) CHECK(prog.layers[static_cast<std::size_t>(i)] == LayerOp::carry);

  cfg.k = 8;
  cfg.L = 5;
  const LayerProgram clipped = build_serial_program(cfg);
  CHECK(clipped.depth() == 5);
  for (const LayerOp op : clipped.layers) CHECK(op == LayerOp::lookup);
}

TEST_CASE("doubling schedule depth matches the pinned points") {
  CHECK(pd_schedule(16, 8, 1).depth == 8);
  CHECK(pd_schedule(16, 8, 2).depth == 4);
  CHECK(pd_schedule(16, 8, 4).depth == 4);
  CHECK(pd_schedule(16, 8, 8).depth == 3);
  CHECK(pd_schedule(16, 8, 16).depth == 3);
}

TEST_CASE("doubling schedule is monotone in cache size and uses s_eff <= s") {
  for (const int k : {4, 8, 16}) {
    int prev = 1 << 20;
    for (int s = 1; s <= 20; ++s) {
      const PdSchedule sched = pd_schedule(32, k, s);
      CHECK(sched.depth <= prev);
      CHECK(sched.s_eff <= s);
      CHECK(sched.s_eff >= 1);
      CHECK(sched.depth == sched.plan.count() * sched.stages_per_window);
      CHECK(sched.plan.boundaries.back() == k);
      prev = sched.depth;
    }
  }
}

TEST_CASE("doubling schedule serializes") {
  const PdSchedule sched = pd_schedule(16, 8, 4);
  const nlohmann::json j = sched.to_json();
  CHECK(j.at("depth").get<int>() == sched.depth);
  CHECK(j.at("windows").get<int>() == sched.plan.count());
  CHECK(j.at("stages_per_window").get<int>() == sched.stages_per_window);
  CHECK(j.at("window_size").get<int>() == sched.s_eff);
  CHECK(j.at("boundaries").get<std::vector<int>>() == sched.plan.boundaries);
}

TEST_CASE("windowed doubling computes every chain exactly") {
  // exhaustive S_6: includes short principal cycles, wraps, fixed points
  for_each_permutation(6, [](const Permutation& pi) {
    for (const int k : {1, 2, 3, 5, 8}) {
      const int truth = chain(pi, k).answer();
      for (const int s : {1, 2, 3, 6}) {
        const PdSchedule sched = pd_schedule(6, k, s);
        const WindowedPdResult res = simulate_windowed_pd(pi, k, s, sched.depth);
        CHECK(res.success);
        CHECK(res.answer == truth);
        CHECK(res.depth_required == sched.depth);
      }
    }
  });
}

TEST_CASE("windowed doubling respects the depth budget") {
  const Permutation pi = random_permutation(16, 11);
  const PdSchedule sched = pd_schedule(16, 8, 2);
  CHECK(sched.depth == 4);
  CHECK(!simulate_windowed_pd(pi, 8, 2, 3).success);
  CHECK(simulate_windowed_pd(pi, 8, 2, 4).success);
  CHECK(simulate_windowed_pd(pi, 8, 2, 9).success);
}

TEST_CASE("windowed doubling handles the trivial hop counts") {
  const Permutation pi = random_permutation(8, 2);
  const WindowedPdResult zero = simulate_windowed_pd(pi, 0, 2, 0);
  CHECK(zero.success);
  CHECK(zero.answer == 1);
  const WindowedPdResult one = simulate_windowed_pd(pi, 1, 4, 1);
  CHECK(one.success);
  CHECK(one.answer == pi.apply(1));
}
