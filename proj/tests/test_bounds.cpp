#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "kvchase/bounds.hpp"
#include "kvchase/rational.hpp"

using namespace kvchase;

TEST_CASE("integer ceiling helpers") {
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(2) == 1);
  CHECK(ceil_log2(3) == 2);
  CHECK(ceil_log2(16) == 4);
  CHECK(ceil_log2(17) == 5);
  CHECK_THROWS_AS(ceil_log2(0), std::invalid_argument);
  CHECK(ceil_div(8, 3) == 3);
  CHECK(ceil_div(9, 3) == 3);
  CHECK(ceil_div(0, 5) == 0);
  CHECK_THROWS_AS(ceil_div(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(ceil_div(-1, 2), std::invalid_argument);
}

TEST_CASE("exact rational arithmetic") {
  CHECK(Rational(48, 8) == Rational(6));
  CHECK(Rational(6).str() == "6");
  CHECK(Rational(2, -4).str() == "-1/2");
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK(Rational::pow(Rational(2, 3), 2) == Rational(4, 9));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
  CHECK_THROWS_AS(Rational::pow(Rational(1000000007), 3), std::overflow_error);
}

TEST_CASE("depth table in the wide-read regime") {
  const BoundsReport r = bounds_report(16, 8, 8, 1, 8, 4);
  CHECK(r.W == 1);
  CHECK(r.B == 1);
  CHECK(r.barrier_regime);
  CHECK(!r.product_regime);
  CHECK(r.reach_factor == 1);
  CHECK(r.lower_max == 1);
  CHECK(r.lower_product == 1);
  CHECK(r.lower_product_conjectural);
  CHECK(r.upper == 4);
  CHECK(r.s_star == Rational(6));
  CHECK(r.s_star.str() == "6");
  CHECK(r.min_cache_reach_coeff == Rational(8));
  CHECK(r.min_cache_bandwidth_coeff == Rational(1));
  CHECK(r.min_cache_for_depth(2) == Rational(4));
  CHECK(r.min_cache_for_depth(16) == Rational(1, 2));
  CHECK_THROWS_AS(r.min_cache_for_depth(0), std::invalid_argument);
}

TEST_CASE("depth table in the narrow-read regime") {
  const BoundsReport r = bounds_report(16, 8, 2, 1, 1, 1);
  CHECK(r.W == 4);
  CHECK(r.B == 4);
  CHECK(!r.barrier_regime);
  CHECK(r.reach_factor == 4);
  CHECK(r.lower_max == 4);
  CHECK(r.lower_product == 16);
  CHECK(r.upper == 32);
  // bandwidth coefficient k*log2(n)/(H*m*p) = 8*4/1
  CHECK(r.min_cache_bandwidth_coeff == Rational(32));
  CHECK(r.min_cache_for_depth(2) == Rational(16));
}

TEST_CASE("sparse caches on long chains activate the per-window reach count") {
  const BoundsReport r = bounds_report(1024, 16, 8, 1, 8, 4);
  CHECK(r.product_regime);
  CHECK(r.reach_factor == r.W);
  CHECK(r.W == 2);
}

TEST_CASE("bound ordering holds across the whole grid") {
  for (const int n : {2, 4, 16, 64, 1024}) {
    for (const int k : {1, 2, 8, 16}) {
      for (const int s : {1, 2, 7, 64}) {
        for (const int H : {1, 2}) {
          for (const int m : {1, 8}) {
            for (const int p : {1, 4}) {
              const BoundsReport r = bounds_report(n, k, s, H, m, p);
              CHECK(r.lower_max <= r.lower_product);
              CHECK(r.lower_max <= r.upper);
              CHECK(r.lower_product <= r.upper);
              CHECK(r.reach_factor <= r.W);
              CHECK(r.B >= 1);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("depth table validation and serialization") {
  CHECK_THROWS_AS(bounds_report(1, 1, 1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(bounds_report(4, 0, 1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(bounds_report(4, 1, 0, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(bounds_report(4, 1, 1, 0, 1, 1), std::invalid_argument);

  const BoundsReport r = bounds_report(16, 8, 8, 1, 8, 4);
  const nlohmann::json j = r.to_json();
  CHECK(j.at("windows").get<int>() == 1);
  CHECK(j.at("pointer_layers").get<int>() == 1);
  CHECK(j.at("upper").get<long long>() == 4);
  CHECK(j.at("s_star_exact").get<std::string>() == "6");
  CHECK(j.at("barrier_regime").get<bool>());
  const std::string text = r.to_text();
  CHECK(text.find("depth bounds for n=16") != std::string::npos);
  CHECK(text.find("conjectured") != std::string::npos);
}

TEST_CASE("joint-success ceiling for permutation-independent caches") {
  const ObliviousBound small = oblivious_prob_bound(16, 8, 3);
  CHECK(small.main == Rational(512, 2197));
  CHECK(small.error == Rational(27, 8));
  CHECK(small.vacuous);
  CHECK(!small.main_term_dominates);

  const ObliviousBound tiny = oblivious_prob_bound(5, 2, 2);
  CHECK(tiny.main == Rational(4, 9));
  CHECK(tiny.error == Rational(16, 5));
  CHECK(tiny.vacuous);

  const ObliviousBound wide = oblivious_prob_bound(1024, 8, 2);
  CHECK(wide.main == Rational(16, 261121));
  CHECK(wide.error == Rational(1, 64));
  CHECK(!wide.vacuous);

  const ObliviousBound one = oblivious_prob_bound(16, 8, 1);
  CHECK(one.main == Rational(8, 15));
  CHECK(one.error == Rational(1, 8));
  CHECK(!one.vacuous);
  CHECK(one.main_term_dominates);

  CHECK_THROWS_AS(oblivious_prob_bound(3, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(oblivious_prob_bound(8, 1, 0), std::invalid_argument);

  const nlohmann::json j = wide.to_json();
  CHECK(j.at("main_exact").get<std::string>() == "16/261121");
  CHECK(!j.at("vacuous").get<bool>());
}

TEST_CASE("chain-tracking success law") {
  CHECK(adaptive_prob(16, 8) == Rational(1, 2));
  CHECK(adaptive_prob(5, 2) == Rational(2, 5));
  CHECK_THROWS_AS(adaptive_prob(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(adaptive_prob(5, 6), std::invalid_argument);
}

TEST_CASE("adaptive-over-oblivious separation floor") {
  const SeparationRatio wide = separation_ratio(1024, 512, 2);
  CHECK(wide.main_term_regime);
  CHECK(wide.ratio == Rational(1, 2));

  const SeparationRatio cramped = separation_ratio(16, 8, 3);
  CHECK(!cramped.main_term_regime);
  CHECK(cramped.ratio == Rational(2, 27));

  const SeparationRatio single = separation_ratio(16, 8, 1);
  CHECK(single.main_term_regime);
  CHECK(single.ratio == Rational(1, 4));

  const nlohmann::json j = wide.to_json();
  CHECK(j.at("ratio_exact").get<std::string>() == "1/2");
  CHECK(j.at("main_term_regime").get<bool>());
}
