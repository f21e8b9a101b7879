#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "kvchase/experiments.hpp"

using namespace kvchase;

namespace {

const ExperimentRecord& find_record(const std::vector<ExperimentRecord>& records,
                                    const std::string& experiment, int k, int s, int L) {
  for (const ExperimentRecord& r : records)
    if (r.experiment == experiment && r.k == k && r.s == s && r.L == L) return r;
  REQUIRE(false);
  return records.front();
}

long long count_records(const std::vector<ExperimentRecord>& records,
                        const std::string& experiment) {
  return std::count_if(records.begin(), records.end(),
                       [&](const ExperimentRecord& r) { return r.experiment == experiment; });
}

}  // namespace

TEST_CASE("record seeds are reproducible and parameter-sensitive") {
  const std::uint64_t a = record_seed(1, "alpha", 16, 8, 2, 4, 3, 1, 8, 4);
  CHECK(a == record_seed(1, "alpha", 16, 8, 2, 4, 3, 1, 8, 4));
  CHECK(a != record_seed(2, "alpha", 16, 8, 2, 4, 3, 1, 8, 4));
  CHECK(a != record_seed(1, "beta", 16, 8, 2, 4, 3, 1, 8, 4));
  CHECK(a != record_seed(1, "alpha", 17, 8, 2, 4, 3, 1, 8, 4));
  CHECK(a != record_seed(1, "alpha", 16, 8, 2, 5, 3, 1, 8, 4));
}

TEST_CASE("fresh records carry no reference value") {
  ExperimentRecord rec;
  CHECK(!rec.has_ref());
  rec.ref = 0.25;
  CHECK(rec.has_ref());
}

TEST_CASE("serial sweep is exact at and beyond the hop count") {
  const auto records = run_serial_sweep(8, {2}, 3, 50, 99);
  REQUIRE(records.size() == 3);
  for (const ExperimentRecord& r : records) {
    CHECK(r.experiment == "serial-threshold");
    CHECK(r.n == 8);
    CHECK(r.k == 2);
    CHECK(r.s == 1);
    CHECK(r.T == 0);
    CHECK(r.H == 1);
    CHECK(r.m == 8);
    CHECK(r.p == 4);
    CHECK(r.trials == 50);
    CHECK(!r.has_ref());
  }
  CHECK(find_record(records, "serial-threshold", 2, 1, 1).accuracy < 0.5);
  CHECK(find_record(records, "serial-threshold", 2, 1, 2).accuracy == 1.0);
  CHECK(find_record(records, "serial-threshold", 2, 1, 3).accuracy == 1.0);
}

TEST_CASE("truncated serial runs land on the cycle-divisor law") {
  // answer after L < k hops is z_L, which equals z_k iff the cycle length of
  // token 1 divides k-L; that length is uniform on 1..n, so the accuracy is
  // (number of divisors of k-L)/n = 2/16 for both rows here.
  const auto records = run_serial_sweep(16, {4}, 2, 2000, 424242);
  REQUIRE(records.size() == 2);
  for (const ExperimentRecord& r : records) {
    CHECK(r.accuracy > 0.125 - 0.037);  // five sigma at 2000 trials
    CHECK(r.accuracy < 0.125 + 0.037);
  }
}

TEST_CASE("windowed sweep steps from zero to one at the schedule depth") {
  const auto records = run_windowed_sweep(16, 8, {2, 8}, 5, 60, 7);
  CHECK(count_records(records, "windowed-depth") == 10);
  CHECK(count_records(records, "windowed-mindepth") == 2);

  CHECK(find_record(records, "windowed-depth", 8, 2, 3).accuracy == 0.0);
  CHECK(find_record(records, "windowed-depth", 8, 2, 4).accuracy == 1.0);
  CHECK(find_record(records, "windowed-depth", 8, 2, 5).accuracy == 1.0);
  CHECK(find_record(records, "windowed-depth", 8, 8, 2).accuracy == 0.0);
  CHECK(find_record(records, "windowed-depth", 8, 8, 3).accuracy == 1.0);

  const ExperimentRecord& tight = find_record(records, "windowed-mindepth", 8, 2, 4);
  CHECK(tight.successes == tight.trials);
  CHECK(tight.accuracy == 1.0);
  CHECK(tight.T == 1);  // window size 2 doubles in one stage
  find_record(records, "windowed-mindepth", 8, 8, 3);  // requires presence
}

TEST_CASE("random-cache stage game matches its analytic reference") {
  const auto records = run_random_cache_sweep(16, 8, {1, 8}, 800, 5150);
  REQUIRE(records.size() == 2);

  const ExperimentRecord& single = find_record(records, "random-cache-joint", 1, 8, 0);
  CHECK(single.T == 1);
  CHECK(single.has_ref());
  CHECK(single.ref == doctest::Approx(0.5));
  CHECK(single.accuracy > 0.5 - 0.089);  // five sigma at 800 trials
  CHECK(single.accuracy < 0.5 + 0.089);

  const ExperimentRecord& joint = find_record(records, "random-cache-joint", 8, 8, 0);
  CHECK(joint.T == 3);
  CHECK(joint.has_ref());
  CHECK(joint.ref == doctest::Approx(512.0 / 2197.0));
  CHECK(joint.accuracy > 0.0);
  CHECK(joint.accuracy < 0.5);
  CHECK(joint.H == 0);
  CHECK(joint.m == 0);
  CHECK(joint.p == 0);
}

TEST_CASE("depth curves tabulate floor, doubling, and serial depths") {
  const auto records = depth_curve_records(16, {8}, {1, 2, 8});
  REQUIRE(records.size() == 9);
  CHECK(find_record(records, "depth-lower", 8, 1, 8).L == 8);
  CHECK(find_record(records, "depth-lower", 8, 2, 4).L == 4);
  CHECK(find_record(records, "depth-lower", 8, 8, 1).L == 1);
  CHECK(find_record(records, "depth-pd", 8, 1, 8).L == 8);
  CHECK(find_record(records, "depth-pd", 8, 2, 4).L == 4);
  CHECK(find_record(records, "depth-pd", 8, 8, 3).L == 3);
  CHECK(find_record(records, "depth-serial", 8, 1, 8).L == 8);
  CHECK(find_record(records, "depth-serial", 8, 8, 8).L == 8);
  for (const ExperimentRecord& r : records) {
    CHECK(r.trials == 0);
    CHECK(r.successes == 0);
    CHECK(!r.has_ref());
  }
}

TEST_CASE("CSV output is sorted, fixed-width, and deterministic") {
  ExperimentRecord b;
  b.experiment = "zeta";
  b.n = 4;
  b.accuracy = 0.5;
  b.seed = 3;
  ExperimentRecord a;
  a.experiment = "alpha";
  a.n = 16;
  a.k = 8;
  a.trials = 10;
  a.successes = 5;
  a.accuracy = 0.5;
  a.seed = 12;

  const std::string csv = records_to_csv({b, a});
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "experiment,n,k,s,L,T,H,m,p,trials,successes,accuracy,seed");
  REQUIRE(std::getline(lines, line));
  CHECK(line == "alpha,16,8,0,0,0,0,0,0,10,5,0.500000,12");
  REQUIRE(std::getline(lines, line));
  CHECK(line == "zeta,4,0,0,0,0,0,0,0,0,0,0.500000,3");
  CHECK(!std::getline(lines, line));

  CHECK(records_to_csv({b, a}) == records_to_csv({a, b}));

  const auto sweep = run_random_cache_sweep(8, 4, {2}, 40, 31337);
  CHECK(records_to_csv(sweep) == records_to_csv(run_random_cache_sweep(8, 4, {2}, 40, 31337)));
}

TEST_CASE("JSON round trip preserves every field including the optional reference") {
  auto records = run_random_cache_sweep(16, 8, {1}, 30, 8080);
  ExperimentRecord no_ref;
  no_ref.experiment = "bare";
  no_ref.n = 4;
  no_ref.accuracy = 0.25;
  no_ref.seed = 77;
  records.push_back(no_ref);

  const std::string text = records_to_json_text(records);
  const auto parsed = records_from_json_text(text);
  REQUIRE(parsed.size() == records.size());

  // output is sorted; "bare" < "random-cache-joint"
  CHECK(parsed[0].experiment == "bare");
  CHECK(!parsed[0].has_ref());
  CHECK(parsed[0].accuracy == 0.25);
  CHECK(parsed[0].seed == 77);
  CHECK(parsed[1].experiment == "random-cache-joint");
  CHECK(parsed[1].has_ref());
  CHECK(parsed[1].ref == 0.5);
  CHECK(parsed[1].trials == 30);
  CHECK(parsed[1].seed == records[0].seed);
}

TEST_CASE("record emission validates inputs and reports unwritable paths") {
  ExperimentRecord rec;
  rec.experiment = "demo";
  rec.n = 4;

  CHECK_THROWS_AS(emit_records({}, "csv", "/tmp/kvchase_never_written.csv"),
                  std::invalid_argument);
  CHECK_THROWS_AS(emit_records({rec}, "yaml", "/tmp/kvchase_never_written.csv"),
                  std::invalid_argument);
  CHECK_THROWS_AS(emit_records({rec}, "csv", "/nonexistent-dir-kvchase/out.csv"),
                  std::runtime_error);

  const std::string path = "/tmp/kvchase_test_records.csv";
  emit_records({rec}, "csv", path);
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream content;
  content << in.rdbuf();
  CHECK(content.str() == records_to_csv({rec}));
  std::remove(path.c_str());
}
