#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairtext/error.hpp"
#include "fairtext/fairness.hpp"
#include "fairtext/rng.hpp"

using namespace fairtext;

namespace {

// Per-group rates in percent -> integer confusion counts at the given scale.
GroupConfusion confusion_from_rates(double fpr0, double fpr1, double fnr0,
                                    double fnr1, long per_cell = 10000) {
  GroupConfusion c;
  auto fill = [per_cell](GroupConfusion::Cell& cell, double fpr, double fnr) {
    cell.fp = std::lround(fpr / 100.0 * static_cast<double>(per_cell));
    cell.tn = per_cell - cell.fp;
    cell.fn = std::lround(fnr / 100.0 * static_cast<double>(per_cell));
    cell.tp = per_cell - cell.fn;
  };
  fill(c.group[0], fpr0, fnr0);
  fill(c.group[1], fpr1, fnr1);
  return c;
}

}  // namespace

TEST_CASE("confusion_by_group counts the hand-enumerated example") {
  // (z, y, pred) = (0,1,1), (0,0,1), (1,1,0), (1,0,0)
  std::vector<Example> data{{{"a"}, 1, 0}, {{"a"}, 0, 0}, {{"a"}, 1, 1}, {{"a"}, 0, 1}};
  std::vector<int> preds{1, 1, 0, 0};
  const GroupConfusion c = confusion_by_group(preds, data);
  CHECK(c.group[0].tp == 1);
  CHECK(c.group[0].fp == 1);
  CHECK(c.group[0].tn == 0);
  CHECK(c.group[0].fn == 0);
  CHECK(c.group[1].fn == 1);
  CHECK(c.group[1].tn == 1);
  CHECK(c.group[1].tp == 0);
  CHECK(c.group[1].fp == 0);
}

TEST_CASE("confusion_by_group: all correct / all flipped") {
  std::vector<Example> data{{{"a"}, 1, 0}, {{"a"}, 0, 0}, {{"a"}, 1, 1}, {{"a"}, 0, 1}};
  std::vector<int> correct{1, 0, 1, 0};
  const GroupConfusion c0 = confusion_by_group(correct, data);
  for (int z : {0, 1}) {
    CHECK(c0.group[static_cast<std::size_t>(z)].fp == 0);
    CHECK(c0.group[static_cast<std::size_t>(z)].fn == 0);
  }
  std::vector<int> flipped{0, 1, 0, 1};
  const GroupConfusion c1 = confusion_by_group(flipped, data);
  for (int z : {0, 1}) {
    CHECK(c1.group[static_cast<std::size_t>(z)].tp == 0);
    CHECK(c1.group[static_cast<std::size_t>(z)].tn == 0);
  }
}

TEST_CASE("confusion_by_group rejects misaligned predictions") {
  std::vector<Example> data{{{"a"}, 1, 0}};
  CHECK_THROWS_AS(confusion_by_group(std::vector<int>{1, 0}, data), AlignmentError);
}

TEST_CASE("fairness_report reproduces the published sentiment-race row") {
  // Group rates: FP 46.97/23.38, FN 21.29/62.75 at equal group sizes.
  const GroupConfusion c = confusion_from_rates(46.97, 23.38, 21.29, 62.75);
  const FairnessReport r = fairness_report(c);
  CHECK(r.fpr[0] == doctest::Approx(46.97).epsilon(1e-6));
  CHECK(r.fpr[1] == doctest::Approx(23.38).epsilon(1e-6));
  CHECK(r.fpr_overall == doctest::Approx(35.175).epsilon(1e-6));
  CHECK(r.fped == doctest::Approx(23.59).epsilon(1e-4));
  CHECK(r.fned == doctest::Approx(41.46).epsilon(1e-4));
  CHECK(r.parity[0] == doctest::Approx(62.84).epsilon(1e-4));
  CHECK(r.parity[1] == doctest::Approx(30.315).epsilon(1e-4));
  CHECK(r.dpd == doctest::Approx(32.525).epsilon(1e-4));
}

TEST_CASE("equal-size groups: FPED equals |FPR0 - FPR1|") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double fpr0 = rng.uniform(0.0, 100.0);
    const double fpr1 = rng.uniform(0.0, 100.0);
    const double fnr0 = rng.uniform(0.0, 100.0);
    const double fnr1 = rng.uniform(0.0, 100.0);
    const GroupConfusion c = confusion_from_rates(fpr0, fpr1, fnr0, fnr1, 100000);
    const FairnessReport r = fairness_report(c);
    CHECK(r.fped == doctest::Approx(std::abs(r.fpr[0] - r.fpr[1])).epsilon(1e-9));
    CHECK(r.fned == doctest::Approx(std::abs(r.fnr[0] - r.fnr[1])).epsilon(1e-9));
  }
}

TEST_CASE("metrics are symmetric under group relabeling") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    GroupConfusion c;
    for (int z : {0, 1}) {
      auto& g = c.group[static_cast<std::size_t>(z)];
      g.tp = 1 + static_cast<long>(rng.uniform_int(500));
      g.fp = 1 + static_cast<long>(rng.uniform_int(500));
      g.tn = 1 + static_cast<long>(rng.uniform_int(500));
      g.fn = 1 + static_cast<long>(rng.uniform_int(500));
    }
    GroupConfusion swapped;
    swapped.group[0] = c.group[1];
    swapped.group[1] = c.group[0];
    const FairnessReport a = fairness_report(c);
    const FairnessReport b = fairness_report(swapped);
    CHECK(a.fped == doctest::Approx(b.fped).epsilon(1e-12));
    CHECK(a.fned == doctest::Approx(b.fned).epsilon(1e-12));
    CHECK(a.dpd == doctest::Approx(b.dpd).epsilon(1e-12));
    CHECK(a.dpd >= 0.0);
    CHECK(a.dpd <= 100.0);
  }
}

TEST_CASE("identical group behavior puts every difference at zero") {
  const GroupConfusion c = confusion_from_rates(25.0, 25.0, 10.0, 10.0);
  const FairnessReport r = fairness_report(c);
  CHECK(r.fped == doctest::Approx(0.0));
  CHECK(r.fned == doctest::Approx(0.0));
  CHECK(r.dpd == doctest::Approx(0.0));
}

TEST_CASE("undefined rates raise a descriptive error instead of silent zeros") {
  GroupConfusion c;
  c.group[0] = {10, 5, 5, 10};
  c.group[1] = {20, 0, 0, 0};  // no actual negatives in group 1
  CHECK_THROWS_WITH_AS(fairness_report(c),
                       doctest::Contains("no actual negatives"),
                       MetricUndefinedError);

  GroupConfusion empty;
  empty.group[0] = {10, 5, 5, 10};
  CHECK_THROWS_AS(fairness_report(empty), MetricUndefinedError);
}

TEST_CASE("pooled overall rate differs from the group mean for unequal groups") {
  GroupConfusion c;
  c.group[0] = {0, 30, 70, 0};   // 100 actual negatives, FPR 30%
  c.group[1] = {0, 10, 390, 0};  // 400 actual negatives, FPR 2.5%
  // Degenerate positives would be rejected; add one of each.
  c.group[0].tp = 1;
  c.group[0].fn = 1;
  c.group[1].tp = 1;
  c.group[1].fn = 1;
  const FairnessReport r = fairness_report(c);
  // pooled: 40/500 = 8%, mean of group rates would be 16.25%
  CHECK(r.fpr_overall == doctest::Approx(8.0).epsilon(1e-9));
}
