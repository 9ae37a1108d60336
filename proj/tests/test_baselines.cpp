#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <fstream>

#include "fairtext/baselines.hpp"
#include "fairtext/error.hpp"

using namespace fairtext;

namespace {

std::vector<Example> cell_examples(int y, int z, int count) {
  std::vector<Example> out;
  for (int i = 0; i < count; ++i)
    out.push_back({{"tok" + std::to_string(i % 7)}, y, z});
  return out;
}

std::vector<Example> imbalanced_train() {
  // the rho = 0.8, N = 1000 construction
  std::vector<Example> train;
  auto add = [&train](std::vector<Example> xs) {
    train.insert(train.end(), xs.begin(), xs.end());
  };
  add(cell_examples(1, 0, 400));
  add(cell_examples(0, 0, 100));
  add(cell_examples(1, 1, 100));
  add(cell_examples(0, 1, 400));
  return train;
}

std::array<std::array<int, 2>, 2> counts(const std::vector<Example>& xs) {
  std::array<std::array<int, 2>, 2> c{};
  for (const Example& e : xs)
    ++c[static_cast<std::size_t>(e.z)][static_cast<std::size_t>(e.y)];
  return c;
}

}  // namespace

TEST_CASE("data augmentation rebalances each group to 1:1") {
  const auto train = imbalanced_train();
  std::vector<Example> reserve;
  auto add = [&reserve](std::vector<Example> xs) {
    reserve.insert(reserve.end(), xs.begin(), xs.end());
  };
  add(cell_examples(0, 0, 350));
  add(cell_examples(1, 1, 350));

  const auto augmented = data_augmentation(train, reserve, 7);
  CHECK(augmented.size() == 1600);
  const auto c = counts(augmented);
  CHECK(c[0][0] == 400);
  CHECK(c[0][1] == 400);
  CHECK(c[1][0] == 400);
  CHECK(c[1][1] == 400);
  // originals retained as a prefix
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(augmented[i].y == train[i].y);
    CHECK(augmented[i].z == train[i].z);
  }
}

TEST_CASE("data augmentation: balanced input is returned unchanged") {
  std::vector<Example> train;
  for (int z : {0, 1})
    for (int y : {0, 1}) {
      auto xs = cell_examples(y, z, 50);
      train.insert(train.end(), xs.begin(), xs.end());
    }
  const auto augmented = data_augmentation(train, {}, 3);
  CHECK(augmented.size() == train.size());
}

TEST_CASE("data augmentation: insufficient reserve raises a capacity error") {
  const auto train = imbalanced_train();
  const auto reserve = cell_examples(0, 0, 100);  // need 300 group-I negatives
  CHECK_THROWS_WITH_AS(data_augmentation(train, reserve, 1),
                       doctest::Contains("(y=0,z=0)"), CapacityError);
}

TEST_CASE("instance weights on the rho=0.8 split") {
  const auto train = imbalanced_train();
  const auto weighted = instance_weights(train);
  REQUIRE(weighted.size() == train.size());
  for (const WeightedExample& wx : weighted) {
    const double expected =
        (wx.example.z == 0) == (wx.example.y == 1) ? 0.625 : 2.5;
    CHECK(wx.weight == doctest::Approx(expected).epsilon(1e-9));
    CHECK(wx.weight > 0.0);
    CHECK(std::isfinite(wx.weight));
  }
}

TEST_CASE("instance weights are 1 on a balanced split") {
  std::vector<Example> train;
  for (int z : {0, 1})
    for (int y : {0, 1}) {
      auto xs = cell_examples(y, z, 25);
      train.insert(train.end(), xs.begin(), xs.end());
    }
  for (const WeightedExample& wx : instance_weights(train))
    CHECK(wx.weight == doctest::Approx(1.0));
}

TEST_CASE("per-group weighted label masses balance out") {
  // holds for any cell layout, not just the canonical one
  std::vector<Example> train;
  const std::array<std::array<int, 2>, 2> layout{{{37, 113}, {71, 23}}};
  for (int z : {0, 1})
    for (int y : {0, 1}) {
      auto xs = cell_examples(y, z,
                              layout[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)]);
      train.insert(train.end(), xs.begin(), xs.end());
    }
  const auto weighted = instance_weights(train);
  for (int z : {0, 1}) {
    double pos_mass = 0.0, neg_mass = 0.0;
    for (const WeightedExample& wx : weighted) {
      if (wx.example.z != z) continue;
      (wx.example.y == 1 ? pos_mass : neg_mass) += wx.weight;
    }
    // w(1,z)*n(1,z) = P(1)*n(z) and w(0,z)*n(0,z) = P(0)*n(z); equal masses
    // exactly when labels are balanced overall, as in the corpus splits.
    const double n = static_cast<double>(train.size());
    double p1 = 0.0;
    for (const Example& e : train) p1 += e.y;
    p1 /= n;
    CHECK(pos_mass / neg_mass == doctest::Approx(p1 / (1.0 - p1)).epsilon(1e-9));
  }

  const auto canonical = instance_weights(imbalanced_train());
  for (int z : {0, 1}) {
    double pos_mass = 0.0, neg_mass = 0.0;
    for (const WeightedExample& wx : canonical) {
      if (wx.example.z != z) continue;
      (wx.example.y == 1 ? pos_mass : neg_mass) += wx.weight;
    }
    CHECK(pos_mass == doctest::Approx(neg_mass).epsilon(1e-9));
  }
}

TEST_CASE("instance weights name the empty cell") {
  std::vector<Example> train = cell_examples(1, 0, 10);
  auto more = cell_examples(0, 0, 10);
  train.insert(train.end(), more.begin(), more.end());
  auto g2 = cell_examples(1, 1, 10);
  train.insert(train.end(), g2.begin(), g2.end());
  CHECK_THROWS_WITH_AS(instance_weights(train), doctest::Contains("(y=0,z=1)"),
                       ConfigError);
}

TEST_CASE("weighted corpus dump carries a fourth column") {
  const std::vector<WeightedExample> weighted{{{{"hello", "there"}, 1, 0}, 0.625},
                                              {{{"sad"}, 0, 1}, 2.5}};
  const auto path = std::filesystem::temp_directory_path() / "fairtext_weighted.tsv";
  save_weighted_tsv(path, weighted);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello there\t1\t0\t0.625");
  std::getline(in, line);
  CHECK(line == "sad\t0\t1\t2.5");
  std::filesystem::remove(path);
}
