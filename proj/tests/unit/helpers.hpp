#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "elect/core.hpp"
#include "elect/grid.hpp"
#include "elect/meta_train.hpp"
#include "elect/rng.hpp"
#include "elect/testbed.hpp"

namespace test {

inline elect::Matrix random_matrix(std::size_t r, std::size_t d, std::uint64_t seed) {
  elect::Rng rng(seed);
  elect::Matrix m(r, d);
  for (auto& v : m.data()) v = rng.normal();
  return m;
}

// Ten cheap models over four families.
inline elect::GridSpec tiny_grid() {
  using elect::Family;
  using elect::ParamValue;
  auto ints = [](std::initializer_list<std::int64_t> v) {
    std::vector<ParamValue> out;
    for (auto x : v) out.emplace_back(x);
    return out;
  };
  auto texts = [](std::initializer_list<const char*> v) {
    std::vector<ParamValue> out;
    for (auto x : v) out.emplace_back(std::string(x));
    return out;
  };
  return {{
      {Family::Knn, {{"k", ints({3, 10})}, {"agg", texts({"largest", "mean"})}}},
      {Family::Lof, {{"k", ints({5, 20})}, {"metric", texts({"euclidean"})}}},
      {Family::IForest, {{"n_trees", ints({25})}, {"subsample", ints({64})}, {"seed", ints({1, 2})}}},
      {Family::Hbos, {{"n_bins", ints({5, 20})}}},
  }};
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("elect_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Six labeled tasks: two synthetic mothersets, three outlier kinds each.
inline std::vector<elect::Dataset> small_tasks(std::uint64_t seed = 1, std::size_t mothersets = 2) {
  return elect::make_controlled_testbed(elect::synthetic_mothersets(mothersets, seed), seed);
}

// Cheap offline settings for tests.
inline elect::MetaTrainConfig fast_config() {
  elect::MetaTrainConfig c;
  c.hyperparams = {3, 3, 4, 10};
  c.anchors.max_anchors = 3;
  c.anchors.screening = {20, 2, 0.1, 10, 1.0, 0};
  c.predictor_grid = {{40, 3, 0.1, 10, 1.0, 0}};
  c.jobs = 1;
  return c;
}

}  // namespace test
