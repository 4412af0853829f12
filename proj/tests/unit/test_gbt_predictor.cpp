#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "elect/gbt.hpp"
#include "elect/predictor.hpp"
#include "elect/rng.hpp"
#include "helpers.hpp"

using namespace elect;

namespace {

double mse(const GbtModel& m, const Matrix& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double e = m.predict(x.row(i)) - y[i];
    s += e * e;
  }
  return s / static_cast<double>(x.rows());
}

struct Toy {
  TaskIpms ipms;
  PerformanceMatrix perf;
};

// Performance follows the IPMs with task-specific noise.
Toy toy(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ModelId> models;
  for (std::size_t j = 0; j < m; ++j)
    models.push_back(parse_model_id("hbos(n_bins=" + std::to_string(j + 2) + ")"));
  Toy t{TaskIpms(n, std::vector<IpmVector>(m)), {Matrix(n, m), {}, ModelSet(models)}};
  for (std::size_t i = 0; i < n; ++i) {
    t.perf.dataset_ids.push_back("task" + std::to_string(i));
    for (std::size_t j = 0; j < m; ++j) {
      auto& v = t.ipms[i][j];
      v.mc = rng.uniform();
      v.select = rng.uniform() * 2 - 1;
      v.hits = rng.uniform();
      t.perf.values(i, j) = std::clamp(0.5 * v.mc + 0.2 * v.hits + 0.02 * rng.normal(), 0.0, 1.0);
    }
  }
  return t;
}

}  // namespace

TEST_CASE("constant targets give a constant model") {
  const auto x = test::random_matrix(50, 3, 1);
  const std::vector<double> y(50, 0.37);
  const auto m = fit_gbt(x, y, GbtParams{30, 3, 0.3, 2, 1.0, 0});
  for (std::size_t i = 0; i < 50; ++i) CHECK(m.predict(x.row(i)) == doctest::Approx(0.37));
  CHECK_THROWS_AS(fit_gbt(Matrix(1, 3), std::vector<double>{1.0}, GbtParams{}), ValidationError);
}

TEST_CASE("a step function is learned by depth-1 trees") {
  Matrix x(200, 1);
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x(i, 0) = -1.0 + 2.0 * static_cast<double>(i) / 199.0;
    y[i] = x(i, 0) > 0 ? 1.0 : 0.0;
  }
  const auto m = fit_gbt(x, y, GbtParams{10, 1, 0.5, 1, 1.0, 0});
  CHECK(mse(m, x, y) < 1e-3);
  CHECK(m.trees.size() == 10);
  for (const auto& t : m.trees) CHECK(t.depth() <= 1);
}

TEST_CASE("duplicating every sample leaves the model unchanged") {
  const auto x = test::random_matrix(60, 2, 3);
  std::vector<double> y(60);
  for (std::size_t i = 0; i < 60; ++i) y[i] = std::sin(x(i, 0)) + 0.5 * x(i, 1);
  Matrix xx(120, 2);
  std::vector<double> yy(120);
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t c : {std::size_t{0}, std::size_t{1}}) {
      xx(2 * i + c, 0) = x(i, 0);
      xx(2 * i + c, 1) = x(i, 1);
      yy[2 * i + c] = y[i];
    }
  // min_leaf 1 vs 2 keeps the admissible splits identical after doubling.
  const auto a = fit_gbt(x, y, GbtParams{20, 3, 0.1, 1, 1.0, 0});
  const auto b = fit_gbt(xx, yy, GbtParams{20, 3, 0.1, 2, 1.0, 0});
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (std::size_t k = 0; k < a.trees[t].nodes.size(); ++k) {
      CHECK(a.trees[t].nodes[k].feature == b.trees[t].nodes[k].feature);
      CHECK(a.trees[t].nodes[k].threshold == b.trees[t].nodes[k].threshold);
      CHECK(a.trees[t].nodes[k].value == doctest::Approx(b.trees[t].nodes[k].value).epsilon(1e-12));
    }
  }
}

TEST_CASE("training is deterministic and order-free") {
  const auto x = test::random_matrix(80, 4, 5);
  std::vector<double> y(80);
  for (std::size_t i = 0; i < 80; ++i) y[i] = x(i, 0) * x(i, 1) - x(i, 3);
  const GbtParams p{25, 3, 0.1, 5, 0.8, 9};
  const auto a = fit_gbt(x, y, p);
  CHECK(a == fit_gbt(x, y, p));
  Matrix px(80, 4);
  std::vector<double> py(80);
  for (std::size_t i = 0; i < 80; ++i) {
    const std::size_t src = (i * 37) % 80;
    for (std::size_t f = 0; f < 4; ++f) px(i, f) = x(src, f);
    py[i] = y[src];
  }
  CHECK(a == fit_gbt(px, py, p));
  CHECK(gbt_from_json(gbt_to_json(a)) == a);
  CHECK(gbt_to_json(gbt_from_json(gbt_to_json(a))) == gbt_to_json(a));
}

TEST_CASE("training pairs are mirrored and complete") {
  const auto t = toy(2, 3, 7);
  const auto pairs = build_training_pairs(t.ipms, t.perf);
  CHECK(pairs.size() == 2 * 3 * 2);
  for (std::size_t k = 0; k < pairs.size(); k += 2) {
    CHECK(pairs[k].target == -pairs[k + 1].target);
    for (std::size_t f = 0; f < 3; ++f) {
      CHECK(pairs[k].features[f] == pairs[k + 1].features[f + 3]);
      CHECK(pairs[k].features[f + 3] == pairs[k + 1].features[f]);
    }
  }
  for (const auto& p : pairs) CHECK((p.target >= -1.0 && p.target <= 1.0));
  const auto big = toy(4, 6, 8);
  CHECK(build_training_pairs(big.ipms, big.perf).size() == 2 * 4 * 15);
  const std::vector<std::size_t> rows{1, 3}, cols{0, 2, 5};
  CHECK(build_training_pairs(big.ipms, big.perf, rows, cols).size() == 2 * 2 * 3);
}

TEST_CASE("predict_gap is exactly antisymmetric and clamped") {
  const auto t = toy(6, 6, 9);
  const auto pairs = build_training_pairs(t.ipms, t.perf);
  const auto m = fit_pair_predictor(pairs, GbtParams{40, 3, 0.1, 5, 1.0, 0});
  Rng rng(10);
  for (int k = 0; k < 50; ++k) {
    IpmVector a{rng.uniform(), rng.uniform(), rng.uniform()};
    IpmVector b{rng.uniform(), rng.uniform(), rng.uniform()};
    CHECK(predict_gap(m, a, a) == 0.0);
    CHECK(predict_gap(m, a, b) == -predict_gap(m, b, a));
    CHECK(std::abs(predict_gap(m, a, b)) <= 1.0);
  }
}

TEST_CASE("task folds and CV tuning") {
  CHECK(task_folds(5, 2) == std::vector<std::size_t>{0, 1, 0, 1, 0});
  const auto t = toy(9, 6, 11);
  const std::vector<GbtParams> one{GbtParams{10, 2, 0.1, 5, 1.0, 0}};
  CHECK(cv_tune_predictor(t.ipms, t.perf, one, 3).best == one[0]);
  // A vanishing learning rate predicts little beyond the base score and loses every fold.
  const std::vector<GbtParams> two{GbtParams{50, 3, 1e-6, 5, 1.0, 0}, GbtParams{50, 3, 0.1, 5, 1.0, 0}};
  const auto out = cv_tune_predictor(t.ipms, t.perf, two, 3);
  for (std::size_t f = 0; f < 3; ++f) REQUIRE(out.fold_mse[1][f] < out.fold_mse[0][f]);
  CHECK(out.best_index == 1);
  CHECK(out.best == two[1]);
  CHECK(out.fold_mse[1] == task_cv_mse(t.ipms, t.perf, two[1], 3));
  CHECK_THROWS_AS(cv_tune_predictor(t.ipms, t.perf, two, 10), ValidationError);
  CHECK_THROWS_AS(cv_tune_predictor(t.ipms, t.perf, std::vector<GbtParams>{}, 3), ValidationError);
  CHECK(default_predictor_grid().front() == GbtParams{200, 4, 0.05, 20, 1.0, 0});
}
