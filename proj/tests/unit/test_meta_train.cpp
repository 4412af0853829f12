#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "elect/detectors.hpp"
#include "elect/meta_train.hpp"
#include "elect/metrics.hpp"
#include "helpers.hpp"

using namespace elect;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> dir_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  return out;
}

const std::vector<Dataset>& tasks() {
  static const auto t = test::small_tasks();
  return t;
}

}  // namespace

TEST_CASE("performance matrix shape, range and trials") {
  const auto models = build_model_set(test::tiny_grid());
  const std::vector<Dataset> two(tasks().begin(), tasks().begin() + 2);
  ScoreTable cache;
  const auto p1 = compute_performance_matrix(two, models, 1, &cache, 1);
  CHECK(p1.tasks() == 2);
  CHECK(p1.models() == models.size());
  for (double v : p1.values.data()) CHECK((v >= 0.0 && v <= 1.0));
  const auto p3 = compute_performance_matrix(two, models, 3, cache, 1);
  for (std::size_t j = 0; j < models.size(); ++j) {
    if (is_stochastic(models[j].family)) continue;
    for (std::size_t i = 0; i < 2; ++i) CHECK(p1.values(i, j) == p3.values(i, j));
  }
  // P is a pure function of the cached scores and the labels.
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < models.size(); ++j)
      CHECK(p1.values(i, j) == average_precision(cache.scores[i][j], *two[i].labels));
  // A detector whose scores equal the labels is perfect.
  auto rigged = cache;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& y = *two[i].labels;
    rigged.scores[i][0].assign(y.begin(), y.end());
  }
  const auto pr = compute_performance_matrix(two, models, 1, rigged, 1);
  CHECK(pr.values(0, 0) == 1.0);
  CHECK(pr.values(1, 0) == 1.0);
  Dataset unlabeled = two[0];
  unlabeled.labels.reset();
  CHECK_THROWS_AS(compute_performance_matrix(std::vector<Dataset>{unlabeled}, models, 1), ValidationError);
}

TEST_CASE("meta-training fits each model once per task") {
  const auto models = build_model_set(test::tiny_grid());
  reset_fit_counter();
  const auto ml = meta_train(tasks(), test::tiny_grid(), test::fast_config());
  CHECK(fit_counter() == tasks().size() * models.size());
  ml.validate();
  CHECK(ml.performance.tasks() == tasks().size());
  CHECK(ml.ipms.size() == tasks().size());
  CHECK(!ml.anchors.empty());
  CHECK(ml.anchors.size() <= 3);

  auto cfg = test::fast_config();
  cfg.trials = 3;
  std::size_t stochastic = 0;
  for (const auto& m : models.models()) stochastic += is_stochastic(m.family);
  const std::vector<Dataset> two(tasks().begin(), tasks().begin() + 2);
  reset_fit_counter();
  compute_performance_matrix(two, models, 3, nullptr, 1);
  CHECK(fit_counter() == 2 * (models.size() + 2 * stochastic));
}

TEST_CASE("meta-training needs t + 1 tasks") {
  auto cfg = test::fast_config();
  cfg.hyperparams.t = 6;
  CHECK_THROWS_AS(meta_train(tasks(), test::tiny_grid(), cfg), ValidationError);
}

TEST_CASE("forward anchor selection") {
  const auto models = build_model_set(test::tiny_grid());
  ScoreTable cache;
  const auto perf = compute_performance_matrix(tasks(), models, 1, &cache, 1);
  cache.build_taus(1);
  AnchorSearchConfig cfg;
  cfg.screening = {20, 2, 0.1, 10, 1.0, 0};
  cfg.model_sample = 0;
  cfg.candidate_sample = 0;

  SUBCASE("one anchor minimizes the screening MSE") {
    cfg.max_anchors = 1;
    const auto sel = forward_select_anchors(perf, cache, cfg);
    REQUIRE(sel.anchors.size() == 1);
    std::size_t best = 0;
    double best_mse = 0.0;
    for (std::size_t c = 0; c < models.size(); ++c) {
      const std::vector<std::size_t> a{c};
      const auto f = task_cv_mse(compute_all_ipms(cache, a), perf, cfg.screening, cfg.k_folds);
      const double v = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
      if (c == 0 || v < best_mse) best = c, best_mse = v;
    }
    CHECK(sel.anchors[0] == best);
    CHECK(sel.mse_history[0] == doctest::Approx(best_mse).epsilon(1e-12));
  }

  SUBCASE("accepted steps never raise the MSE") {
    cfg.max_anchors = 5;
    const auto sel = forward_select_anchors(perf, cache, cfg);
    CHECK(sel.mse_history.size() == sel.anchors.size());
    for (std::size_t k = 1; k < sel.mse_history.size(); ++k)
      CHECK(sel.mse_history[k] <= sel.mse_history[k - 1]);
    std::vector<std::size_t> sorted = sel.anchors;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  }

  SUBCASE("duplicate score columns stop the search early") {
    // Three model slots sharing one score vector and one performance column.
    auto dup = cache;
    PerformanceMatrix p = perf;
    const std::vector<ModelId> ids{models[0], models[1], models[2]};
    p.model_set = ModelSet(ids);
    p.values = Matrix(perf.tasks(), 3);
    for (std::size_t i = 0; i < perf.tasks(); ++i) {
      dup.scores[i] = {cache.scores[i][0], cache.scores[i][0], cache.scores[i][0]};
      for (std::size_t j = 0; j < 3; ++j) p.values(i, j) = perf.values(i, 0);
    }
    dup.taus.clear();
    dup.build_taus(1);
    cfg.max_anchors = 3;
    const auto sel = forward_select_anchors(p, dup, cfg);
    CHECK(sel.anchors == std::vector<std::size_t>{0});
  }

  cfg.max_anchors = 0;
  CHECK_THROWS_AS(forward_select_anchors(perf, cache, cfg), ValidationError);
}

TEST_CASE("anchor IPMs exclude the anchor itself") {
  const auto models = build_model_set(test::tiny_grid());
  ScoreTable cache;
  const std::vector<Dataset> one(tasks().begin(), tasks().begin() + 1);
  compute_performance_matrix(one, models, 1, &cache, 1);
  cache.build_taus(1);
  const std::vector<std::size_t> anchors{2, 5};
  const auto ipms = compute_all_ipms(cache, anchors);
  const AnchorContext rest({cache.scores[0][5]});
  CHECK(ipms[0][2].mc == doctest::Approx(rest.compute(cache.scores[0][2]).mc).epsilon(1e-12));
  const AnchorContext both({cache.scores[0][2], cache.scores[0][5]});
  const auto direct = both.compute(cache.scores[0][7]);
  CHECK(ipms[0][7].mc == doctest::Approx(direct.mc).epsilon(1e-12));
  CHECK(ipms[0][7].select == doctest::Approx(direct.select).epsilon(1e-12));
  CHECK(ipms[0][7].hits == doctest::Approx(direct.hits).epsilon(1e-12));
  // A lone anchor has nothing to compare against.
  const std::vector<std::size_t> lone{4};
  CHECK(compute_all_ipms(cache, lone)[0][4] == IpmVector{});
}

TEST_CASE("bundle round trip, determinism and corruption") {
  const auto ml = meta_train(tasks(), test::tiny_grid(), test::fast_config());
  const auto again = meta_train(tasks(), test::tiny_grid(), test::fast_config());
  const auto a = test::temp_dir("bundle_a"), b = test::temp_dir("bundle_b"), c = test::temp_dir("bundle_c");
  save_meta_learner(ml, a);
  save_meta_learner(again, b);
  CHECK(dir_bytes(a) == dir_bytes(b));
  for (const char* f : {"manifest.json", "P.csv", "ipms.csv", "predictor.json"}) CHECK(fs::exists(a / f));

  const auto loaded = load_meta_learner(a);
  save_meta_learner(loaded, c);
  CHECK(dir_bytes(a) == dir_bytes(c));
  CHECK(loaded.anchors == ml.anchors);
  CHECK(loaded.predictor == ml.predictor);
  CHECK(loaded.performance.values == ml.performance.values);
  CHECK(loaded.ipms == ml.ipms);

  SUBCASE("corrupted P.csv") {
    auto text = read_file(c / "P.csv");
    auto pos = text.find('.', text.find('\n'));
    text[pos + 1] = text[pos + 1] == '1' ? '2' : '1';
    write_file(c / "P.csv", text);
    try {
      load_meta_learner(c);
      FAIL("expected a checksum error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("P.csv") != std::string::npos);
    }
  }
  SUBCASE("newer format version") {
    auto manifest = nlohmann::json::parse(read_file(c / "manifest.json"));
    manifest["format_version"] = MetaLearner::kFormatVersion + 1;
    write_file(c / "manifest.json", manifest.dump(2));
    try {
      load_meta_learner(c);
      FAIL("expected a version error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("unsupported bundle format_version 2") != std::string::npos);
    }
  }
  SUBCASE("edited manifest") {
    auto manifest = nlohmann::json::parse(read_file(c / "manifest.json"));
    manifest["hyperparams"]["budget"] = 49;
    write_file(c / "manifest.json", manifest.dump(2) + "\n");
    try {
      load_meta_learner(c);
      FAIL("expected a checksum error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("manifest.json") != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    fs::remove(c / "ipms.csv");
    CHECK_THROWS_AS(load_meta_learner(c), Error);
  }
}

TEST_CASE("score cache dump") {
  const auto models = build_model_set(test::tiny_grid());
  ScoreTable cache;
  const std::vector<Dataset> one(tasks().begin(), tasks().begin() + 1);
  compute_performance_matrix(one, models, 1, &cache, 1);
  const auto dir = test::temp_dir("score_dump");
  save_score_cache(cache, models, dir);
  CHECK(fs::exists(dir / "scores" / one[0].id / "0.csv"));
}
