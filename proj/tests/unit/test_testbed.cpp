#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "elect/testbed.hpp"
#include "helpers.hpp"

using namespace elect;

namespace {

Matrix unit_square(std::size_t r, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(r, 2);
  for (auto& v : x.data()) v = rng.uniform();
  return x;
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t f = 0; f < a.size(); ++f) s += (a[f] - b[f]) * (a[f] - b[f]);
  return std::sqrt(s);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

}  // namespace

TEST_CASE("global outliers stay in the padded box") {
  const auto x = unit_square(100, 1);
  const auto d = inject_outliers(x, {OutlierKind::Global, 0.1, 3}, "g");
  REQUIRE(d.rows() == 110);
  for (std::size_t i = 0; i < 100; ++i) CHECK((*d.labels)[i] == 0);
  for (std::size_t i = 100; i < 110; ++i) {
    CHECK((*d.labels)[i] == 1);
    for (std::size_t f = 0; f < 2; ++f) CHECK((d.x(i, f) >= -0.1 && d.x(i, f) <= 1.1));
  }
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t f = 0; f < 2; ++f) CHECK(d.x(i, f) == x(i, f));
}

TEST_CASE("local outliers lie outside the bulk of the inliers") {
  const auto x = test::random_matrix(300, 3, 2);
  const auto d = inject_outliers(x, {OutlierKind::Local, 0.05, 4}, "l");
  CHECK(d.rows() == 300 + 15);
  // Inliers are standard normal, so the Mahalanobis ball is close to the
  // Euclidean one around the origin; outliers must clear its inner part.
  std::vector<double> in_norms, out_norms;
  const std::vector<double> origin(3, 0.0);
  for (std::size_t i = 0; i < 300; ++i) in_norms.push_back(dist(d.x.row(i), origin));
  for (std::size_t i = 300; i < d.rows(); ++i) out_norms.push_back(dist(d.x.row(i), origin));
  CHECK(median(out_norms) > median(in_norms));
}

TEST_CASE("clustered outliers are tight relative to their offset") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = test::random_matrix(200, 4, seed);
    const auto d = inject_outliers(x, {OutlierKind::Clustered, 0.1, seed}, "c");
    std::vector<double> mu(4, 0.0);
    for (std::size_t i = 0; i < 200; ++i)
      for (std::size_t f = 0; f < 4; ++f) mu[f] += x(i, f) / 200.0;
    std::vector<double> intra, offset;
    for (std::size_t i = 200; i < d.rows(); ++i) {
      offset.push_back(dist(d.x.row(i), mu));
      for (std::size_t k = i + 1; k < d.rows(); ++k) intra.push_back(dist(d.x.row(i), d.x.row(k)));
    }
    CHECK(median(intra) < 0.5 * median(offset));
  }
}

TEST_CASE("injection is seeded and counts are exact") {
  const auto x = test::random_matrix(137, 2, 9);
  for (auto kind : kAllOutlierKinds) {
    const InjectionSpec spec{kind, 0.05, 21};
    const auto a = inject_outliers(x, spec, "a");
    CHECK(a == inject_outliers(x, spec, "a"));
    a.validate_for_evaluation();
    const auto k = injected_count(137, 0.05);
    CHECK(k == 7);
    std::size_t pos = 0;
    for (auto y : *a.labels) pos += y;
    CHECK(static_cast<double>(pos) / static_cast<double>(a.rows()) == 7.0 / 144.0);
    CHECK(inject_outliers(x, {kind, 0.05, 22}, "a") != a);
  }
}

TEST_CASE("injection preconditions") {
  CHECK_THROWS_AS(inject_outliers(test::random_matrix(40, 2, 1), {}, "few"), ValidationError);
  // 60 inliers at 5% gives 3 outliers, below the minimum of 5.
  CHECK_THROWS_AS(inject_outliers(test::random_matrix(60, 2, 1), {}, "small"), ValidationError);
  CHECK_THROWS_AS(inject_outliers(test::random_matrix(100, 2, 1), {OutlierKind::Global, 0.3, 0}, "r"),
                  ValidationError);
  CHECK_THROWS_AS(inject_outliers(test::random_matrix(100, 2, 1), {OutlierKind::Global, 0.0, 0}, "r"),
                  ValidationError);
  CHECK(parse_outlier_kind("clustered") == OutlierKind::Clustered);
  CHECK(outlier_kind_name(OutlierKind::Local) == "local");
  CHECK_THROWS_AS(parse_outlier_kind("weird"), ValidationError);
}

TEST_CASE("controlled testbed ids and lineage") {
  const auto mothers = synthetic_mothersets(2, 5);
  REQUIRE(mothers.size() == 2);
  CHECK(mothers[0].id == "synth_00");
  for (const auto& m : mothers) {
    CHECK((m.rows() >= 300 && m.rows() <= 500));
    CHECK((m.cols() >= 3 && m.cols() <= 8));
    CHECK_FALSE(m.labeled());
  }
  const auto tb = make_controlled_testbed(mothers, 5);
  REQUIRE(tb.size() == 6);
  CHECK(tb[0].id == "synth_00__global");
  CHECK(tb[1].id == "synth_00__local");
  CHECK(tb[2].id == "synth_00__clustered");
  CHECK(tb[5].id == "synth_01__clustered");
  for (const auto& d : tb) d.validate_for_evaluation();
  CHECK(make_controlled_testbed(mothers, 5) == tb);
  CHECK_THROWS_AS(make_controlled_testbed({mothers[0]}, 5), ValidationError);

  // Labeled mothersets contribute only their inliers.
  auto labeled = mothers;
  labeled[0].labels = std::vector<std::uint8_t>(labeled[0].rows(), 0);
  (*labeled[0].labels)[0] = 1;
  const auto lt = make_controlled_testbed(labeled, 5);
  CHECK(lt[0].rows() == (mothers[0].rows() - 1) + injected_count(mothers[0].rows() - 1, 0.05));
}

TEST_CASE("testbed manifest round trip") {
  const auto tb = make_controlled_testbed(synthetic_mothersets(2, 8), 8);
  const auto dir = test::temp_dir("testbed_manifest");
  std::vector<TestbedEntry> lineage;
  for (const auto& d : tb) {
    TestbedEntry e;
    const auto cut = d.id.find("__");
    e.motherset = d.id.substr(0, cut);
    e.injection = InjectionSpec{parse_outlier_kind(d.id.substr(cut + 2)), 0.05, derive_seed(8, d.id)};
    lineage.push_back(e);
  }
  const auto manifest = save_testbed(tb, dir, lineage);
  CHECK(manifest.datasets.size() == 6);
  const auto loaded = load_manifest_datasets(dir / "manifest.json");
  CHECK(loaded == tb);
  const auto again = read_manifest(dir / "manifest.json");
  REQUIRE(again.datasets.size() == 6);
  CHECK(again.datasets[1].motherset == "synth_00");
  REQUIRE(again.datasets[1].injection);
  CHECK(again.datasets[1].injection->kind == OutlierKind::Local);
  write_manifest(again, dir / "copy.json");
  CHECK(read_file(dir / "copy.json") == read_file(dir / "manifest.json"));
}
