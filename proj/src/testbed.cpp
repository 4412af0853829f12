#include "elect/testbed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "elect/rng.hpp"

namespace elect {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view outlier_kind_name(OutlierKind k) {
  switch (k) {
    case OutlierKind::Global: return "global";
    case OutlierKind::Local: return "local";
    case OutlierKind::Clustered: return "clustered";
  }
  return "global";
}

OutlierKind parse_outlier_kind(std::string_view name) {
  for (auto k : kAllOutlierKinds)
    if (outlier_kind_name(k) == name) return k;
  throw ValidationError("unknown outlier kind '" + std::string(name) + "'");
}

std::size_t injected_count(std::size_t inliers, double rate) {
  return static_cast<std::size_t>(std::ceil(rate * static_cast<double>(inliers) - 1e-12));
}

namespace {

// Mean, Cholesky factor of the (slightly regularized) sample covariance, and
// the rejection radius.
struct GaussianFit {
  Eigen::VectorXd mu;
  Eigen::MatrixXd chol;
  double radius = 0.0;

  double mahalanobis(const Eigen::VectorXd& x) const {
    return chol.triangularView<Eigen::Lower>().solve(x - mu).norm();
  }
  Eigen::VectorXd draw(Rng& rng, const Eigen::VectorXd& center, double scale) const {
    Eigen::VectorXd z(mu.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal();
    return center + std::sqrt(scale) * (chol * z);
  }
};

GaussianFit fit_gaussian(const Matrix& x) {
  const auto r = static_cast<Eigen::Index>(x.rows()), d = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd m(r, d);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  GaussianFit g;
  g.mu = m.colwise().mean().transpose();
  const Eigen::MatrixXd c = m.rowwise() - g.mu.transpose();
  Eigen::MatrixXd cov = (c.transpose() * c) / static_cast<double>(r - 1);
  const double ridge = 1e-9 * std::max(cov.trace() / static_cast<double>(d), 1e-12);
  cov.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw ValidationError("inject_outliers: covariance is not positive definite");
  g.chol = llt.matrixL();
  std::vector<double> dist(static_cast<std::size_t>(r));
  for (Eigen::Index i = 0; i < r; ++i) dist[static_cast<std::size_t>(i)] = g.mahalanobis(m.row(i).transpose());
  std::sort(dist.begin(), dist.end());
  // Linear-interpolated empirical quantile.
  const double pos = kRejectionQuantile * static_cast<double>(dist.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  g.radius = lo + 1 < dist.size() ? dist[lo] + frac * (dist[lo + 1] - dist[lo]) : dist[lo];
  return g;
}

Eigen::VectorXd draw_outside(const GaussianFit& g, Rng& rng, std::size_t& attempts) {
  while (attempts < kMaxRejectionAttempts) {
    ++attempts;
    auto p = g.draw(rng, g.mu, kCovarianceInflation);
    if (g.mahalanobis(p) > g.radius) return p;
  }
  throw Error("inject_outliers: rejection sampling exhausted after " +
              std::to_string(kMaxRejectionAttempts) + " attempts");
}

}  // namespace

Dataset inject_outliers(const Matrix& inliers, const InjectionSpec& spec, const std::string& id) {
  if (!(spec.rate > 0.0 && spec.rate <= 0.2))
    throw ValidationError("inject_outliers: rate must lie in (0, 0.2]");
  const std::size_t r = inliers.rows(), d = inliers.cols();
  if (r < kMinInliers)
    throw ValidationError("inject_outliers: need at least " + std::to_string(kMinInliers) +
                          " inliers, got " + std::to_string(r));
  if (d == 0) throw ValidationError("inject_outliers: no features");
  const std::size_t q = injected_count(r, spec.rate);
  if (q < kMinInjected)
    throw ValidationError("inject_outliers: rate yields fewer than " + std::to_string(kMinInjected) +
                          " outliers");

  Rng rng(spec.seed);
  std::vector<double> out;
  out.reserve(q * d);
  if (spec.kind == OutlierKind::Global) {
    std::vector<double> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = hi[j] = inliers(0, j);
      for (std::size_t i = 1; i < r; ++i) {
        lo[j] = std::min(lo[j], inliers(i, j));
        hi[j] = std::max(hi[j], inliers(i, j));
      }
      const double pad = 0.1 * (hi[j] - lo[j]);
      lo[j] -= pad;
      hi[j] += pad;
    }
    for (std::size_t k = 0; k < q; ++k)
      for (std::size_t j = 0; j < d; ++j) out.push_back(rng.uniform(lo[j], hi[j]));
  } else {
    const auto g = fit_gaussian(inliers);
    std::size_t attempts = 0;
    if (spec.kind == OutlierKind::Local) {
      for (std::size_t k = 0; k < q; ++k) {
        const auto p = draw_outside(g, rng, attempts);
        out.insert(out.end(), p.data(), p.data() + p.size());
      }
    } else {
      const auto center = draw_outside(g, rng, attempts);
      for (std::size_t k = 0; k < q; ++k) {
        const auto p = g.draw(rng, center, kClusterShrink);
        out.insert(out.end(), p.data(), p.data() + p.size());
      }
    }
  }

  std::vector<double> values = inliers.data();
  values.insert(values.end(), out.begin(), out.end());
  std::vector<std::uint8_t> labels(r, 0);
  labels.resize(r + q, 1);
  Dataset ds{id, Matrix(r + q, d, std::move(values)), std::move(labels)};
  ds.validate_for_evaluation();
  return ds;
}

std::vector<Dataset> make_controlled_testbed(const std::vector<Dataset>& mothersets,
                                             std::uint64_t seed) {
  if (mothersets.size() < 2) throw ValidationError("controlled testbed needs at least 2 mothersets");
  std::vector<Dataset> out;
  for (const auto& mother : mothersets) {
    mother.validate();
    Matrix inliers = mother.x;
    if (mother.labels) {
      std::vector<double> kept;
      std::size_t rows = 0;
      for (std::size_t i = 0; i < mother.rows(); ++i) {
        if ((*mother.labels)[i]) continue;
        const auto row = mother.x.row(i);
        kept.insert(kept.end(), row.begin(), row.end());
        ++rows;
      }
      inliers = Matrix(rows, mother.cols(), std::move(kept));
    }
    for (auto kind : kAllOutlierKinds) {
      const std::string id = mother.id + "__" + std::string(outlier_kind_name(kind));
      out.push_back(inject_outliers(inliers, {kind, 0.05, derive_seed(seed, id)}, id));
    }
  }
  return out;
}

std::vector<Dataset> synthetic_mothersets(std::size_t count, std::uint64_t seed) {
  std::vector<Dataset> out;
  for (std::size_t s = 0; s < count; ++s) {
    char id[32];
    std::snprintf(id, sizeof id, "synth_%02zu", s);
    Rng rng(derive_seed(seed, std::string_view(id)));
    const std::size_t d = 3 + rng.below(6);
    const std::size_t r = 300 + rng.below(201);
    const std::size_t clusters = 2 + rng.below(3);
    std::vector<Eigen::VectorXd> centers;
    std::vector<Eigen::MatrixXd> factors;
    std::vector<double> weights;
    for (std::size_t c = 0; c < clusters; ++c) {
      Eigen::VectorXd mu(static_cast<Eigen::Index>(d));
      for (std::size_t j = 0; j < d; ++j) mu[static_cast<Eigen::Index>(j)] = rng.uniform(-6.0, 6.0);
      const double scale = rng.uniform(0.3, 1.5);
      Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) += 0.3 * rng.normal();
      centers.push_back(mu);
      factors.push_back(scale * a);
      weights.push_back(rng.uniform(0.5, 1.5));
    }
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> values;
    values.reserve(r * d);
    for (std::size_t i = 0; i < r; ++i) {
      double u = rng.uniform() * total;
      std::size_t c = 0;
      while (c + 1 < clusters && u >= weights[c]) u -= weights[c++];
      Eigen::VectorXd z(static_cast<Eigen::Index>(d));
      for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal();
      const Eigen::VectorXd p = centers[c] + factors[c] * z;
      values.insert(values.end(), p.data(), p.data() + p.size());
    }
    out.push_back(Dataset{id, Matrix(r, d, std::move(values)), std::nullopt});
  }
  return out;
}

TestbedManifest read_manifest(const fs::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string(), 0, 0, e.what());
  }
  TestbedManifest m;
  try {
    for (const auto& e : j.at("datasets")) {
      TestbedEntry t;
      t.path = e.at("path").get<std::string>();
      t.id = e.value("id", t.path.stem().string());
      t.labeled = e.value("labeled", true);
      t.motherset = e.value("motherset", std::string());
      if (e.contains("injection")) {
        const auto& s = e.at("injection");
        t.injection = InjectionSpec{parse_outlier_kind(s.at("kind").get<std::string>()),
                                    s.at("rate").get<double>(), s.at("seed").get<std::uint64_t>()};
      }
      m.datasets.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw ParseError(file.string(), 0, 0, e.what());
  }
  return m;
}

void write_manifest(const TestbedManifest& manifest, const fs::path& file) {
  json list = json::array();
  for (const auto& t : manifest.datasets) {
    json e{{"id", t.id}, {"path", t.path.generic_string()}, {"labeled", t.labeled}};
    if (!t.motherset.empty()) e["motherset"] = t.motherset;
    if (t.injection)
      e["injection"] = {{"kind", outlier_kind_name(t.injection->kind)},
                        {"rate", t.injection->rate},
                        {"seed", t.injection->seed}};
    list.push_back(std::move(e));
  }
  write_file(file, json{{"datasets", list}}.dump(2) + "\n");
}

std::vector<Dataset> load_manifest_datasets(const fs::path& file) {
  const auto manifest = read_manifest(file);
  const auto base = file.parent_path();
  std::vector<Dataset> out;
  for (const auto& t : manifest.datasets) {
    auto d = load_dataset(t.path.is_absolute() ? t.path : base / t.path, t.labeled);
    d.id = t.id;
    out.push_back(std::move(d));
  }
  return out;
}

TestbedManifest save_testbed(const std::vector<Dataset>& datasets, const fs::path& dir,
                             const std::vector<TestbedEntry>& lineage) {
  TestbedManifest m;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    TestbedEntry t = i < lineage.size() ? lineage[i] : TestbedEntry{};
    t.id = datasets[i].id;
    t.path = datasets[i].id + ".csv";
    t.labeled = datasets[i].labeled();
    save_dataset(datasets[i], dir / t.path);
    m.datasets.push_back(std::move(t));
  }
  write_manifest(m, dir / "manifest.json");
  return m;
}

}  // namespace elect
