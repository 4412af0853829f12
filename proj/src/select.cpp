#include "elect/select.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numeric>

#include "elect/detectors.hpp"
#include "elect/metrics.hpp"
#include "elect/rng.hpp"

namespace elect {

using nlohmann::json;

std::string_view acquisition_name(AcquisitionKind k) {
  switch (k) {
    case AcquisitionKind::EI: return "ei";
    case AcquisitionKind::Sum: return "sum";
    case AcquisitionKind::Greedy: return "greedy";
  }
  return "ei";
}

AcquisitionKind parse_acquisition(std::string_view name) {
  if (name == "ei") return AcquisitionKind::EI;
  if (name == "sum") return AcquisitionKind::Sum;
  if (name == "greedy") return AcquisitionKind::Greedy;
  throw ValidationError("unknown acquisition '" + std::string(name) + "' (expected ei, sum or greedy)");
}

std::vector<std::size_t> coverage_init(const PerformanceMatrix& perf, std::size_t init_size,
                                       bool strict) {
  const std::size_t m = perf.models(), n = perf.tasks();
  if (init_size > m)
    throw ValidationError("coverage_init: init_size " + std::to_string(init_size) +
                          " exceeds model count " + std::to_string(m));
  std::vector<std::size_t> top(n), bottom(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = perf.row(i);
    top[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    bottom[i] = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
  }
  std::vector<char> chosen(m, 0);
  std::vector<std::size_t> out;
  auto covered = [&](std::size_t i) {
    return strict ? chosen[top[i]] && chosen[bottom[i]] : chosen[top[i]] || chosen[bottom[i]];
  };
  while (out.size() < init_size) {
    std::vector<std::size_t> count(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (covered(i)) continue;
      if (!chosen[top[i]]) ++count[top[i]];
      if (bottom[i] != top[i] && !chosen[bottom[i]]) ++count[bottom[i]];
    }
    const auto best = static_cast<std::size_t>(std::max_element(count.begin(), count.end()) - count.begin());
    if (count[best] == 0) break;
    chosen[best] = 1;
    out.push_back(best);
  }
  if (out.size() < init_size) {
    const auto means = perf.column_means();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
    for (auto j : order) {
      if (out.size() == init_size) break;
      if (!chosen[j]) {
        chosen[j] = 1;
        out.push_back(j);
      }
    }
  }
  return out;
}

std::vector<std::size_t> random_init(std::size_t m, std::size_t init_size, std::uint64_t seed) {
  if (init_size > m) throw ValidationError("random_init: init_size exceeds model count");
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < init_size; ++i) std::swap(perm[i], perm[i + rng.below(m - i)]);
  perm.resize(init_size);
  std::sort(perm.begin(), perm.end());
  return perm;
}

NeighborStats neighbor_stats(const PerformanceMatrix& perf, std::span<const std::size_t> neighbors,
                             std::size_t j) {
  if (neighbors.empty()) throw ValidationError("neighbor_stats: empty neighbor set");
  std::vector<double> v;
  v.reserve(neighbors.size());
  for (auto i : neighbors) v.push_back(perf.values(i, j));
  return {mean(v), population_stddev(v)};
}

double expected_improvement(double mu, double sigma, double mu_star) {
  if (!(sigma >= 0.0)) throw ValidationError("expected_improvement: negative sigma");
  if (sigma == 0.0) return 0.0;
  const double u = (mu - mu_star) / sigma;
  return sigma * (u * normal_cdf(u) + normal_pdf(u));
}

AcquisitionChoice acquisition(const PerformanceMatrix& perf, std::span<const std::size_t> neighbors,
                              std::span<const std::size_t> subset, AcquisitionKind kind) {
  const std::size_t m = perf.models();
  std::vector<char> in(m, 0);
  for (auto j : subset) in[j] = 1;
  double mu_star = -std::numeric_limits<double>::infinity();
  if (kind == AcquisitionKind::EI)
    for (auto h : subset) mu_star = std::max(mu_star, neighbor_stats(perf, neighbors, h).mu);
  std::optional<AcquisitionChoice> best;
  for (std::size_t j = 0; j < m; ++j) {
    if (in[j]) continue;
    const auto s = neighbor_stats(perf, neighbors, j);
    double v = 0.0;
    switch (kind) {
      case AcquisitionKind::EI: v = expected_improvement(s.mu, s.sigma, mu_star); break;
      case AcquisitionKind::Sum: v = s.sigma * s.sigma + s.mu; break;
      case AcquisitionKind::Greedy: v = s.mu; break;
    }
    if (!best || v > best->value) best = AcquisitionChoice{j, v};
  }
  if (!best) throw ValidationError("acquisition: the subset already contains every model");
  return *best;
}

std::size_t best_on_neighbors(const PerformanceMatrix& perf, std::span<const std::size_t> neighbors) {
  if (neighbors.empty()) throw ValidationError("best_on_neighbors: empty neighbor set");
  std::vector<double> sums(perf.models(), 0.0);
  for (auto i : neighbors)
    for (std::size_t j = 0; j < perf.models(); ++j) sums[j] += perf.values(i, j);
  return static_cast<std::size_t>(std::max_element(sums.begin(), sums.end()) - sums.begin());
}

SelectionResult adaptive_select(const UnlabeledDataset& test, const MetaLearner& ml,
                                const SelectOptions& options) {
  if (test.rows() < 2 || test.cols() < 1)
    throw ValidationError("dataset '" + test.id + "' needs at least 2 samples and 1 feature");
  for (double v : test.x.data())
    if (!std::isfinite(v)) throw ValidationError("dataset '" + test.id + "' contains a non-finite feature");
  return adaptive_select(
      test.id, [&](std::size_t j) { return fit_score(test, ml.model_set[j]).values; }, ml, options);
}

SelectionResult adaptive_select(const std::string& dataset_id, const ScoreProvider& scores,
                                const MetaLearner& ml, const SelectOptions& options) {
  const auto& perf = ml.performance;
  const std::size_t m = ml.model_set.size();
  const std::size_t budget = options.budget.value_or(ml.hyperparams.budget);
  const std::size_t patience = options.patience.value_or(ml.hyperparams.patience);
  const std::size_t t = std::min(ml.hyperparams.t, perf.tasks());
  if (budget < 1) throw ValidationError("budget must be at least 1");
  if (patience < 1) throw ValidationError("patience must be at least 1");
  if (options.analysis_ap && options.analysis_ap->size() != m)
    throw ValidationError("analysis AP vector does not match the model count");

  SelectionTrace trace;
  trace.dataset_id = dataset_id;
  trace.acquisition = std::string(acquisition_name(options.acquisition));
  for (const auto& model : ml.model_set) trace.models.push_back(model.to_string());
  trace.anchors = ml.anchors;

  std::vector<std::vector<double>> fitted(m);
  std::vector<char> have(m, 0);
  auto fit = [&](std::size_t j) {
    if (have[j]) return;
    fitted[j] = scores(j);
    have[j] = 1;
    trace.fitted.push_back(j);
  };
  for (auto a : ml.anchors) fit(a);
  std::vector<std::vector<double>> anchor_rows;
  for (auto a : ml.anchors) anchor_rows.push_back(fitted[a]);
  const AnchorContext ctx(std::move(anchor_rows));

  std::vector<IpmVector> ipm(m);
  std::vector<char> have_ipm(m, 0);
  auto add_model = [&](std::size_t j) {
    fit(j);
    std::optional<std::size_t> slot;
    for (std::size_t a = 0; a < ml.anchors.size(); ++a)
      if (ml.anchors[a] == j) slot = a;
    ipm[j] = compute_ipms(ctx, fitted[j], slot);
    have_ipm[j] = 1;
  };

  std::vector<std::size_t> subset =
      options.init == InitKind::Coverage
          ? coverage_init(perf, std::min(ml.hyperparams.init_size, m), options.strict_coverage)
          : random_init(m, std::min(ml.hyperparams.init_size, m), options.seed);
  for (auto j : subset) add_model(j);

  // Predicted gaps are cached per pair; gap(j, k) = -gap(k, j) by construction.
  Matrix gap(m, m, 0.0);
  std::vector<char> have_gap(m * m, 0);
  std::vector<double> taus(perf.tasks());
  std::vector<std::size_t> previous;
  std::size_t unchanged = 0;

  for (std::size_t iteration = 1;; ++iteration) {
    GapTable predicted;
    predicted.source = GapSource::Predicted;
    predicted.pairs = subset_pairs(subset);
    predicted.gaps.reserve(predicted.pairs.size());
    for (auto [a, b] : predicted.pairs) {
      if (!have_gap[a * m + b]) {
        gap(a, b) = predict_gap(ml.predictor, ipm[a], ipm[b]);
        have_gap[a * m + b] = 1;
      }
      predicted.gaps.push_back(gap(a, b));
    }
    for (std::size_t i = 0; i < perf.tasks(); ++i) taus[i] = tau_to_meta_task(predicted, perf.row(i));
    const auto nbrs = top_t_neighbors(taus, perf.dataset_ids, t);

    auto sorted = nbrs.indices;
    std::sort(sorted.begin(), sorted.end());
    unchanged = (iteration > 1 && sorted == previous) ? unchanged + 1 : 1;
    previous = std::move(sorted);

    TraceRecord rec;
    rec.iteration = iteration;
    rec.subset = subset;
    rec.neighbor_indices = nbrs.indices;
    rec.neighbor_ids = nbrs.dataset_ids;
    rec.neighbor_taus = nbrs.similarities;
    rec.selected = best_on_neighbors(perf, nbrs.indices);
    if (options.analysis_ap) rec.ap_rank = ap_rank(*options.analysis_ap, rec.selected);

    const bool stop = unchanged >= patience || iteration >= budget || subset.size() == m;
    if (!stop) {
      const auto choice = acquisition(perf, nbrs.indices, subset, options.acquisition);
      rec.added = choice.model;
      rec.acquisition_value = choice.value;
    }
    trace.records.push_back(std::move(rec));
    if (stop) break;
    const std::size_t j = *trace.records.back().added;
    subset.push_back(j);
    add_model(j);
  }
  return {ml.model_set[trace.selected()], std::move(trace)};
}

namespace {

json record_json(const TraceRecord& r, const SelectionTrace& trace) {
  json j{{"iteration", r.iteration},
         {"subset", r.subset},
         {"neighbors", r.neighbor_ids},
         {"neighbor_indices", r.neighbor_indices},
         {"tau_hat", r.neighbor_taus},
         {"selected", trace.models[r.selected]},
         {"selected_index", r.selected}};
  if (r.added) {
    j["added"] = trace.models[*r.added];
    j["added_index"] = *r.added;
    j["acquisition_value"] = r.acquisition_value;
  } else {
    j["added"] = nullptr;
  }
  if (r.ap_rank) j["ap_rank"] = *r.ap_rank;
  return j;
}

}  // namespace

std::string trace_to_json(const SelectionTrace& trace) {
  json records = json::array();
  for (const auto& r : trace.records) records.push_back(record_json(r, trace));
  json j{{"dataset_id", trace.dataset_id},
         {"acquisition", trace.acquisition},
         {"selected", trace.records.empty() ? json(nullptr) : json(trace.selected_model())},
         {"models", trace.models},
         {"anchors", trace.anchors},
         {"fitted", trace.fitted},
         {"models_fitted", trace.fitted.size()},
         {"records", records}};
  return j.dump(1) + "\n";
}

SelectionTrace trace_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("trace", 0, 0, e.what());
  }
  SelectionTrace t;
  t.dataset_id = j.at("dataset_id").get<std::string>();
  t.acquisition = j.at("acquisition").get<std::string>();
  t.models = j.at("models").get<std::vector<std::string>>();
  t.anchors = j.at("anchors").get<std::vector<std::size_t>>();
  t.fitted = j.at("fitted").get<std::vector<std::size_t>>();
  for (const auto& r : j.at("records")) {
    TraceRecord rec;
    rec.iteration = r.at("iteration").get<std::size_t>();
    rec.subset = r.at("subset").get<std::vector<std::size_t>>();
    rec.neighbor_ids = r.at("neighbors").get<std::vector<std::string>>();
    rec.neighbor_indices = r.at("neighbor_indices").get<std::vector<std::size_t>>();
    rec.neighbor_taus = r.at("tau_hat").get<std::vector<double>>();
    rec.selected = r.at("selected_index").get<std::size_t>();
    if (!r.at("added").is_null()) {
      rec.added = r.at("added_index").get<std::size_t>();
      rec.acquisition_value = r.at("acquisition_value").get<double>();
    }
    if (r.contains("ap_rank")) rec.ap_rank = r.at("ap_rank").get<double>();
    t.records.push_back(std::move(rec));
  }
  return t;
}

std::string trace_to_csv(const SelectionTrace& trace) {
  std::string out = "iteration,subset_size,neighbors,mean_tau_hat,selected,added,acquisition_value,ap_rank\n";
  for (const auto& r : trace.records) {
    std::string nb;
    for (std::size_t k = 0; k < r.neighbor_ids.size(); ++k) nb += (k ? ";" : "") + r.neighbor_ids[k];
    out += std::to_string(r.iteration) + "," + std::to_string(r.subset.size()) + "," + nb + "," +
           format_double(mean(r.neighbor_taus)) + ",\"" + trace.models[r.selected] + "\",";
    out += r.added ? "\"" + trace.models[*r.added] + "\"," + format_double(r.acquisition_value) : ",";
    out += ",";
    if (r.ap_rank) out += format_double(*r.ap_rank);
    out += "\n";
  }
  return out;
}

}  // namespace elect
