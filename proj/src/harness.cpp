#include "elect/harness.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "elect/detectors.hpp"
#include "elect/parallel.hpp"
#include "elect/rng.hpp"
#include "elect/similarity.hpp"

namespace elect {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean_field(const std::vector<DatasetResult>& rows, double DatasetResult::*field) {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.*field;
  return s / static_cast<double>(rows.size());
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Elect: return "elect";
    case Method::ElectGreedy: return "elect_greedy";
    case Method::ElectSum: return "elect_sum";
    case Method::ElectRandomInit: return "elect_random_init";
    case Method::FixedModel: return "fixed_model";
    case Method::GlobalBest: return "global_best";
    case Method::Random: return "random";
    case Method::MegaEnsemble: return "mega_ensemble";
    case Method::IpmMc: return "ipm_mc";
    case Method::IpmSelect: return "ipm_select";
    case Method::IpmHits: return "ipm_hits";
  }
  return "elect";
}

Method parse_method(std::string_view name) {
  for (auto m : kAllMethods)
    if (method_name(m) == name) return m;
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_method_list(std::string_view list) {
  if (list == "all") return {std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    auto item = list.substr(start, comma == std::string_view::npos ? list.size() - start : comma - start);
    if (!item.empty()) {
      const auto m = parse_method(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ValidationError("empty method list");
  return out;
}

bool is_elect_variant(Method m) {
  return m == Method::Elect || m == Method::ElectGreedy || m == Method::ElectSum ||
         m == Method::ElectRandomInit;
}

double MethodResult::mean_ap_rank() const { return mean_field(rows, &DatasetResult::ap_rank); }
double MethodResult::mean_ap() const { return mean_field(rows, &DatasetResult::ap); }
double MethodResult::mean_seconds() const { return mean_field(rows, &DatasetResult::seconds); }
double MethodResult::mean_models_fitted() const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += static_cast<double>(r.models_fitted);
  return s / static_cast<double>(rows.size());
}

LoocvContext prepare_loocv(std::vector<Dataset> datasets, const GridSpec& grid,
                           const HarnessConfig& config) {
  if (datasets.size() < config.meta.hyperparams.t + 2)
    throw ValidationError("LOOCV needs at least t + 2 = " +
                          std::to_string(config.meta.hyperparams.t + 2) + " datasets, got " +
                          std::to_string(datasets.size()));
  for (std::size_t i = 0; i < datasets.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (datasets[i].id == datasets[k].id)
        throw ValidationError("duplicate dataset id '" + datasets[i].id + "'");
  LoocvContext ctx;
  ctx.grid = grid;
  ctx.models = build_model_set(grid);
  ctx.datasets = std::move(datasets);
  ctx.performance = compute_performance_matrix(ctx.datasets, ctx.models, config.meta.trials,
                                               &ctx.cache, config.meta.jobs);
  ctx.cache.build_taus(config.meta.jobs);
  return ctx;
}

std::vector<Fold> train_folds(const LoocvContext& ctx, const HarnessConfig& config) {
  const std::size_t n = ctx.datasets.size();
  std::vector<Fold> folds(n);
  auto inner = config.meta;
  inner.jobs = 1;
  parallel_for(n, config.meta.jobs, [&](std::size_t h) {
    const auto start = Clock::now();
    Fold f;
    f.held_out = h;
    for (std::size_t i = 0; i < n; ++i)
      if (i != h) f.train.push_back(i);
    f.learner = meta_train_from_cache(ctx.grid, ctx.performance.select_rows(f.train),
                                      ctx.cache.select_rows(f.train), inner);
    f.train_seconds = seconds_since(start);
    folds[h] = std::move(f);
  });
  return folds;
}

DatasetResult run_method(const LoocvContext& ctx, const Fold& fold, Method method,
                         const HarnessConfig& config, SelectionTrace* trace) {
  const std::size_t h = fold.held_out;
  const std::size_t m = ctx.models.size();
  const auto& test_id = ctx.datasets[h].id;
  const auto ap_all = ctx.performance.row(h);
  const auto& scores = ctx.cache.scores[h];
  const auto& ml = fold.learner;
  const auto start = Clock::now();

  DatasetResult res;
  res.dataset_id = test_id;
  std::optional<std::size_t> chosen;

  auto all_ipms = [&]() {
    std::vector<std::vector<double>> rows;
    for (auto a : ml.anchors) rows.push_back(scores[a]);
    const AnchorContext actx(std::move(rows));
    std::vector<IpmVector> out(m);
    for (std::size_t j = 0; j < m; ++j) {
      std::optional<std::size_t> slot;
      std::vector<double> taus;
      for (std::size_t a = 0; a < ml.anchors.size(); ++a) {
        if (ml.anchors[a] == j) slot = a;
        taus.push_back(ctx.cache.taus[h](j, ml.anchors[a]));
      }
      out[j] = actx.compute(scores[j], slot, std::span<const double>(taus));
    }
    return out;
  };

  switch (method) {
    case Method::Elect:
    case Method::ElectGreedy:
    case Method::ElectSum:
    case Method::ElectRandomInit: {
      SelectOptions opt;
      opt.acquisition = method == Method::ElectGreedy ? AcquisitionKind::Greedy
                        : method == Method::ElectSum  ? AcquisitionKind::Sum
                                                      : AcquisitionKind::EI;
      opt.init = method == Method::ElectRandomInit ? InitKind::Random : config.init;
      opt.strict_coverage = config.strict_coverage;
      opt.seed = derive_seed(config.seed, "init/" + test_id);
      opt.analysis_ap = std::vector<double>(ap_all.begin(), ap_all.end());
      // analysis_ap only annotates the trace; no selection step reads it.
      auto sel = adaptive_select(
          test_id, [&](std::size_t j) { return scores[j]; }, ml, opt);
      chosen = sel.trace.selected();
      res.models_fitted = sel.trace.fitted.size();
      if (trace) *trace = std::move(sel.trace);
      break;
    }
    case Method::FixedModel: {
      const auto idx = ctx.models.index_of(parse_model_id(config.fixed_model));
      if (!idx) throw ValidationError("fixed model '" + config.fixed_model + "' is not in the grid");
      chosen = *idx;
      res.models_fitted = 1;
      break;
    }
    case Method::GlobalBest:
      chosen = argmax(ml.performance.column_means());
      res.models_fitted = 1;
      break;
    case Method::Random: {
      Rng rng(derive_seed(config.seed, "random/" + test_id));
      chosen = static_cast<std::size_t>(rng.below(m));
      res.models_fitted = 1;
      break;
    }
    case Method::MegaEnsemble: {
      std::vector<double> avg(scores[0].size(), 0.0);
      for (const auto& s : scores)
        for (std::size_t i = 0; i < s.size(); ++i) avg[i] += s[i];
      for (auto& v : avg) v /= static_cast<double>(m);
      res.selected = "ensemble";
      res.ap = average_precision(avg, *ctx.datasets[h].labels);
      res.ap_rank = virtual_rank(ap_all, res.ap);
      res.models_fitted = m;
      break;
    }
    case Method::IpmMc:
    case Method::IpmSelect:
    case Method::IpmHits: {
      const auto ipms = all_ipms();
      std::vector<double> v(m);
      for (std::size_t j = 0; j < m; ++j)
        v[j] = method == Method::IpmMc ? ipms[j].mc : method == Method::IpmSelect ? ipms[j].select : ipms[j].hits;
      chosen = argmax(v);
      res.models_fitted = m;
      break;
    }
  }
  if (chosen) {
    res.selected = ctx.models[*chosen].to_string();
    res.ap = ap_all[*chosen];
    res.ap_rank = ap_rank(ap_all, *chosen);
  }
  res.seconds = seconds_since(start);
  return res;
}

LoocvOutput loocv_evaluate(const LoocvContext& ctx, const std::vector<Fold>& folds,
                           const HarnessConfig& config, const std::vector<Method>& methods) {
  const std::size_t n = ctx.datasets.size();
  if (folds.size() != n) throw ValidationError("fold count does not match the dataset count");
  LoocvOutput out;
  for (auto method : methods) {
    MethodResult mr;
    mr.method = std::string(method_name(method));
    mr.rows.resize(n);
    std::vector<SelectionTrace> traces(n);
    const bool keep = is_elect_variant(method);
    parallel_for(n, config.meta.jobs, [&](std::size_t h) {
      mr.rows[h] = run_method(ctx, folds[h], method, config, keep ? &traces[h] : nullptr);
    });
    if (keep)
      for (std::size_t h = 0; h < n; ++h) out.traces[mr.method][ctx.datasets[h].id] = std::move(traces[h]);
    out.results.push_back(std::move(mr));
  }
  return out;
}

LoocvOutput loocv_evaluate(std::vector<Dataset> datasets, const GridSpec& grid,
                           const HarnessConfig& config, const std::vector<Method>& methods) {
  const auto ctx = prepare_loocv(std::move(datasets), grid, config);
  const auto folds = train_folds(ctx, config);
  return loocv_evaluate(ctx, folds, config, methods);
}

Comparison compare_methods(const MethodResult& a, const MethodResult& b) {
  if (a.rows.size() != b.rows.size())
    throw ValidationError("compare_methods: methods were evaluated on different datasets");
  Comparison c;
  c.method_a = a.method;
  c.method_b = b.method;
  c.n = a.rows.size();
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].dataset_id != b.rows[i].dataset_id)
      throw ValidationError("compare_methods: datasets are not paired");
    pairs.emplace_back(a.rows[i].ap_rank, b.rows[i].ap_rank);
    diffs.push_back(a.rows[i].ap_rank - b.rows[i].ap_rank);
  }
  if (!diffs.empty()) {
    std::sort(diffs.begin(), diffs.end());
    const std::size_t k = diffs.size();
    const double median = k % 2 ? diffs[k / 2] : 0.5 * (diffs[k / 2 - 1] + diffs[k / 2]);
    c.direction = (median > 0) - (median < 0);
  }
  const bool all_zero = std::all_of(pairs.begin(), pairs.end(),
                                    [](const auto& p) { return p.first == p.second; });
  if (all_zero) {
    c.verdict = "no difference";
    return c;
  }
  try {
    const auto w = wilcoxon_signed_rank(pairs);
    c.statistic = w.statistic;
    c.p_value = w.p_value;
    c.verdict = c.direction < 0 ? c.method_a + " better" : c.direction > 0 ? c.method_b + " better" : "tie";
  } catch (const ValidationError&) {
    c.verdict = "too few non-zero differences";
  }
  return c;
}

double ground_truth_neighbor_tau(const PerformanceMatrix& perf, const std::string& test_id,
                                 const std::vector<std::string>& neighbor_ids) {
  if (neighbor_ids.empty()) throw ValidationError("ground_truth_neighbor_tau: no neighbors");
  auto find = [&](const std::string& id) {
    for (std::size_t i = 0; i < perf.tasks(); ++i)
      if (perf.dataset_ids[i] == id) return i;
    throw ValidationError("unknown dataset '" + id + "'");
  };
  std::vector<std::size_t> all(perf.models());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto pairs = subset_pairs(all);
  const auto test = ground_truth_gaps(perf.row(find(test_id)), pairs);
  double s = 0.0;
  for (const auto& id : neighbor_ids)
    s += weighted_kendall_tau(test, ground_truth_gaps(perf.row(find(id)), pairs));
  return s / static_cast<double>(neighbor_ids.size());
}

}  // namespace elect
