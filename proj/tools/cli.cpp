#include "cli.hpp"

#include <CLI11.hpp>
#include <iostream>

#include "elect/config.hpp"
#include "elect/harness.hpp"
#include "elect/meta_train.hpp"
#include "elect/report.hpp"
#include "elect/rng.hpp"
#include "elect/select.hpp"
#include "elect/testbed.hpp"

namespace elect::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::size_t jobs = 0;

  std::string mothersets, out, tasks, config, bundle, data, trace, trace_csv, testbed, methods = "all",
                                                                                   in;
  std::optional<std::uint64_t> seed;
  std::size_t count = 8;
  std::optional<std::size_t> budget, patience;
  std::string acquisition = "ei", init = "coverage", coverage = "strict";
  bool labeled = false;
};

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_config(path);
}

int do_synth(const Options& o, std::ostream& out) {
  const auto seed = resolve_seed(o.seed);
  const auto sets = synthetic_mothersets(o.count, seed);
  save_testbed(sets, o.out);
  out << "wrote " << sets.size() << " mothersets to " << (fs::path(o.out) / "manifest.json").string() << "\n";
  return kExitOk;
}

int do_inject(const Options& o, std::ostream& out) {
  const auto seed = resolve_seed(o.seed);
  const auto mothers = load_manifest_datasets(o.mothersets);
  const auto datasets = make_controlled_testbed(mothers, seed);
  std::vector<TestbedEntry> lineage;
  for (const auto& d : datasets) {
    const auto cut = d.id.rfind("__");
    TestbedEntry e;
    e.motherset = d.id.substr(0, cut);
    e.injection = InjectionSpec{parse_outlier_kind(d.id.substr(cut + 2)), 0.05, derive_seed(seed, d.id)};
    lineage.push_back(std::move(e));
  }
  save_testbed(datasets, o.out, lineage);
  out << "wrote " << datasets.size() << " datasets to " << (fs::path(o.out) / "manifest.json").string() << "\n";
  return kExitOk;
}

int do_meta_train(const Options& o, std::ostream& out) {
  auto cfg = config_or_default(o.config);
  cfg.harness.meta.jobs = o.jobs;
  const auto tasks = load_manifest_datasets(o.tasks);
  const auto ml = meta_train(tasks, cfg.grid, cfg.harness.meta);
  save_meta_learner(ml, o.out);
  out << "meta-trained on " << tasks.size() << " tasks, " << ml.model_set.size() << " models, anchors:";
  for (const auto& a : ml.anchor_models()) out << " " << a.to_string();
  out << "\n";
  return kExitOk;
}

int do_select(const Options& o, std::ostream& out) {
  const auto ml = load_meta_learner(o.bundle);
  const auto data = strip_labels(load_dataset(o.data, o.labeled));
  SelectOptions opt;
  opt.budget = o.budget;
  opt.patience = o.patience;
  opt.acquisition = parse_acquisition(o.acquisition);
  opt.init = o.init == "random" ? InitKind::Random : InitKind::Coverage;
  opt.strict_coverage = o.coverage == "strict";
  opt.seed = resolve_seed(o.seed);
  const auto result = adaptive_select(data, ml, opt);
  if (!o.trace.empty()) write_file(o.trace, trace_to_json(result.trace));
  if (!o.trace_csv.empty()) write_file(o.trace_csv, trace_to_csv(result.trace));
  out << result.model.to_string() << "\n";
  return kExitOk;
}

int do_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  auto cfg = config_or_default(o.config);
  cfg.harness.meta.jobs = o.jobs;
  cfg.harness.seed = resolve_seed(o.seed ? o.seed : cfg.seed);
  const auto methods = parse_method_list(o.methods);
  auto datasets = load_manifest_datasets(o.testbed);
  err << "scoring " << datasets.size() << " datasets\n";
  const auto ctx = prepare_loocv(std::move(datasets), cfg.grid, cfg.harness);
  err << "training " << ctx.datasets.size() << " folds\n";
  const auto folds = train_folds(ctx, cfg.harness);
  const auto output = loocv_evaluate(ctx, folds, cfg.harness, methods);
  emit_report(output, o.out);
  out << summary_csv(output.results);
  return kExitOk;
}

int do_report(const Options& o, std::ostream& out) {
  rerender_report(o.in);
  out << read_file(fs::path(o.in) / "summary.csv");
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Unsupervised outlier model selection by performance-driven task similarity", "elect"};
  app.require_subcommand(1);
  app.add_option("--jobs", o.jobs, "Worker threads (0 = available parallelism)");

  auto* synth = app.add_subcommand("synth", "Generate synthetic Gaussian-mixture mothersets");
  synth->add_option("--count", o.count, "Number of mothersets")->capture_default_str();
  synth->add_option("--out", o.out, "Output directory")->required();
  synth->add_option("--seed", o.seed, "Random seed (default: ELECT_SEED, then 0)");

  auto* inject = app.add_subcommand("inject", "Build a controlled testbed by outlier injection");
  inject->add_option("--mothersets", o.mothersets, "Motherset manifest JSON")->required()->check(CLI::ExistingFile);
  inject->add_option("--out", o.out, "Output directory")->required();
  inject->add_option("--seed", o.seed, "Random seed (default: ELECT_SEED, then 0)");

  auto* train = app.add_subcommand("meta-train", "Run the offline phase and write a bundle");
  train->add_option("--tasks", o.tasks, "Labeled task manifest JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--config", o.config, "Run configuration JSON")->check(CLI::ExistingFile);
  train->add_option("--out", o.out, "Bundle directory")->required();

  auto* select = app.add_subcommand("select", "Select a model for an unlabeled dataset");
  select->add_option("--bundle", o.bundle, "Bundle directory")->required()->check(CLI::ExistingDirectory);
  select->add_option("--data", o.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  select->add_flag("--labeled", o.labeled, "The CSV has a trailing label column, which is dropped");
  select->add_option("--budget", o.budget, "Maximum iterations (default: bundle setting)")->check(CLI::PositiveNumber);
  select->add_option("--patience", o.patience, "Stop after this many iterations with unchanged neighbors")
      ->check(CLI::PositiveNumber);
  select->add_option("--acquisition", o.acquisition, "Acquisition: ei, sum or greedy")
      ->check(CLI::IsMember({"ei", "sum", "greedy"}))
      ->capture_default_str();
  select->add_option("--init", o.init, "Initial subset: coverage or random")
      ->check(CLI::IsMember({"coverage", "random"}))
      ->capture_default_str();
  select->add_option("--coverage", o.coverage, "Coverage rule: strict or loose")
      ->check(CLI::IsMember({"strict", "loose"}))
      ->capture_default_str();
  select->add_option("--seed", o.seed, "Seed for random init (default: ELECT_SEED, then 0)");
  select->add_option("--trace", o.trace, "Write the selection trace as JSON");
  select->add_option("--trace-csv", o.trace_csv, "Write the selection trace as CSV");

  auto* evaluate = app.add_subcommand("evaluate", "Leave-one-out evaluation over a testbed");
  evaluate->add_option("--testbed", o.testbed, "Testbed manifest JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--methods", o.methods,
                       "Comma-separated methods or 'all': elect, elect_greedy, elect_sum, "
                       "elect_random_init, fixed_model, global_best, random, mega_ensemble, "
                       "ipm_mc, ipm_select, ipm_hits")
      ->capture_default_str();
  evaluate->add_option("--config", o.config, "Run configuration JSON")->check(CLI::ExistingFile);
  evaluate->add_option("--seed", o.seed, "Random seed (default: config, ELECT_SEED, then 0)");
  evaluate->add_option("--out", o.out, "Report directory")->required();

  auto* report = app.add_subcommand("report", "Re-render summary.csv and pairs.csv from results.csv");
  report->add_option("--in", o.in, "Report directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth) return do_synth(o, out);
    if (*inject) return do_inject(o, out);
    if (*train) return do_meta_train(o, out);
    if (*select) return do_select(o, out);
    if (*evaluate) return do_evaluate(o, out, err);
    if (*report) return do_report(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace elect::cli
