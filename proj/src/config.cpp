#include "elect/config.hpp"

#include <charconv>
#include <cstdlib>
#include <json.hpp>
#include <set>

namespace elect {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where,
                const std::string& source) {
  if (!j.is_object()) throw ParseError(source, 0, 0, where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ParseError(source, 0, 0, "unknown key '" + key + "' in " + where);
}

GbtParams gbt_params(const json& j, GbtParams p, const std::string& source) {
  check_keys(j, {"n_trees", "max_depth", "learning_rate", "min_leaf", "subsample", "seed"},
             "predictor settings", source);
  p.n_trees = j.value("n_trees", p.n_trees);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.min_leaf = j.value("min_leaf", p.min_leaf);
  p.subsample = j.value("subsample", p.subsample);
  p.seed = j.value("seed", p.seed);
  return p;
}

std::size_t positive(const json& j, const char* key, std::size_t fallback, const std::string& source) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<std::int64_t>();
  if (v < 1) throw ValidationError(source + ": " + key + " must be at least 1");
  return static_cast<std::size_t>(v);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, 0, e.what());
  }
  RunConfig c;
  try {
    check_keys(j,
               {"grid", "t", "init_size", "patience", "budget", "trials", "seed", "acquisition",
                "coverage", "init", "fixed_model", "cv_folds", "cv_model_sample", "anchor_search", "predictor_grid"},
               "config", source);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.grid = g.is_string() ? load_grid(base_dir / g.get<std::string>()) : parse_grid_json(g.dump());
    }
    auto& meta = c.harness.meta;
    auto& h = meta.hyperparams;
    h.t = positive(j, "t", h.t, source);
    h.init_size = positive(j, "init_size", h.init_size, source);
    h.patience = positive(j, "patience", h.patience, source);
    h.budget = positive(j, "budget", h.budget, source);
    meta.trials = static_cast<int>(positive(j, "trials", static_cast<std::size_t>(meta.trials), source));
    meta.cv_folds = positive(j, "cv_folds", meta.cv_folds, source);
    meta.cv_model_sample = j.value("cv_model_sample", meta.cv_model_sample);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("acquisition")) c.acquisition = parse_acquisition(j.at("acquisition").get<std::string>());
    if (j.contains("coverage")) {
      const auto s = j.at("coverage").get<std::string>();
      if (s != "strict" && s != "loose")
        throw ValidationError(source + ": coverage must be strict or loose");
      c.harness.strict_coverage = s == "strict";
    }
    if (j.contains("init")) {
      const auto s = j.at("init").get<std::string>();
      if (s != "coverage" && s != "random") throw ValidationError(source + ": init must be coverage or random");
      c.harness.init = s == "coverage" ? InitKind::Coverage : InitKind::Random;
    }
    if (j.contains("fixed_model")) {
      c.harness.fixed_model = j.at("fixed_model").get<std::string>();
      parse_model_id(c.harness.fixed_model);
    }
    if (j.contains("anchor_search")) {
      const auto& a = j.at("anchor_search");
      check_keys(a, {"max_anchors", "k_folds", "min_relative_improvement", "model_sample", "candidate_sample", "screening"},
                 "anchor_search", source);
      auto& s = meta.anchors;
      s.max_anchors = positive(a, "max_anchors", s.max_anchors, source);
      s.k_folds = positive(a, "k_folds", s.k_folds, source);
      s.min_relative_improvement = a.value("min_relative_improvement", s.min_relative_improvement);
      s.model_sample = a.value("model_sample", s.model_sample);
      s.candidate_sample = a.value("candidate_sample", s.candidate_sample);
      if (a.contains("screening")) s.screening = gbt_params(a.at("screening"), s.screening, source);
    }
    if (j.contains("predictor_grid")) {
      meta.predictor_grid.clear();
      for (const auto& p : j.at("predictor_grid")) meta.predictor_grid.push_back(gbt_params(p, GbtParams{}, source));
      if (meta.predictor_grid.empty()) throw ValidationError(source + ": predictor_grid is empty");
    }
  } catch (const json::exception& e) {
    throw ParseError(source, 0, 0, e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  return parse_config(read_file(file), file.parent_path(), file.string());
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  const char* env = std::getenv("ELECT_SEED");
  if (!env || !*env) return 0;
  std::uint64_t v = 0;
  const std::string_view s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ValidationError("ELECT_SEED must be a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

}  // namespace elect
