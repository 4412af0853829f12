#include "elect/grid.hpp"

#include <algorithm>

#include <json.hpp>

#include "elect/core.hpp"

namespace elect {

using nlohmann::json;

namespace {

ParamValue value_from_json(const json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw ValidationError("grid values must be numbers or strings");
}

json value_to_json(const ParamValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

ParamAxis axis(std::string name, std::vector<ParamValue> values) {
  return {std::move(name), std::move(values)};
}

}  // namespace

ModelSet build_model_set(const GridSpec& grid) {
  std::vector<ModelId> models;
  for (Family fam : kAllFamilies) {
    for (const auto& fg : grid.families) {
      if (fg.family != fam) continue;
      const auto& names = family_params(fam);
      if (fg.axes.size() != names.size())
        throw ValidationError("grid for " + std::string(family_name(fam)) + " must list " +
                              std::to_string(names.size()) + " parameters");
      for (const auto& a : fg.axes) {
        if (std::find(names.begin(), names.end(), a.name) == names.end())
          throw ValidationError("unknown parameter '" + a.name + "' for " +
                                std::string(family_name(fam)));
        if (a.values.empty())
          throw ValidationError("parameter '" + a.name + "' has no values");
      }
      std::size_t total = 1;
      for (const auto& a : fg.axes) total *= a.values.size();
      for (std::size_t flat = 0; flat < total; ++flat) {
        // Mixed-radix decode, last axis fastest.
        std::vector<std::size_t> pos(fg.axes.size());
        std::size_t rest = flat;
        for (std::size_t a = fg.axes.size(); a-- > 0;) {
          pos[a] = rest % fg.axes[a].values.size();
          rest /= fg.axes[a].values.size();
        }
        ModelId m{fam, {}};
        for (const auto& name : names) {
          for (std::size_t a = 0; a < fg.axes.size(); ++a)
            if (fg.axes[a].name == name) m.hyperparams.emplace_back(name, fg.axes[a].values[pos[a]]);
        }
        if (m.hyperparams.size() != names.size())
          throw ValidationError("grid for " + std::string(family_name(fam)) +
                                " repeats a parameter");
        validate_model(m);
        models.push_back(std::move(m));
      }
    }
  }
  if (models.empty()) throw ValidationError("model grid is empty");
  return ModelSet(std::move(models));
}

GridSpec default_grid() {
  using V = std::vector<ParamValue>;
  const V ks{std::int64_t{3}, std::int64_t{5}, std::int64_t{10}, std::int64_t{15},
             std::int64_t{20}, std::int64_t{25}, std::int64_t{50}};
  GridSpec g;
  g.families.push_back({Family::Knn, {axis("k", ks), axis("agg", V{"largest", "mean", "median"})}});
  g.families.push_back({Family::Lof, {axis("k", ks), axis("metric", V{"euclidean", "manhattan"})}});
  g.families.push_back(
      {Family::IForest,
       {axis("n_trees", V{std::int64_t{50}, std::int64_t{100}, std::int64_t{200}}),
        axis("subsample", V{std::int64_t{64}, std::int64_t{128}, std::int64_t{256}}),
        axis("seed", V{std::int64_t{1}, std::int64_t{2}})}});
  g.families.push_back({Family::Hbos,
                        {axis("n_bins", V{std::int64_t{5}, std::int64_t{10}, std::int64_t{20},
                                          std::int64_t{30}, std::int64_t{50}})}});
  g.families.push_back({Family::PcaRecon, {axis("var_fraction", V{0.5, 0.7, 0.9})}});
  return g;
}

GridSpec parse_grid_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("<grid>", 0, 0, e.what());
  }
  GridSpec g;
  if (!j.contains("families") || !j["families"].is_array())
    throw ValidationError("grid JSON needs a 'families' array");
  for (const auto& f : j["families"]) {
    auto fam = family_from_name(f.at("family").get<std::string>());
    if (!fam) throw ValidationError("unknown family '" + f.at("family").get<std::string>() + "'");
    FamilyGrid fg{*fam, {}};
    for (const auto& p : f.at("params")) {
      ParamAxis a{p.at("name").get<std::string>(), {}};
      for (const auto& v : p.at("values")) a.values.push_back(value_from_json(v));
      if (a.values.empty()) throw ValidationError("parameter '" + a.name + "' has no values");
      fg.axes.push_back(std::move(a));
    }
    g.families.push_back(std::move(fg));
  }
  return g;
}

GridSpec load_grid(const std::filesystem::path& path) { return parse_grid_json(read_file(path)); }

std::string grid_to_json(const GridSpec& grid) {
  json fams = json::array();
  for (const auto& fg : grid.families) {
    json params = json::array();
    for (const auto& a : fg.axes) {
      json vals = json::array();
      for (const auto& v : a.values) vals.push_back(value_to_json(v));
      params.push_back({{"name", a.name}, {"values", vals}});
    }
    fams.push_back({{"family", family_name(fg.family)}, {"params", params}});
  }
  return json{{"families", fams}}.dump(2) + "\n";
}

}  // namespace elect
