#include "elect/model_id.hpp"

#include <charconv>
#include <cmath>

#include "elect/core.hpp"

namespace elect {

namespace {

struct FamilyDecl {
  Family family;
  const char* name;
  std::vector<std::string> params;
};

const std::vector<FamilyDecl>& declarations() {
  static const std::vector<FamilyDecl> decls = {
      {Family::Knn, "knn", {"k", "agg"}},
      {Family::Lof, "lof", {"k", "metric"}},
      {Family::IForest, "iforest", {"n_trees", "subsample", "seed"}},
      {Family::Hbos, "hbos", {"n_bins"}},
      {Family::PcaRecon, "pca", {"var_fraction"}},
  };
  return decls;
}

const FamilyDecl& decl(Family f) {
  for (const auto& d : declarations())
    if (d.family == f) return d;
  throw ValidationError("unknown detector family");
}

[[noreturn]] void bad(const ModelId& m, const std::string& what) {
  throw ValidationError("invalid " + std::string(family_name(m.family)) + " model: " + what);
}

std::int64_t require_int(const ModelId& m, const std::string& name, std::int64_t min) {
  const auto& v = m.param(name);
  if (!std::holds_alternative<std::int64_t>(v)) bad(m, name + " must be an integer");
  auto i = std::get<std::int64_t>(v);
  if (i < min) bad(m, name + " must be >= " + std::to_string(min));
  return i;
}

void require_choice(const ModelId& m, const std::string& name,
                    std::initializer_list<std::string_view> allowed) {
  const auto& v = m.param(name);
  if (!std::holds_alternative<std::string>(v)) bad(m, name + " must be a string");
  for (auto a : allowed)
    if (std::get<std::string>(v) == a) return;
  bad(m, name + " has unsupported value '" + std::get<std::string>(v) + "'");
}

ParamValue parse_value(std::string_view text) {
  if (text.empty()) throw ValidationError("empty hyperparameter value");
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (ec == std::errc() && p == text.data() + text.size()) return i;
  double d = 0.0;
  auto [p2, ec2] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ec2 == std::errc() && p2 == text.data() + text.size()) return d;
  return std::string(text);
}

}  // namespace

std::string_view family_name(Family f) { return decl(f).name; }

std::optional<Family> family_from_name(std::string_view name) {
  for (const auto& d : declarations())
    if (name == d.name) return d.family;
  return std::nullopt;
}

const std::vector<std::string>& family_params(Family f) { return decl(f).params; }

std::string format_param(const ParamValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&v)) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    std::string s(buf, p);
    // Keep reals distinguishable from integers in the canonical form.
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
  }
  return std::get<std::string>(v);
}

const ParamValue& ModelId::param(std::string_view name) const {
  for (const auto& [k, v] : hyperparams)
    if (k == name) return v;
  throw ValidationError(std::string(family_name(family)) + " model has no parameter '" +
                        std::string(name) + "'");
}

std::int64_t ModelId::int_param(std::string_view name) const {
  const auto& v = param(name);
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw ValidationError("parameter '" + std::string(name) + "' is not an integer");
}

double ModelId::real_param(std::string_view name) const {
  const auto& v = param(name);
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw ValidationError("parameter '" + std::string(name) + "' is not numeric");
}

const std::string& ModelId::text_param(std::string_view name) const {
  const auto& v = param(name);
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw ValidationError("parameter '" + std::string(name) + "' is not a string");
}

std::string ModelId::to_string() const {
  std::string s(family_name(family));
  s += '(';
  for (std::size_t i = 0; i < hyperparams.size(); ++i) {
    if (i) s += ',';
    s += hyperparams[i].first;
    s += '=';
    s += format_param(hyperparams[i].second);
  }
  s += ')';
  return s;
}

void validate_model(const ModelId& m) {
  const auto& names = family_params(m.family);
  if (m.hyperparams.size() != names.size())
    bad(m, "expected " + std::to_string(names.size()) + " hyperparameters");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (m.hyperparams[i].first != names[i]) bad(m, "expected parameter '" + names[i] + "'");
  switch (m.family) {
    case Family::Knn:
      require_int(m, "k", 1);
      require_choice(m, "agg", {"largest", "mean", "median"});
      break;
    case Family::Lof:
      require_int(m, "k", 1);
      require_choice(m, "metric", {"euclidean", "manhattan"});
      break;
    case Family::IForest:
      require_int(m, "n_trees", 1);
      require_int(m, "subsample", 2);
      require_int(m, "seed", 0);
      break;
    case Family::Hbos:
      require_int(m, "n_bins", 2);
      break;
    case Family::PcaRecon: {
      const auto& v = m.param("var_fraction");
      if (!std::holds_alternative<double>(v)) bad(m, "var_fraction must be real");
      double f = std::get<double>(v);
      if (!(f > 0.0 && f < 1.0)) bad(m, "var_fraction must lie in (0,1)");
      break;
    }
  }
}

ModelId parse_model_id(std::string_view text) {
  auto open = text.find('(');
  if (open == std::string_view::npos || text.empty() || text.back() != ')')
    throw ValidationError("malformed model id '" + std::string(text) + "'");
  auto fam = family_from_name(text.substr(0, open));
  if (!fam) throw ValidationError("unknown detector family in '" + std::string(text) + "'");
  ModelId m{*fam, {}};
  auto body = text.substr(open + 1, text.size() - open - 2);
  while (!body.empty()) {
    auto comma = body.find(',');
    auto item = body.substr(0, comma);
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("malformed hyperparameter in '" + std::string(text) + "'");
    m.hyperparams.emplace_back(std::string(item.substr(0, eq)), parse_value(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  validate_model(m);
  return m;
}

ModelSet::ModelSet(std::vector<ModelId> models) : models_(std::move(models)) {
  for (std::size_t j = 0; j < models_.size(); ++j) {
    validate_model(models_[j]);
    auto [it, inserted] = index_.emplace(models_[j].to_string(), j);
    if (!inserted) throw ValidationError("duplicate model " + models_[j].to_string());
  }
}

std::optional<std::size_t> ModelSet::index_of(const ModelId& m) const {
  auto it = index_.find(m.to_string());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace elect
