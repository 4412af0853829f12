#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace elect {

// Declared order is the canonical family order used when expanding grids.
enum class Family { Knn, Lof, IForest, Hbos, PcaRecon };

inline constexpr Family kAllFamilies[] = {Family::Knn, Family::Lof, Family::IForest,
                                          Family::Hbos, Family::PcaRecon};

std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);

using ParamValue = std::variant<std::int64_t, double, std::string>;

std::string format_param(const ParamValue& v);

/// A detector family plus one hyperparameter assignment. Equality is
/// structural; hyperparameters are kept in the family's canonical order.
struct ModelId {
  Family family = Family::Knn;
  std::vector<std::pair<std::string, ParamValue>> hyperparams;

  const ParamValue& param(std::string_view name) const;
  std::int64_t int_param(std::string_view name) const;
  double real_param(std::string_view name) const;
  const std::string& text_param(std::string_view name) const;

  // e.g. "knn(k=15,agg=mean)".
  std::string to_string() const;

  bool operator==(const ModelId&) const = default;
};

// Parses the canonical string form and validates it against the family's
// declared parameters.
ModelId parse_model_id(std::string_view text);

// Throws ValidationError if parameter names, order, or values do not match
// the family's declaration.
void validate_model(const ModelId& m);

// Names of the parameters each family declares, in canonical order.
const std::vector<std::string>& family_params(Family f);

class ModelSet {
 public:
  ModelSet() = default;
  explicit ModelSet(std::vector<ModelId> models);

  std::size_t size() const { return models_.size(); }
  bool empty() const { return models_.empty(); }
  const ModelId& operator[](std::size_t j) const { return models_[j]; }
  const std::vector<ModelId>& models() const { return models_; }
  std::optional<std::size_t> index_of(const ModelId& m) const;

  auto begin() const { return models_.begin(); }
  auto end() const { return models_.end(); }

  bool operator==(const ModelSet& o) const { return models_ == o.models_; }

 private:
  std::vector<ModelId> models_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace elect
