#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "elect/model_id.hpp"

namespace elect {

struct ParamAxis {
  std::string name;
  std::vector<ParamValue> values;
};

struct FamilyGrid {
  Family family;
  // First axis varies slowest during expansion.
  std::vector<ParamAxis> axes;
};

/// Hyperparameter grid per detector family; expands into the candidate pool.
struct GridSpec {
  std::vector<FamilyGrid> families;
};

// Families in declared enum order, assignments in axis order. Throws
// ValidationError on an empty grid or any invalid assignment.
ModelSet build_model_set(const GridSpec& grid);

// The shipped desk-scale grid (61 models); mirrors config/default_grid.json.
GridSpec default_grid();

GridSpec parse_grid_json(const std::string& text);
GridSpec load_grid(const std::filesystem::path& path);
std::string grid_to_json(const GridSpec& grid);

}  // namespace elect
