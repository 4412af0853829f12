#include <zlib.h>

#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "elect/meta_train.hpp"

namespace elect {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string crc_hex(const std::string& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

std::string performance_csv(const PerformanceMatrix& p) {
  std::string out = "dataset_id";
  for (std::size_t j = 0; j < p.models(); ++j) out += "," + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < p.tasks(); ++i) {
    out += p.dataset_ids[i];
    for (double v : p.row(i)) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

std::string ipms_csv(const MetaLearner& ml) {
  std::string out = "dataset_id,model,mc,select,hits\n";
  for (std::size_t i = 0; i < ml.ipms.size(); ++i)
    for (std::size_t j = 0; j < ml.ipms[i].size(); ++j) {
      const auto& v = ml.ipms[i][j];
      out += ml.performance.dataset_ids[i] + "," + std::to_string(j) + "," +
             format_double(v.mc) + "," + format_double(v.select) + "," + format_double(v.hits) +
             "\n";
    }
  return out;
}

std::vector<std::vector<std::string>> split_csv(const std::string& text, const std::string& file) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ParseError(file, 0, 0, "empty file");
  return rows;
}

double to_double(const std::string& s, const std::string& file, std::size_t row, std::size_t col) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, row, col, "non-numeric cell '" + s + "'");
  }
}

json params_json(const GbtParams& p) {
  return {{"n_trees", p.n_trees},       {"max_depth", p.max_depth},
          {"learning_rate", p.learning_rate}, {"min_leaf", p.min_leaf},
          {"subsample", p.subsample},   {"seed", p.seed}};
}

GbtParams params_from_json(const json& j) {
  GbtParams p;
  p.n_trees = j.at("n_trees").get<int>();
  p.max_depth = j.at("max_depth").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.min_leaf = j.at("min_leaf").get<int>();
  p.subsample = j.at("subsample").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

std::string read_checked(const fs::path& dir, const std::string& name, const json& checksums) {
  const auto path = dir / name;
  if (!fs::exists(path)) throw Error("bundle is missing " + name);
  auto bytes = read_file(path);
  if (!checksums.contains(name)) throw Error("manifest has no checksum for " + name);
  if (crc_hex(bytes) != checksums.at(name).get<std::string>())
    throw ValidationError("checksum mismatch in " + name);
  return bytes;
}

}  // namespace

void save_meta_learner(const MetaLearner& ml, const fs::path& dir) {
  ml.validate();
  for (const auto& id : ml.performance.dataset_ids)
    if (id.find_first_of(",\n") != std::string::npos)
      throw ValidationError("dataset id '" + id + "' cannot be stored in CSV");
  fs::create_directories(dir);
  const auto p_csv = performance_csv(ml.performance);
  const auto ipm_csv = ipms_csv(ml);
  const auto predictor = gbt_to_json(ml.predictor);
  json models = json::array();
  for (const auto& m : ml.model_set) models.push_back(m.to_string());
  const auto& h = ml.hyperparams;
  json manifest{
      {"format_version", ml.format_version},
      {"hyperparams",
       {{"t", h.t}, {"init_size", h.init_size}, {"patience", h.patience}, {"budget", h.budget}}},
      {"grid", json::parse(grid_to_json(ml.grid))},
      {"models", models},
      {"anchors", ml.anchors},
      {"dataset_ids", ml.performance.dataset_ids},
      {"predictor_params", params_json(ml.predictor_params)},
      {"checksums",
       {{"P.csv", crc_hex(p_csv)}, {"ipms.csv", crc_hex(ipm_csv)}, {"predictor.json", crc_hex(predictor)}}},
  };
  // Covers every other manifest field.
  manifest["manifest_crc"] = crc_hex(manifest.dump(2));
  write_file(dir / "P.csv", p_csv);
  write_file(dir / "ipms.csv", ipm_csv);
  write_file(dir / "predictor.json", predictor);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

MetaLearner load_meta_learner(const fs::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw Error("bundle is missing manifest.json");
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw ParseError(manifest_path.string(), 0, 0, e.what());
  }
  const int version = manifest.at("format_version").get<int>();
  if (version != MetaLearner::kFormatVersion)
    throw ValidationError("unsupported bundle format_version " + std::to_string(version) +
                          " (this build reads version " +
                          std::to_string(MetaLearner::kFormatVersion) + ")");
  if (!manifest.contains("manifest_crc")) throw ValidationError("manifest.json has no manifest_crc");
  const auto stored_crc = manifest.at("manifest_crc").get<std::string>();
  manifest.erase("manifest_crc");
  if (crc_hex(manifest.dump(2)) != stored_crc) throw ValidationError("checksum mismatch in manifest.json");
  const auto& checksums = manifest.at("checksums");

  MetaLearner ml;
  ml.format_version = version;
  ml.grid = parse_grid_json(manifest.at("grid").dump());
  std::vector<ModelId> models;
  for (const auto& s : manifest.at("models")) models.push_back(parse_model_id(s.get<std::string>()));
  ml.model_set = ModelSet(std::move(models));
  ml.anchors = manifest.at("anchors").get<std::vector<std::size_t>>();
  const auto& h = manifest.at("hyperparams");
  ml.hyperparams = {h.at("t").get<std::size_t>(), h.at("init_size").get<std::size_t>(),
                    h.at("patience").get<std::size_t>(), h.at("budget").get<std::size_t>()};
  ml.predictor_params = params_from_json(manifest.at("predictor_params"));
  const auto ids = manifest.at("dataset_ids").get<std::vector<std::string>>();
  const std::size_t m = ml.model_set.size();

  const auto p_rows = split_csv(read_checked(dir, "P.csv", checksums), "P.csv");
  if (p_rows.size() != ids.size() + 1) throw ParseError("P.csv", 0, 0, "row count mismatch");
  ml.performance = PerformanceMatrix{Matrix(ids.size(), m), ids, ml.model_set};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& row = p_rows[i + 1];
    if (row.size() != m + 1 || row[0] != ids[i])
      throw ParseError("P.csv", i + 2, 0, "malformed row");
    for (std::size_t j = 0; j < m; ++j)
      ml.performance.values(i, j) = to_double(row[j + 1], "P.csv", i + 2, j + 2);
  }

  const auto ipm_rows = split_csv(read_checked(dir, "ipms.csv", checksums), "ipms.csv");
  if (ipm_rows.size() != ids.size() * m + 1) throw ParseError("ipms.csv", 0, 0, "row count mismatch");
  ml.ipms.assign(ids.size(), std::vector<IpmVector>(m));
  for (std::size_t r = 1; r < ipm_rows.size(); ++r) {
    const auto& row = ipm_rows[r];
    const std::size_t i = (r - 1) / m, j = (r - 1) % m;
    if (row.size() != 5 || row[0] != ids[i] || row[1] != std::to_string(j))
      throw ParseError("ipms.csv", r + 1, 0, "malformed row");
    ml.ipms[i][j] = {to_double(row[2], "ipms.csv", r + 1, 3), to_double(row[3], "ipms.csv", r + 1, 4),
                     to_double(row[4], "ipms.csv", r + 1, 5)};
  }
  ml.predictor = gbt_from_json(read_checked(dir, "predictor.json", checksums));
  ml.validate();
  return ml;
}

void save_score_cache(const ScoreTable& cache, const ModelSet& models, const fs::path& dir) {
  for (std::size_t i = 0; i < cache.tasks(); ++i)
    for (std::size_t j = 0; j < models.size(); ++j) {
      std::string out;
      for (double v : cache.scores[i][j]) out += format_double(v) + "\n";
      write_file(dir / "scores" / cache.dataset_ids[i] / (std::to_string(j) + ".csv"), out);
    }
}

}  // namespace elect
