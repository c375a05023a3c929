// Copyright 2026 The EDA Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eda/serialization.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace eda
{
namespace
{

constexpr int kFormatVersion = 1;

std::vector<std::string> split(const std::string & line, char sep)
{
  std::vector<std::string> out;
  std::string token;
  std::istringstream stream(line);
  while (std::getline(stream, token, sep)) {
    out.push_back(token);
  }
  if (!line.empty() && line.back() == sep) {
    out.push_back("");
  }
  return out;
}

double parse_real(const std::string & token, const std::string & what)
{
  char * end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw FileFormatError("cannot parse real for " + what + ": '" + token + "'");
  }
  return value;
}

long long parse_int(const std::string & token, const std::string & what)
{
  char * end = nullptr;
  const long long value = std::strtoll(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0') {
    throw FileFormatError("cannot parse integer for " + what + ": '" + token + "'");
  }
  return value;
}

struct Header
{
  std::string kind;
  int version = 0;
  std::string schema;
  long long count = 0;
  std::map<std::string, std::string> fields;

  const std::string & field(const std::string & key) const
  {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw SchemaMismatchError("header field missing: " + key);
    }
    return it->second;
  }
  double real(const std::string & key) const { return parse_real(field(key), key); }
  long long integer(const std::string & key) const { return parse_int(field(key), key); }
};

std::string header_line(
  const std::string & kind, const std::string & schema, long long count,
  const std::vector<std::pair<std::string, std::string>> & fields)
{
  std::ostringstream out;
  out << "edar " << kind << " v" << kFormatVersion << " schema=" << schema
      << " count=" << count;
  for (const auto & [key, value] : fields) {
    out << ' ' << key << '=' << value;
  }
  return out.str();
}

Header parse_header(
  std::istream & in, const std::string & path,
  const std::string & expected_kind, const std::string & expected_schema)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw TruncatedFileError(path + ": empty file, header expected");
  }
  std::istringstream stream(line);
  std::string magic;
  Header header;
  std::string version_token;
  if (!(stream >> magic >> header.kind >> version_token)) {
    throw SchemaMismatchError(path + ": malformed header");
  }
  if (magic != "edar") {
    throw SchemaMismatchError(path + ": not an edar record file");
  }
  if (header.kind != expected_kind) {
    throw SchemaMismatchError(
      path + ": kind '" + header.kind + "', expected '" + expected_kind + "'");
  }
  if (version_token.size() < 2 || version_token[0] != 'v') {
    throw SchemaMismatchError(path + ": malformed version token");
  }
  header.version = static_cast<int>(parse_int(version_token.substr(1), "version"));
  if (header.version != kFormatVersion) {
    throw VersionMismatchError(
      path + ": version " + std::to_string(header.version) + ", expected v" +
      std::to_string(kFormatVersion));
  }
  std::string token;
  while (stream >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw SchemaMismatchError(path + ": malformed header token '" + token + "'");
    }
    header.fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  header.schema = header.field("schema");
  if (header.schema != expected_schema) {
    throw SchemaMismatchError(
      path + ": schema '" + header.schema + "', expected '" + expected_schema + "'");
  }
  header.count = header.integer("count");
  return header;
}

std::vector<double> read_record(
  std::istream & in, const std::string & path, long long index, std::size_t expected_values)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw TruncatedFileError(path + ": truncated at record " + std::to_string(index));
  }
  std::istringstream stream(line);
  std::vector<double> values;
  values.reserve(expected_values);
  std::string token;
  while (stream >> token) {
    values.push_back(parse_real(token, "record " + std::to_string(index)));
  }
  if (values.size() != expected_values) {
    throw TruncatedFileError(
      path + ": record " + std::to_string(index) + " has " + std::to_string(values.size()) +
      " fields, expected " + std::to_string(expected_values));
  }
  return values;
}

std::ifstream open_for_read(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw FileFormatError("cannot open " + path);
  }
  return in;
}

std::string join_ints(const std::vector<int> & values)
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<int> split_ints(const std::string & text)
{
  std::vector<int> out;
  if (text.empty()) {
    return out;
  }
  for (const auto & token : split(text, ',')) {
    out.push_back(static_cast<int>(parse_int(token, "integer list")));
  }
  return out;
}

std::string meta_to_token(const CheckpointMeta & meta)
{
  std::ostringstream out;
  out << "id:" << meta.config_id << ";paradigm:" << meta.paradigm
      << ";evolve:" << join_ints(meta.evolve_layers) << ";distinct:" << (meta.distinct ? 1 : 0)
      << ";cls:" << (meta.cls_kind == ClsKind::kBce ? "bce" : "ce")
      << ";epochs:" << meta.epochs << ";lr:" << format_real(meta.learning_rate)
      << ";seed:" << meta.seed;
  return out.str();
}

CheckpointMeta meta_from_token(const std::string & token)
{
  CheckpointMeta meta;
  for (const auto & part : split(token, ';')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw SchemaMismatchError("malformed meta entry '" + part + "'");
    }
    const std::string key = part.substr(0, colon);
    const std::string value = part.substr(colon + 1);
    if (key == "id") {
      meta.config_id = value;
    } else if (key == "paradigm") {
      meta.paradigm = value;
    } else if (key == "evolve") {
      meta.evolve_layers = split_ints(value);
    } else if (key == "distinct") {
      meta.distinct = parse_int(value, "distinct") != 0;
    } else if (key == "cls") {
      meta.cls_kind = (value == "ce") ? ClsKind::kCe : ClsKind::kBce;
    } else if (key == "epochs") {
      meta.epochs = static_cast<int>(parse_int(value, "epochs"));
    } else if (key == "lr") {
      meta.learning_rate = parse_real(value, "lr");
    } else if (key == "seed") {
      meta.seed = static_cast<std::uint64_t>(parse_int(value, "seed"));
    } else {
      throw SchemaMismatchError("unknown meta key '" + key + "'");
    }
  }
  return meta;
}

}  // namespace

std::string format_real(double value)
{
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void atomic_write_text(const std::string & path, const std::string & content)
{
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  const std::filesystem::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp);
    if (!out) {
      throw FileFormatError("cannot write " + temp.string());
    }
    out << content;
    if (!out.good()) {
      throw FileFormatError("write failed for " + temp.string());
    }
  }
  std::filesystem::rename(temp, target);
}

void save_dataset(const std::string & path, const Dataset & dataset)
{
  std::ostringstream out;
  out << header_line(
           "scenes", "category,latent_mode,context,gt_xy", dataset.size(),
           {{"horizon", std::to_string(dataset.horizon)},
            {"dt", format_real(dataset.dt)},
            {"context_dim", std::to_string(dataset.context_dim)},
            {"num_modes", std::to_string(dataset.num_modes)}})
      << '\n';
  for (const Scene & scene : dataset.scenes) {
    out << scene.category << ' ' << scene.latent_mode;
    for (double v : scene.context) {
      out << ' ' << format_real(v);
    }
    for (const Point2 & p : scene.gt_trajectory.points) {
      out << ' ' << format_real(p.x) << ' ' << format_real(p.y);
    }
    out << '\n';
  }
  atomic_write_text(path, out.str());
}

Dataset load_dataset(const std::string & path)
{
  std::ifstream in = open_for_read(path);
  const Header header = parse_header(in, path, "scenes", "category,latent_mode,context,gt_xy");

  Dataset dataset;
  dataset.horizon = static_cast<int>(header.integer("horizon"));
  dataset.dt = header.real("dt");
  dataset.context_dim = static_cast<int>(header.integer("context_dim"));
  dataset.num_modes = static_cast<int>(header.integer("num_modes"));
  dataset.scenes.resize(header.count);

  const std::size_t values_per_record = 2 + dataset.context_dim + 2 * dataset.horizon;
  for (long long i = 0; i < header.count; ++i) {
    const std::vector<double> values = read_record(in, path, i, values_per_record);
    Scene & scene = dataset.scenes[i];
    scene.category = static_cast<int>(values[0]);
    scene.latent_mode = static_cast<int>(values[1]);
    scene.context.assign(values.begin() + 2, values.begin() + 2 + dataset.context_dim);
    scene.gt_trajectory.dt = dataset.dt;
    scene.gt_trajectory.points.resize(dataset.horizon);
    const std::size_t base = 2 + dataset.context_dim;
    for (int t = 0; t < dataset.horizon; ++t) {
      scene.gt_trajectory.points[t] = {values[base + 2 * t], values[base + 2 * t + 1]};
    }
  }
  return dataset;
}

void save_anchors(const std::string & path, const std::vector<Point2> & endpoints,
                  double objective)
{
  std::ostringstream out;
  out << header_line("anchors", "endpoint_xy", static_cast<long long>(endpoints.size()),
                     {{"objective", format_real(objective)}})
      << '\n';
  for (const Point2 & p : endpoints) {
    out << format_real(p.x) << ' ' << format_real(p.y) << '\n';
  }
  atomic_write_text(path, out.str());
}

std::pair<std::vector<Point2>, double> load_anchors(const std::string & path)
{
  std::ifstream in = open_for_read(path);
  const Header header = parse_header(in, path, "anchors", "endpoint_xy");
  std::vector<Point2> endpoints(header.count);
  for (long long i = 0; i < header.count; ++i) {
    const std::vector<double> values = read_record(in, path, i, 2);
    endpoints[i] = {values[0], values[1]};
  }
  return {std::move(endpoints), header.real("objective")};
}

void save_checkpoint(const std::string & path, const ModelParams & params,
                     const CheckpointMeta & meta)
{
  const ParamLayout layout = params.layout();
  const ModelConfig & cfg = params.config;

  auto write_block = [](std::ostringstream & out, const double * data, int count) {
    for (int i = 0; i < count; ++i) {
      if (i > 0) {
        out << ' ';
      }
      out << format_real(data[i]);
    }
    out << '\n';
  };

  const long long block_count = 4 + 8LL * cfg.num_layers;
  std::ostringstream out;
  out << header_line(
           "model", "anchor_xy,enc_w,enc_b,queries,layer_blocks", block_count,
           {{"context_dim", std::to_string(cfg.context_dim)},
            {"hidden", std::to_string(cfg.hidden_dim)},
            {"layers", std::to_string(cfg.num_layers)},
            {"components", std::to_string(cfg.num_components)},
            {"horizon", std::to_string(cfg.horizon)},
            {"seed", std::to_string(cfg.seed)},
            {"ls_min", format_real(cfg.limits.log_sigma_min)},
            {"ls_max", format_real(cfg.limits.log_sigma_max)},
            {"rho_bound", format_real(cfg.limits.rho_bound)},
            {"delta_scale", format_real(cfg.delta_scale)},
            {"coord_scale", format_real(params.coord_scale)},
            {"meta", meta_to_token(meta)}})
      << '\n';

  std::vector<double> anchor_values;
  anchor_values.reserve(2 * params.anchor_endpoints.size());
  for (const Point2 & p : params.anchor_endpoints) {
    anchor_values.push_back(p.x);
    anchor_values.push_back(p.y);
  }
  write_block(out, anchor_values.data(), static_cast<int>(anchor_values.size()));
  write_block(out, params.theta.data() + layout.enc_w, layout.hidden * layout.context_dim);
  write_block(out, params.theta.data() + layout.enc_b, layout.hidden);
  write_block(out, params.theta.data() + layout.queries, layout.hidden * layout.num_components);
  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    const auto & b = layout.layers[layer];
    write_block(out, params.theta.data() + b.refine_w1, layout.hidden * layout.input_dim);
    write_block(out, params.theta.data() + b.refine_b1, layout.hidden);
    write_block(out, params.theta.data() + b.refine_w2, layout.out_dim * layout.hidden);
    write_block(out, params.theta.data() + b.refine_b2, layout.out_dim);
    write_block(out, params.theta.data() + b.score_w1, layout.hidden * layout.input_dim);
    write_block(out, params.theta.data() + b.score_b1, layout.hidden);
    write_block(out, params.theta.data() + b.score_w2, layout.hidden);
    write_block(out, params.theta.data() + b.score_b2, 1);
  }
  atomic_write_text(path, out.str());
}

std::pair<ModelParams, CheckpointMeta> load_checkpoint(const std::string & path)
{
  std::ifstream in = open_for_read(path);
  const Header header =
    parse_header(in, path, "model", "anchor_xy,enc_w,enc_b,queries,layer_blocks");

  ModelConfig cfg;
  cfg.context_dim = static_cast<int>(header.integer("context_dim"));
  cfg.hidden_dim = static_cast<int>(header.integer("hidden"));
  cfg.num_layers = static_cast<int>(header.integer("layers"));
  cfg.num_components = static_cast<int>(header.integer("components"));
  cfg.horizon = static_cast<int>(header.integer("horizon"));
  cfg.seed = static_cast<std::uint64_t>(header.integer("seed"));
  cfg.limits.log_sigma_min = header.real("ls_min");
  cfg.limits.log_sigma_max = header.real("ls_max");
  cfg.limits.rho_bound = header.real("rho_bound");
  cfg.delta_scale = header.real("delta_scale");

  const long long expected_blocks = 4 + 8LL * cfg.num_layers;
  if (header.count != expected_blocks) {
    throw SchemaMismatchError(
      path + ": block count " + std::to_string(header.count) + ", expected " +
      std::to_string(expected_blocks));
  }

  ModelParams params;
  params.config = cfg;
  params.coord_scale = header.real("coord_scale");
  const ParamLayout layout = params.layout();
  params.theta.assign(layout.total, 0.0);

  long long record = 0;
  auto read_block = [&](double * data, int count) {
    const std::vector<double> values = read_record(in, path, record++, count);
    std::copy(values.begin(), values.end(), data);
  };

  std::vector<double> anchor_values(2 * cfg.num_components);
  read_block(anchor_values.data(), static_cast<int>(anchor_values.size()));
  params.anchor_endpoints.resize(cfg.num_components);
  for (int i = 0; i < cfg.num_components; ++i) {
    params.anchor_endpoints[i] = {anchor_values[2 * i], anchor_values[2 * i + 1]};
  }
  read_block(params.theta.data() + layout.enc_w, layout.hidden * layout.context_dim);
  read_block(params.theta.data() + layout.enc_b, layout.hidden);
  read_block(params.theta.data() + layout.queries, layout.hidden * layout.num_components);
  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    const auto & b = layout.layers[layer];
    read_block(params.theta.data() + b.refine_w1, layout.hidden * layout.input_dim);
    read_block(params.theta.data() + b.refine_b1, layout.hidden);
    read_block(params.theta.data() + b.refine_w2, layout.out_dim * layout.hidden);
    read_block(params.theta.data() + b.refine_b2, layout.out_dim);
    read_block(params.theta.data() + b.score_w1, layout.hidden * layout.input_dim);
    read_block(params.theta.data() + b.score_b1, layout.hidden);
    read_block(params.theta.data() + b.score_w2, layout.hidden);
    read_block(params.theta.data() + b.score_b2, 1);
  }
  return {std::move(params), meta_from_token(header.field("meta"))};
}

namespace
{

const char * kMetricsHeader =
  "config_id,evolve_times,distinct,cls_kind,score_mode,min_ade,min_fde,miss_rate,map";
const char * kLayerHeader = "config_id,layer,min_fde,miss_rate";

}  // namespace

void save_metrics_csv(const std::string & path, const std::vector<MetricsRow> & rows)
{
  std::ostringstream out;
  out << kMetricsHeader << '\n';
  for (const MetricsRow & row : rows) {
    out << row.config_id << ',' << row.evolve_times << ',' << (row.distinct ? "on" : "off")
        << ',' << row.cls_kind << ',' << row.score_mode << ',' << format_real(row.min_ade)
        << ',' << format_real(row.min_fde) << ',' << format_real(row.miss_rate) << ','
        << format_real(row.map) << '\n';
  }
  atomic_write_text(path, out.str());
}

std::vector<MetricsRow> load_metrics_csv(const std::string & path)
{
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw TruncatedFileError(path + ": empty file, header expected");
  }
  if (line != kMetricsHeader) {
    throw SchemaMismatchError(path + ": unexpected CSV header");
  }
  std::vector<MetricsRow> rows;
  long long index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 9) {
      throw TruncatedFileError(path + ": row " + std::to_string(index) + " has " +
                               std::to_string(fields.size()) + " fields, expected 9");
    }
    MetricsRow row;
    row.config_id = fields[0];
    row.evolve_times = static_cast<int>(parse_int(fields[1], "evolve_times"));
    row.distinct = fields[2] == "on";
    row.cls_kind = fields[3];
    row.score_mode = fields[4];
    row.min_ade = parse_real(fields[5], "min_ade");
    row.min_fde = parse_real(fields[6], "min_fde");
    row.miss_rate = parse_real(fields[7], "miss_rate");
    row.map = parse_real(fields[8], "map");
    rows.push_back(std::move(row));
    ++index;
  }
  return rows;
}

void save_layer_metrics_csv(const std::string & path,
                            const std::vector<LayerMetricsRow> & rows)
{
  std::ostringstream out;
  out << kLayerHeader << '\n';
  for (const LayerMetricsRow & row : rows) {
    out << row.config_id << ',' << row.layer << ',' << format_real(row.min_fde) << ','
        << format_real(row.miss_rate) << '\n';
  }
  atomic_write_text(path, out.str());
}

std::vector<LayerMetricsRow> load_layer_metrics_csv(const std::string & path)
{
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw TruncatedFileError(path + ": empty file, header expected");
  }
  if (line != kLayerHeader) {
    throw SchemaMismatchError(path + ": unexpected CSV header");
  }
  std::vector<LayerMetricsRow> rows;
  long long index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw TruncatedFileError(path + ": row " + std::to_string(index) + " has " +
                               std::to_string(fields.size()) + " fields, expected 4");
    }
    LayerMetricsRow row;
    row.config_id = fields[0];
    row.layer = static_cast<int>(parse_int(fields[1], "layer"));
    row.min_fde = parse_real(fields[2], "min_fde");
    row.miss_rate = parse_real(fields[3], "miss_rate");
    rows.push_back(std::move(row));
    ++index;
  }
  return rows;
}

}  // namespace eda
