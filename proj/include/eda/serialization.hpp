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

#ifndef EDA__SERIALIZATION_HPP_
#define EDA__SERIALIZATION_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eda/loss.hpp"
#include "eda/model.hpp"
#include "eda/types.hpp"

namespace eda
{

// All record files are plain text: one header line
//   edar <kind> v<version> schema=<fields> count=<records> key=value...
// followed by count records, one entity per line, space-separated,
// reals rendered with 17 significant digits (lossless for doubles).

class FileFormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class VersionMismatchError : public FileFormatError
{
public:
  using FileFormatError::FileFormatError;
};

class TruncatedFileError : public FileFormatError
{
public:
  using FileFormatError::FileFormatError;
};

class SchemaMismatchError : public FileFormatError
{
public:
  using FileFormatError::FileFormatError;
};

/// Shortest decimal form that parses back to the identical double.
std::string format_real(double value);

/// Training provenance stored with a checkpoint so evaluation reports
/// can name the configuration that produced it.
struct CheckpointMeta
{
  std::string config_id = "init";
  std::string paradigm = "eda";
  std::vector<int> evolve_layers;
  bool distinct = false;
  ClsKind cls_kind = ClsKind::kBce;
  int epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
};

struct MetricsRow
{
  std::string config_id;
  int evolve_times = 0;
  bool distinct = false;
  std::string cls_kind = "bce";
  std::string score_mode = "original";
  double min_ade = 0.0;
  double min_fde = 0.0;
  double miss_rate = 0.0;
  double map = 0.0;
};

struct LayerMetricsRow
{
  std::string config_id;
  int layer = 0;
  double min_fde = 0.0;
  double miss_rate = 0.0;
};

void save_dataset(const std::string & path, const Dataset & dataset);
Dataset load_dataset(const std::string & path);

void save_anchors(const std::string & path, const std::vector<Point2> & endpoints,
                  double objective);
std::pair<std::vector<Point2>, double> load_anchors(const std::string & path);

void save_checkpoint(const std::string & path, const ModelParams & params,
                     const CheckpointMeta & meta);
std::pair<ModelParams, CheckpointMeta> load_checkpoint(const std::string & path);

void save_metrics_csv(const std::string & path, const std::vector<MetricsRow> & rows);
std::vector<MetricsRow> load_metrics_csv(const std::string & path);

void save_layer_metrics_csv(const std::string & path,
                            const std::vector<LayerMetricsRow> & rows);
std::vector<LayerMetricsRow> load_layer_metrics_csv(const std::string & path);

/// Writes via a temp file in the same directory, then renames.
void atomic_write_text(const std::string & path, const std::string & content);

}  // namespace eda

#endif  // EDA__SERIALIZATION_HPP_
