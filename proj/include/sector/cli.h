/*
 * Copyright 2026 The Sector Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SECTOR_CLI_H_
#define SECTOR_CLI_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sector/encode.h"
#include "sector/model.h"
#include "sector/segment.h"

namespace sector {

// Everything one run needs. The config file is a flat JSON object whose keys
// are dotted paths, e.g. {"encoder.variant": "bloom", "train.max_epochs": 30}.
// Relative paths are resolved against the config file's directory.
struct RunConfig {
  // Either one corpus (split 70/10/20 with `seed`) or explicit splits.
  std::string corpus_path;
  std::string train_path;
  std::string validation_path;
  std::string test_path;
  std::string embeddings_path;  // word2vec text, encoder variant emb only
  std::string dataset_name;
  size_t max_sentences = 512;

  EncoderConfig encoder;
  TrainConfig train;
  SegConfig segment;
  std::string output_dir = "sector_out";
  uint64_t seed = 1;

  // Unknown keys and wrongly typed values are usage errors.
  static RunConfig FromJson(std::string_view text, const std::string& base_dir = "");
  static RunConfig Load(const std::string& path);

  // Sets `seed` (and the training seed) from SECTOR_SEED when it is set.
  void ApplyEnvironment();

  // Checks values and that referenced input files exist.
  void Validate() const;

  nlohmann::ordered_json ToFlatJson() const;
};

// Table-style name of a model, e.g. "SEC>T+bloom" or "SEC>H+bow+rank".
std::string ModelDisplayName(const SectorModel& model);

// Entry point of the `sector` tool. Returns the process exit code: 0 success,
// 1 usage error, 2 data error, 3 numeric failure.
int RunCli(int argc, const char* const* argv);
int RunCli(const std::vector<std::string>& args);

}  // namespace sector

#endif  // SECTOR_CLI_H_
