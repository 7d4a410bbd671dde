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

#ifndef SECTOR_MODEL_H_
#define SECTOR_MODEL_H_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sector/corpus.h"
#include "sector/encode.h"
#include "sector/network.h"

namespace sector {

// Network outputs for one document, one row per sentence.
struct DocumentOutput {
  Eigen::MatrixXd scores;              // N x labels
  Eigen::MatrixXd embedding_forward;   // N x E
  Eigen::MatrixXd embedding_backward;  // N x E
};

// A trained network together with the encoder that feeds it. Immutable once
// built; Predict may be called from several threads.
struct SectorModel {
  Task task = Task::kSingle;
  LossKind loss = LossKind::kCrossEntropy;
  // Topic labels (single) or heading words (multi), in output-row order.
  std::vector<std::string> labels;
  SentenceEncoder encoder;
  NetworkParams<float> params;

  // One column per sentence.
  Matrix<float> EncodeDocument(const Document& doc, OovStats* stats = nullptr) const;
  DocumentOutput Predict(const Document& doc) const;
};

// Binary container: "SECM", format version, task and loss tags, label names,
// encoder state and every network tensor as little-endian float32 with its
// shape. Loading validates magic, version, shapes and length.
inline constexpr uint32_t kModelFormatVersion = 1;

std::string SerializeModel(const SectorModel& model);
SectorModel ParseModel(std::string_view bytes);
void SaveModel(const SectorModel& model, const std::string& path);
SectorModel LoadModel(const std::string& path);

struct TrainConfig {
  Task task = Task::kSingle;
  LossKind loss = LossKind::kCrossEntropy;
  size_t hidden = 256;
  size_t embedding = 128;
  size_t batch_size = 16;
  double learning_rate = 0.01;
  double dropout = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  size_t patience = 10;
  size_t max_epochs = 100;
  // Heading words seen fewer times in the training headings are dropped from
  // the multi-label vocabulary.
  size_t heading_min_frequency = 1;
  RankingParams ranking;
  uint64_t seed = 1;
  // Worker threads for per-document gradients. Results do not depend on it.
  size_t threads = 1;

  void Validate() const;
};

struct EpochRecord {
  size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_map = 0.0;
  bool improved = false;
  std::string timestamp;  // UTC, ISO 8601

  // One JSON-lines record: {epoch, train_loss, validation_map, timestamp}.
  std::string ToJsonLine() const;
};

// Called after every epoch with the current (not the best) model. Returning
// false stops training.
using EpochCallback = std::function<bool(const EpochRecord&, const SectorModel&)>;

struct TrainResult {
  SectorModel model;  // best validation-MAP snapshot
  std::vector<EpochRecord> log;
  size_t best_epoch = 0;
};

// Multi-label targets: heading words of the training documents.
HeadingVocab TrainingHeadingVocab(const std::vector<Document>& train,
                                  const TrainConfig& config);

// Adam on document mini-batches with inverted dropout, early stopping on
// sentence-level validation MAP. Throws NumericError if the loss diverges.
TrainResult Train(const std::vector<Document>& train,
                  const std::vector<Document>& validation,
                  SentenceEncoder encoder, const TrainConfig& config,
                  const EpochCallback& callback = {});

// Mean over sentences with at least one gold label of the average precision
// of the sentence's score ranking.
double SentenceMap(const SectorModel& model, const std::vector<Document>& docs);

// Share of sentences whose top-scored label equals the section label
// (single-label task).
double SentenceAccuracy(const SectorModel& model, const std::vector<Document>& docs);

}  // namespace sector

#endif  // SECTOR_MODEL_H_
