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

#include "sector/model.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sector/common.h"
#include "sector/eval.h"
#include "sector/random.h"

namespace sector {
namespace {

constexpr char kMagic[4] = {'S', 'E', 'C', 'M'};
constexpr uint64_t kDropoutStream = 0xd209b0ull;

// Little-endian writer.
class Writer {
 public:
  void U8(uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) U8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void F32(float v) { U32(std::bit_cast<uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Str(std::string_view s) {
    U32(static_cast<uint32_t>(s.size()));
    out_.append(s.data(), s.size());
  }
  void Raw(const char* data, size_t n) { out_.append(data, n); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  uint8_t U8() {
    Need(1, "byte");
    return static_cast<uint8_t>(in_[pos_++]);
  }
  uint32_t U32() {
    Need(4, "uint32");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<uint8_t>(in_[pos_++])) << (8 * i);
    }
    return v;
  }
  uint64_t U64() {
    Need(8, "uint64");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<uint64_t>(static_cast<uint8_t>(in_[pos_++])) << (8 * i);
    }
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string Str() {
    const uint32_t n = U32();
    Need(n, "string");
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view Raw(size_t n, const char* what) {
    Need(n, what);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  // Guards element counts before allocating.
  void NeedItems(uint64_t count, uint64_t bytes_each, const char* what) {
    if (bytes_each != 0 && count > (in_.size() - pos_) / bytes_each) {
      throw DataError(std::string("model file truncated in ") + what);
    }
  }
  bool AtEnd() const { return pos_ == in_.size(); }

 private:
  void Need(size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw DataError(std::string("model file truncated in ") + what);
    }
  }

  std::string_view in_;
  size_t pos_ = 0;
};

void WriteTensor(Writer& w, const Matrix<float>& m) {
  w.U32(static_cast<uint32_t>(m.rows()));
  w.U32(static_cast<uint32_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) w.F32(m(r, c));
  }
}

Matrix<float> ReadTensor(Reader& r, const std::string& name) {
  const uint32_t rows = r.U32();
  const uint32_t cols = r.U32();
  r.NeedItems(static_cast<uint64_t>(rows) * cols, 4, name.c_str());
  Matrix<float> m(rows, cols);
  for (uint32_t c = 0; c < cols; ++c) {
    for (uint32_t row = 0; row < rows; ++row) m(row, c) = r.F32();
  }
  if (!m.allFinite()) throw DataError("model tensor '" + name + "' is not finite");
  return m;
}

uint8_t LossTag(LossKind loss) {
  switch (loss) {
    case LossKind::kCrossEntropy: return 0;
    case LossKind::kBce: return 1;
    case LossKind::kRanking: return 2;
  }
  return 0;
}

LossKind LossFromTag(uint8_t tag) {
  switch (tag) {
    case 0: return LossKind::kCrossEntropy;
    case 1: return LossKind::kBce;
    case 2: return LossKind::kRanking;
  }
  throw DataError("model file has unknown loss tag " + std::to_string(tag));
}

uint8_t VariantTag(EncoderVariant v) {
  switch (v) {
    case EncoderVariant::kBow: return 0;
    case EncoderVariant::kBloom: return 1;
    case EncoderVariant::kEmb: return 2;
  }
  return 0;
}

EncoderVariant VariantFromTag(uint8_t tag) {
  switch (tag) {
    case 0: return EncoderVariant::kBow;
    case 1: return EncoderVariant::kBloom;
    case 2: return EncoderVariant::kEmb;
  }
  throw DataError("model file has unknown encoder tag " + std::to_string(tag));
}

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// Gold label indices of every sentence, in model output order. Single-label
// sections whose label the model does not know count as `other`.
std::vector<std::vector<size_t>> GoldIndices(const SectorModel& model,
                                             const Document& doc) {
  std::map<std::string, size_t, std::less<>> index;
  for (size_t i = 0; i < model.labels.size(); ++i) index[model.labels[i]] = i;
  std::vector<std::vector<size_t>> gold(doc.size());
  for (const auto& section : doc.sections) {
    std::vector<size_t> labels;
    if (model.task == Task::kSingle) {
      auto it = index.find(SectionLabel(section));
      if (it == index.end()) it = index.find(kOtherLabel);
      if (it != index.end()) labels.push_back(it->second);
    } else {
      for (const auto& word : Tokenize(section.heading)) {
        const auto it = index.find(word);
        if (it != index.end()) labels.push_back(it->second);
      }
      std::sort(labels.begin(), labels.end());
      labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    }
    for (size_t k = section.begin_sentence; k < section.end_sentence; ++k) {
      gold[k] = labels;
    }
  }
  return gold;
}

std::vector<size_t> RankRow(const Eigen::MatrixXd& scores, Eigen::Index row) {
  std::vector<size_t> order(static_cast<size_t>(scores.cols()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores(row, static_cast<Eigen::Index>(a)) >
           scores(row, static_cast<Eigen::Index>(b));
  });
  return order;
}

struct TrainingDoc {
  Matrix<float> inputs;
  std::vector<size_t> labels;
  std::vector<std::vector<size_t>> positives;
};

class Adam {
 public:
  Adam(const NetworkParams<float>& shape, const TrainConfig& config)
      : config_(config),
        first_(NetworkParams<float>::Zeros(shape.dims())),
        second_(NetworkParams<float>::Zeros(shape.dims())) {}

  void Step(NetworkParams<float>& params, const NetworkParams<float>& grads) {
    ++step_;
    const double b1 = config_.adam_beta1;
    const double b2 = config_.adam_beta2;
    const auto lr = static_cast<float>(
        config_.learning_rate * std::sqrt(1.0 - std::pow(b2, step_)) /
        (1.0 - std::pow(b1, step_)));
    const auto eps = static_cast<float>(config_.adam_epsilon);
    const auto fb1 = static_cast<float>(b1);
    const auto fb2 = static_cast<float>(b2);
    auto p = params.Tensors();
    auto g = grads.Tensors();
    auto m = first_.Tensors();
    auto v = second_.Tensors();
    for (size_t t = 0; t < p.size(); ++t) {
      auto pa = p[t].second->array();
      auto ga = g[t].second->array();
      auto ma = m[t].second->array();
      auto va = v[t].second->array();
      ma = fb1 * ma + (1.0f - fb1) * ga;
      va = fb2 * va + (1.0f - fb2) * ga.square();
      pa -= lr * ma / (va.sqrt() + eps);
    }
  }

 private:
  const TrainConfig& config_;
  NetworkParams<float> first_;
  NetworkParams<float> second_;
  int step_ = 0;
};

}  // namespace

Matrix<float> SectorModel::EncodeDocument(const Document& doc, OovStats* stats) const {
  Matrix<float> inputs(static_cast<Eigen::Index>(encoder.dim()),
                       static_cast<Eigen::Index>(doc.size()));
  for (size_t k = 0; k < doc.size(); ++k) {
    const auto vector = encoder.Encode(doc.sentences[k], stats);
    for (size_t i = 0; i < vector.values.size(); ++i) {
      inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          static_cast<float>(vector.values[i]);
    }
  }
  return inputs;
}

DocumentOutput SectorModel::Predict(const Document& doc) const {
  if (doc.size() == 0) throw DataError("document '" + doc.id + "' has no sentences");
  const auto pass = RunNetwork(params, EncodeDocument(doc), task);
  DocumentOutput out;
  out.scores = pass.scores.transpose().cast<double>();
  out.embedding_forward = pass.embedding_forward.transpose().cast<double>();
  out.embedding_backward = pass.embedding_backward.transpose().cast<double>();
  return out;
}

std::string SerializeModel(const SectorModel& model) {
  Writer w;
  w.Raw(kMagic, 4);
  w.U32(kModelFormatVersion);
  w.U8(model.task == Task::kSingle ? 0 : 1);
  w.U8(LossTag(model.loss));

  w.U32(static_cast<uint32_t>(model.labels.size()));
  for (const auto& label : model.labels) w.Str(label);

  const auto& config = model.encoder.config();
  w.U8(VariantTag(config.variant));
  w.U32(config.bloom_m);
  w.U32(config.bloom_k);
  w.F64(config.sif_alpha);
  w.U32(config.embedding_dim);
  w.U64(config.vocab_max_size);
  w.U64(config.vocab_min_count);

  const auto& vocab = model.encoder.vocabulary();
  w.U64(vocab.document_count());
  w.U32(static_cast<uint32_t>(vocab.size()));
  for (const auto& entry : vocab.entries()) {
    w.Str(entry.word);
    w.U64(entry.count);
    w.U64(entry.document_frequency);
  }

  const auto& direction = model.encoder.sif().direction;
  w.U32(static_cast<uint32_t>(direction.size()));
  for (double x : direction) w.F32(static_cast<float>(x));

  const auto& store = model.encoder.store();
  w.U32(static_cast<uint32_t>(store.dim()));
  w.U32(static_cast<uint32_t>(store.size()));
  for (const auto& word : store.words()) {
    w.Str(word);
    for (float x : *store.Find(word)) w.F32(x);
  }

  const auto tensors = model.params.Tensors();
  w.U32(static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, tensor] : tensors) {
    w.Str(name);
    WriteTensor(w, *tensor);
  }
  return w.Take();
}

SectorModel ParseModel(std::string_view bytes) {
  Reader r(bytes);
  const auto magic = r.Raw(4, "header");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw DataError("not a model file (bad magic)");
  }
  const uint32_t version = r.U32();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  SectorModel model;
  const uint8_t task = r.U8();
  if (task > 1) throw DataError("model file has unknown task tag");
  model.task = task == 0 ? Task::kSingle : Task::kMulti;
  model.loss = LossFromTag(r.U8());

  const uint32_t label_count = r.U32();
  r.NeedItems(label_count, 4, "labels");
  for (uint32_t i = 0; i < label_count; ++i) model.labels.push_back(r.Str());
  if (model.labels.empty()) throw DataError("model file has no labels");

  EncoderConfig config;
  config.variant = VariantFromTag(r.U8());
  config.bloom_m = r.U32();
  config.bloom_k = r.U32();
  config.sif_alpha = r.F64();
  config.embedding_dim = r.U32();
  config.vocab_max_size = r.U64();
  config.vocab_min_count = r.U64();

  const uint64_t doc_count = r.U64();
  const uint32_t vocab_size = r.U32();
  r.NeedItems(vocab_size, 20, "vocabulary");
  std::vector<Vocabulary::Entry> entries(vocab_size);
  for (auto& entry : entries) {
    entry.word = r.Str();
    entry.count = r.U64();
    entry.document_frequency = r.U64();
  }

  SifState sif;
  const uint32_t direction_size = r.U32();
  r.NeedItems(direction_size, 4, "SIF direction");
  for (uint32_t i = 0; i < direction_size; ++i) sif.direction.push_back(r.F32());

  const uint32_t store_dim = r.U32();
  const uint32_t store_size = r.U32();
  r.NeedItems(store_size, 4 + 4ull * store_dim, "embedding table");
  WordEmbeddingStore store(store_dim);
  for (uint32_t i = 0; i < store_size; ++i) {
    std::string word = r.Str();
    std::vector<float> vector(store_dim);
    for (auto& x : vector) x = r.F32();
    if (!store.Add(word, std::move(vector))) {
      throw DataError("model file repeats embedding word '" + word + "'");
    }
  }

  try {
    model.encoder = SentenceEncoder::FromParts(
        config, Vocabulary(std::move(entries), doc_count), std::move(store),
        std::move(sif));
  } catch (const UsageError& e) {
    throw DataError(std::string("model file has an invalid encoder: ") + e.what());
  }
  if (config.variant == EncoderVariant::kEmb &&
      model.encoder.sif().direction.size() != model.encoder.dim()) {
    throw DataError("model file SIF direction does not match the embedding size");
  }

  const uint32_t tensor_count = r.U32();
  std::vector<std::pair<std::string, Matrix<float>>> read;
  for (uint32_t i = 0; i < tensor_count && i < 64; ++i) {
    std::string name = r.Str();
    Matrix<float> tensor = ReadTensor(r, name);
    read.emplace_back(std::move(name), std::move(tensor));
  }
  if (!r.AtEnd()) throw DataError("model file has trailing bytes");

  NetworkDims dims;
  dims.input = model.encoder.dim();
  dims.labels = model.labels.size();
  if (read.size() != 10) throw DataError("model file has the wrong tensor count");
  dims.hidden = static_cast<size_t>(read[1].second.cols());
  dims.embedding = static_cast<size_t>(read[6].second.rows());
  model.params = NetworkParams<float>::Zeros(dims);
  auto expected = model.params.Tensors();
  for (size_t i = 0; i < expected.size(); ++i) {
    const auto& [name, tensor] = read[i];
    if (name != expected[i].first) {
      throw DataError("model file tensor " + std::to_string(i) + " is '" + name +
                      "', expected '" + expected[i].first + "'");
    }
    if (tensor.rows() != expected[i].second->rows() ||
        tensor.cols() != expected[i].second->cols()) {
      throw DataError("model file tensor '" + name + "' has shape " +
                      std::to_string(tensor.rows()) + "x" +
                      std::to_string(tensor.cols()) + ", expected " +
                      std::to_string(expected[i].second->rows()) + "x" +
                      std::to_string(expected[i].second->cols()));
    }
    *expected[i].second = tensor;
  }
  return model;
}

void SaveModel(const SectorModel& model, const std::string& path) {
  const std::string bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing model file '" + path + "'");
}

SectorModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseModel(buffer.str());
}

void TrainConfig::Validate() const {
  if (hidden < 1 || embedding < 1) throw UsageError("layer sizes must be >= 1");
  if (batch_size < 1) throw UsageError("train.batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw UsageError("train.learning_rate must be > 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw UsageError("train.dropout must be in [0, 1)");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || !(adam_epsilon > 0.0)) {
    throw UsageError("Adam parameters out of range");
  }
  if (patience < 1) throw UsageError("train.patience must be >= 1");
  if (max_epochs < 1) throw UsageError("train.max_epochs must be >= 1");
  if (heading_min_frequency < 1) {
    throw UsageError("train.heading_min_frequency must be >= 1");
  }
  if (threads < 1) throw UsageError("threads must be >= 1");
  if (!(ranking.gamma > 0.0)) throw UsageError("train.rank_gamma must be > 0");
  if (task == Task::kSingle && loss != LossKind::kCrossEntropy) {
    throw UsageError("the single-label task trains with the ce loss");
  }
  if (task == Task::kMulti && loss == LossKind::kCrossEntropy) {
    throw UsageError("the multi-label task trains with the bce or rank loss");
  }
}

std::string EpochRecord::ToJsonLine() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["train_loss"] = train_loss;
  j["validation_map"] = validation_map;
  j["timestamp"] = timestamp;
  return j.dump();
}

HeadingVocab TrainingHeadingVocab(const std::vector<Document>& train,
                                  const TrainConfig& config) {
  return HeadingVocab::FromDocuments(train, config.heading_min_frequency);
}

double SentenceMap(const SectorModel& model, const std::vector<Document>& docs) {
  double total = 0.0;
  size_t count = 0;
  for (const auto& doc : docs) {
    const auto gold = GoldIndices(model, doc);
    const auto out = model.Predict(doc);
    for (size_t k = 0; k < doc.size(); ++k) {
      if (gold[k].empty()) continue;
      const std::set<size_t> gold_set(gold[k].begin(), gold[k].end());
      total += AveragePrecision(gold_set, RankRow(out.scores, static_cast<Eigen::Index>(k)));
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

double SentenceAccuracy(const SectorModel& model, const std::vector<Document>& docs) {
  size_t correct = 0;
  size_t total = 0;
  for (const auto& doc : docs) {
    const auto gold = GoldIndices(model, doc);
    const auto out = model.Predict(doc);
    for (size_t k = 0; k < doc.size(); ++k) {
      if (gold[k].empty()) continue;
      Eigen::Index best = 0;
      out.scores.row(static_cast<Eigen::Index>(k)).maxCoeff(&best);
      if (static_cast<size_t>(best) == gold[k].front()) ++correct;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainResult Train(const std::vector<Document>& train,
                  const std::vector<Document>& validation,
                  SentenceEncoder encoder, const TrainConfig& config,
                  const EpochCallback& callback) {
  config.Validate();
  if (train.empty()) throw DataError("training split is empty");
  if (validation.empty()) throw DataError("validation split is empty");

  SectorModel model;
  model.task = config.task;
  model.loss = config.loss;
  model.encoder = std::move(encoder);

  LabelVocab label_vocab;
  HeadingVocab heading_vocab;
  if (config.task == Task::kSingle) {
    label_vocab = LabelVocab::FromDocuments(train);
    model.labels = label_vocab.labels();
  } else {
    heading_vocab = TrainingHeadingVocab(train, config);
    if (heading_vocab.size() < 2) {
      throw DataError("multi-label task needs at least 2 heading words, got " +
                      std::to_string(heading_vocab.size()));
    }
    model.labels = heading_vocab.words();
  }

  std::vector<TrainingDoc> docs;
  OovStats oov;
  for (const auto& doc : train) {
    doc.Validate();
    TrainingDoc td;
    td.inputs = model.EncodeDocument(doc, &oov);
    auto targets = MakeSentenceTargets(doc, label_vocab, heading_vocab);
    td.labels = std::move(targets.label);
    td.positives = std::move(targets.heading_words);
    docs.push_back(std::move(td));
  }

  NetworkDims dims;
  dims.input = model.encoder.dim();
  dims.hidden = config.hidden;
  dims.embedding = config.embedding;
  dims.labels = model.labels.size();
  model.params = NetworkParams<float>::Initialize(dims, config.seed);

  TrainResult result;
  result.model = model;
  double best_map = -std::numeric_limits<double>::infinity();
  size_t stale = 0;
  Adam adam(model.params, config);
  const size_t workers = config.threads;
  std::vector<NetworkParams<float>> worker_grads(
      workers, NetworkParams<float>::Zeros(dims));
  std::vector<float> worker_loss(workers);
  NetworkParams<float> grads = NetworkParams<float>::Zeros(dims);

  for (size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<size_t> order(docs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle(Rng::Mix(config.seed, epoch, 0x5bu));
    shuffle.Shuffle(order);

    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      const auto scale = static_cast<float>(1.0 / static_cast<double>(end - start));
      grads.SetZero();

      auto run_doc = [&](size_t slot, size_t doc_index) {
        const auto& td = docs[doc_index];
        worker_grads[slot].SetZero();
        const auto masks = SampleDropout<float>(
            config.hidden, static_cast<size_t>(td.inputs.cols()), config.dropout,
            Rng::Mix(config.seed ^ kDropoutStream, epoch, doc_index));
        SentenceTargetsView view;
        view.labels = td.labels;
        view.positives = &td.positives;
        worker_loss[slot] = DocumentLossAndGradient(
            model.params, td.inputs, config.task, config.loss, config.ranking,
            view, &masks, &worker_grads[slot], scale);
      };

      // Gradients are reduced in document order whatever the worker count.
      for (size_t chunk = start; chunk < end; chunk += workers) {
        const size_t chunk_end = std::min(end, chunk + workers);
        if (chunk_end - chunk == 1) {
          run_doc(0, order[chunk]);
        } else {
          std::vector<std::thread> threads;
          for (size_t i = chunk; i < chunk_end; ++i) {
            threads.emplace_back(run_doc, i - chunk, order[i]);
          }
          for (auto& t : threads) t.join();
        }
        for (size_t i = chunk; i < chunk_end; ++i) {
          grads.AddScaled(worker_grads[i - chunk], 1.0f);
          epoch_loss += worker_loss[i - chunk];
        }
      }

      if (!std::isfinite(epoch_loss) || !grads.AllFinite()) {
        throw NumericError("training diverged in epoch " + std::to_string(epoch) +
                           " (batch starting at position " + std::to_string(start) +
                           "): loss or gradient is not finite");
      }
      adam.Step(model.params, grads);
      if (!model.params.AllFinite()) {
        throw NumericError("training diverged in epoch " + std::to_string(epoch) +
                           ": parameters are not finite");
      }
    }

    const size_t batches = (order.size() + config.batch_size - 1) / config.batch_size;
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(batches);
    record.validation_map = SentenceMap(model, validation);
    record.timestamp = UtcTimestamp();
    if (record.validation_map > best_map) {
      best_map = record.validation_map;
      result.model.params = model.params;
      result.best_epoch = epoch;
      record.improved = true;
      stale = 0;
    } else {
      ++stale;
    }
    result.log.push_back(record);
    if (callback && !callback(record, model)) break;
    if (stale >= config.patience) break;
  }
  return result;
}

}  // namespace sector
