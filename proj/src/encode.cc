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

#include "sector/encode.h"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sector/common.h"
#include "sector/hash.h"

namespace sector {

std::string_view EncoderVariantName(EncoderVariant variant) {
  switch (variant) {
    case EncoderVariant::kBow: return "bow";
    case EncoderVariant::kBloom: return "bloom";
    case EncoderVariant::kEmb: return "emb";
  }
  return "unknown";
}

EncoderVariant ParseEncoderVariant(std::string_view name) {
  if (name == "bow") return EncoderVariant::kBow;
  if (name == "bloom") return EncoderVariant::kBloom;
  if (name == "emb") return EncoderVariant::kEmb;
  throw UsageError("unknown encoder variant '" + std::string(name) +
                   "' (expected bow, bloom or emb)");
}

void EncoderConfig::Validate() const {
  if (bloom_m < 1) throw UsageError("encoder.bloom_m must be >= 1");
  if (bloom_k < 1) throw UsageError("encoder.bloom_k must be >= 1");
  if (!(sif_alpha > 0.0)) throw UsageError("encoder.sif_alpha must be > 0");
  if (vocab_max_size < 1) throw UsageError("encoder.vocab_max_size must be >= 1");
}

Vocabulary::Vocabulary(std::vector<Entry> entries, uint64_t document_count)
    : entries_(std::move(entries)), document_count_(document_count) {
  uint64_t total = 0;
  for (const auto& e : entries_) total += e.count;
  idf_.resize(entries_.size());
  probability_.resize(entries_.size());
  for (size_t i = 0; i < entries_.size(); ++i) {
    index_[entries_[i].word] = i;
    idf_[i] = std::log((1.0 + static_cast<double>(document_count_)) /
                       (1.0 + static_cast<double>(entries_[i].document_frequency))) +
              1.0;
    probability_[i] = total == 0 ? 0.0
                                 : static_cast<double>(entries_[i].count) /
                                       static_cast<double>(total);
  }
}

std::optional<size_t> Vocabulary::Find(std::string_view word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary FitVocabulary(const std::vector<Document>& train_docs,
                         size_t max_size, uint64_t min_count) {
  if (train_docs.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");
  std::map<std::string, Vocabulary::Entry> stats;
  uint64_t tokens = 0;
  for (const auto& doc : train_docs) {
    std::map<std::string, bool> seen;
    for (const auto& sentence : doc.sentences) {
      for (const auto& token : sentence.tokens) {
        auto& entry = stats[token];
        entry.word = token;
        ++entry.count;
        ++tokens;
        if (!seen[token]) {
          seen[token] = true;
          ++entry.document_frequency;
        }
      }
    }
  }
  if (tokens == 0) throw DataError("cannot fit a vocabulary on an empty corpus");
  std::vector<Vocabulary::Entry> entries;
  for (auto& [word, entry] : stats) {
    if (entry.count >= min_count) entries.push_back(std::move(entry));
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  if (entries.size() > max_size) entries.resize(max_size);
  return Vocabulary(std::move(entries), train_docs.size());
}

SentenceVector EncodeBow(const Sentence& sentence, const Vocabulary& vocab,
                         OovStats* stats) {
  SentenceVector out;
  out.encoder = EncoderVariant::kBow;
  out.values.assign(vocab.size(), 0.0);
  for (const auto& token : sentence.tokens) {
    const auto index = vocab.Find(token);
    if (stats) ++stats->tokens;
    if (!index) {
      if (stats) ++stats->oov;
      continue;
    }
    out.values[*index] += vocab.Idf(*index);
  }
  return out;
}

std::vector<uint32_t> BloomPositions(std::string_view token, uint32_t m,
                                     uint32_t k) {
  const auto [h1, h2] = Murmur3_128(token, 0);
  std::vector<uint32_t> positions(k);
  for (uint32_t i = 0; i < k; ++i) {
    positions[i] = static_cast<uint32_t>((h1 + uint64_t{i} * h2) % m);
  }
  return positions;
}

SentenceVector EncodeBloom(const Sentence& sentence, uint32_t m, uint32_t k) {
  SentenceVector out;
  out.encoder = EncoderVariant::kBloom;
  out.values.assign(m, 0.0);
  for (const auto& token : sentence.tokens) {
    for (uint32_t position : BloomPositions(token, m, k)) out.values[position] += 1.0;
  }
  return out;
}

bool WordEmbeddingStore::Add(std::string word, std::vector<float> vector) {
  if (vector.size() != dim_) {
    throw DataError("embedding for '" + word + "' has dimension " +
                    std::to_string(vector.size()) + ", expected " +
                    std::to_string(dim_));
  }
  if (index_.count(word)) return false;
  index_[word] = words_.size();
  words_.push_back(std::move(word));
  vectors_.push_back(std::move(vector));
  return true;
}

const std::vector<float>* WordEmbeddingStore::Find(std::string_view word) const {
  const auto it = index_.find(word);
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

WordEmbeddingStore WordEmbeddingStore::Parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_number = 1;
  if (!std::getline(in, line)) throw DataError("embedding file is empty");
  long long declared_count = 0;
  long long declared_dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> declared_count >> declared_dim) || declared_dim < 1 ||
        declared_count < 0) {
      throw DataError("embedding file line 1: expected '<count> <dim>' header");
    }
  }
  WordEmbeddingStore store(static_cast<size_t>(declared_dim));
  size_t duplicates = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<float> vector;
    std::string number;
    while (fields >> number) {
      float value = 0.0f;
      const auto result =
          std::from_chars(number.data(), number.data() + number.size(), value);
      if (result.ec != std::errc() || result.ptr != number.data() + number.size()) {
        throw DataError("embedding file line " + std::to_string(line_number) +
                        ": malformed number '" + number + "'");
      }
      vector.push_back(value);
    }
    if (vector.size() != store.dim()) {
      throw DataError("embedding file line " + std::to_string(line_number) +
                      ": dimension " + std::to_string(vector.size()) +
                      " does not match declared " + std::to_string(store.dim()));
    }
    if (!store.Add(word, std::move(vector))) ++duplicates;
  }
  if (duplicates > 0) {
    Warn("embedding file: " + std::to_string(duplicates) +
         " duplicate words ignored (first occurrence kept)");
  }
  if (static_cast<long long>(store.size() + duplicates) != declared_count) {
    Warn("embedding file declares " + std::to_string(declared_count) +
         " words but contains " + std::to_string(store.size() + duplicates));
  }
  return store;
}

WordEmbeddingStore WordEmbeddingStore::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

std::string WordEmbeddingStore::Serialize() const {
  std::string out = std::to_string(words_.size()) + " " + std::to_string(dim_) + "\n";
  char buf[32];
  for (size_t i = 0; i < words_.size(); ++i) {
    out += words_[i];
    for (float value : vectors_[i]) {
      // Shortest representation that round-trips.
      const auto result = std::to_chars(buf, buf + sizeof(buf), value);
      out += ' ';
      out.append(buf, result.ptr);
    }
    out += '\n';
  }
  return out;
}

void WordEmbeddingStore::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << Serialize();
}

std::vector<double> SifAverage(const Sentence& sentence,
                               const WordEmbeddingStore& store,
                               const Vocabulary& vocab, double alpha,
                               OovStats* stats) {
  std::vector<double> sum(store.dim(), 0.0);
  size_t used = 0;
  for (const auto& token : sentence.tokens) {
    if (stats) ++stats->tokens;
    const auto* vector = store.Find(token);
    if (vector == nullptr) {
      if (stats) ++stats->oov;
      continue;
    }
    const auto index = vocab.Find(token);
    const double p = index ? vocab.Probability(*index) : 0.0;
    const double weight = alpha / (alpha + p);
    for (size_t j = 0; j < sum.size(); ++j) sum[j] += weight * (*vector)[j];
    ++used;
  }
  if (used > 0) {
    for (auto& value : sum) value /= static_cast<double>(used);
  }
  return sum;
}

SifState FitSif(const std::vector<Sentence>& train_sentences,
                const WordEmbeddingStore& store, const Vocabulary& vocab,
                double alpha) {
  if (train_sentences.size() < 2) {
    throw DataError("SIF fitting needs at least 2 sentences");
  }
  const auto n = static_cast<Eigen::Index>(train_sentences.size());
  const auto d = static_cast<Eigen::Index>(store.dim());
  Eigen::MatrixXd stacked(n, d);
  bool any_nonzero = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto average =
        SifAverage(train_sentences[static_cast<size_t>(i)], store, vocab, alpha);
    for (Eigen::Index j = 0; j < d; ++j) {
      stacked(i, j) = average[static_cast<size_t>(j)];
      any_nonzero = any_nonzero || average[static_cast<size_t>(j)] != 0.0;
    }
  }
  if (!any_nonzero) {
    throw DataError("SIF fitting: every training sentence encodes to zero");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinV);
  Eigen::VectorXd u = svd.matrixV().col(0);
  Eigen::Index argmax = 0;
  for (Eigen::Index j = 1; j < d; ++j) {
    if (std::abs(u(j)) > std::abs(u(argmax))) argmax = j;
  }
  if (u(argmax) < 0) u = -u;

  SifState state;
  state.direction.resize(static_cast<size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    state.direction[static_cast<size_t>(j)] = static_cast<float>(u(j));
  }
  return state;
}

SentenceVector EncodeSif(const Sentence& sentence,
                         const WordEmbeddingStore& store,
                         const Vocabulary& vocab, double alpha,
                         const SifState& state, OovStats* stats) {
  SentenceVector out;
  out.encoder = EncoderVariant::kEmb;
  out.values = SifAverage(sentence, store, vocab, alpha, stats);
  const auto& u = state.direction;
  if (u.size() != out.values.size()) {
    throw DataError("SIF direction dimension does not match the embeddings");
  }
  double uu = 0.0;
  double uv = 0.0;
  for (size_t j = 0; j < u.size(); ++j) {
    uu += u[j] * u[j];
    uv += u[j] * out.values[j];
  }
  if (uu > 0.0) {
    const double scale = uv / uu;
    for (size_t j = 0; j < u.size(); ++j) out.values[j] -= scale * u[j];
  }
  return out;
}

SentenceEncoder SentenceEncoder::Fit(const EncoderConfig& config,
                                     const std::vector<Document>& train_docs,
                                     const WordEmbeddingStore* store) {
  config.Validate();
  SentenceEncoder encoder;
  encoder.config_ = config;
  encoder.vocab_ =
      FitVocabulary(train_docs, config.vocab_max_size, config.vocab_min_count);
  if (config.variant == EncoderVariant::kEmb) {
    if (store == nullptr) {
      throw UsageError("encoder variant 'emb' needs a word embedding file");
    }
    WordEmbeddingStore restricted(store->dim());
    for (const auto& entry : encoder.vocab_.entries()) {
      if (const auto* vector = store->Find(entry.word)) {
        restricted.Add(entry.word, *vector);
      }
    }
    if (restricted.size() == 0) {
      throw DataError("no vocabulary word has a pre-trained embedding");
    }
    encoder.config_.embedding_dim = static_cast<uint32_t>(store->dim());
    encoder.store_ = std::move(restricted);
    std::vector<Sentence> sentences;
    for (const auto& doc : train_docs) {
      sentences.insert(sentences.end(), doc.sentences.begin(), doc.sentences.end());
    }
    encoder.sif_ = FitSif(sentences, encoder.store_, encoder.vocab_,
                          config.sif_alpha);
  }
  return encoder;
}

SentenceEncoder SentenceEncoder::FromParts(EncoderConfig config, Vocabulary vocab,
                                           WordEmbeddingStore store, SifState sif) {
  config.Validate();
  SentenceEncoder encoder;
  encoder.config_ = config;
  encoder.vocab_ = std::move(vocab);
  encoder.store_ = std::move(store);
  encoder.sif_ = std::move(sif);
  return encoder;
}

size_t SentenceEncoder::dim() const {
  switch (config_.variant) {
    case EncoderVariant::kBow: return vocab_.size();
    case EncoderVariant::kBloom: return config_.bloom_m;
    case EncoderVariant::kEmb: return store_.dim();
  }
  return 0;
}

SentenceVector SentenceEncoder::Encode(const Sentence& sentence,
                                       OovStats* stats) const {
  switch (config_.variant) {
    case EncoderVariant::kBow:
      return EncodeBow(sentence, vocab_, stats);
    case EncoderVariant::kBloom:
      return EncodeBloom(sentence, config_.bloom_m, config_.bloom_k);
    case EncoderVariant::kEmb:
      return EncodeSif(sentence, store_, vocab_, config_.sif_alpha, sif_, stats);
  }
  throw UsageError("unknown encoder variant");
}

}  // namespace sector
