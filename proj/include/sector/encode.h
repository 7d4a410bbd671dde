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

#ifndef SECTOR_ENCODE_H_
#define SECTOR_ENCODE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sector/corpus.h"

namespace sector {

enum class EncoderVariant { kBow, kBloom, kEmb };

std::string_view EncoderVariantName(EncoderVariant variant);
EncoderVariant ParseEncoderVariant(std::string_view name);

struct EncoderConfig {
  EncoderVariant variant = EncoderVariant::kBloom;
  uint32_t bloom_m = 4096;
  uint32_t bloom_k = 5;
  double sif_alpha = 1e-4;
  uint32_t embedding_dim = 256;
  size_t vocab_max_size = 100000;
  uint64_t vocab_min_count = 1;

  void Validate() const;
};

// Training-corpus word statistics. Words are ranked by descending frequency
// with ties broken alphabetically; index == rank.
class Vocabulary {
 public:
  struct Entry {
    std::string word;
    uint64_t count = 0;
    uint64_t document_frequency = 0;
  };

  Vocabulary() = default;
  Vocabulary(std::vector<Entry> entries, uint64_t document_count);

  size_t size() const { return entries_.size(); }
  uint64_t document_count() const { return document_count_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::optional<size_t> Find(std::string_view word) const;

  // ln((1 + |D|) / (1 + df)) + 1.
  double Idf(size_t index) const { return idf_[index]; }
  // count(w) / sum of counts of kept words.
  double Probability(size_t index) const { return probability_[index]; }

 private:
  std::vector<Entry> entries_;
  uint64_t document_count_ = 0;
  std::map<std::string, size_t, std::less<>> index_;
  std::vector<double> idf_;
  std::vector<double> probability_;
};

Vocabulary FitVocabulary(const std::vector<Document>& train_docs,
                         size_t max_size, uint64_t min_count);

struct SentenceVector {
  std::vector<double> values;
  EncoderVariant encoder = EncoderVariant::kBow;
};

// Running tally of tokens skipped as out-of-vocabulary.
struct OovStats {
  uint64_t tokens = 0;
  uint64_t oov = 0;
};

// Sum over tokens of idf(w) at the word's index.
SentenceVector EncodeBow(const Sentence& sentence, const Vocabulary& vocab,
                         OovStats* stats = nullptr);

// Bloom bucket positions of one token: (h1 + i h2) mod m for i in [0, k),
// with (h1, h2) the 128-bit MurmurHash3 of the token bytes (seed 0).
std::vector<uint32_t> BloomPositions(std::string_view token, uint32_t m,
                                     uint32_t k);

SentenceVector EncodeBloom(const Sentence& sentence, uint32_t m, uint32_t k);

class WordEmbeddingStore {
 public:
  WordEmbeddingStore() = default;
  explicit WordEmbeddingStore(size_t dim) : dim_(dim) {}

  size_t dim() const { return dim_; }
  size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // Returns false (and keeps the first vector) when the word already exists.
  bool Add(std::string word, std::vector<float> vector);
  const std::vector<float>* Find(std::string_view word) const;

  // word2vec text format: "count dim" header, then "word v1 ... vd".
  static WordEmbeddingStore Parse(std::string_view text);
  static WordEmbeddingStore Load(const std::string& path);
  std::string Serialize() const;
  void Save(const std::string& path) const;

 private:
  size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<std::vector<float>> vectors_;
  std::map<std::string, size_t, std::less<>> index_;
};

// Probability-weighted average of in-store word vectors:
// (1/n) sum (alpha / (alpha + p(w))) v_w over the n in-store tokens. Words
// absent from the vocabulary get p(w) = 0.
std::vector<double> SifAverage(const Sentence& sentence,
                               const WordEmbeddingStore& store,
                               const Vocabulary& vocab, double alpha,
                               OovStats* stats = nullptr);

struct SifState {
  // First right-singular vector of the stacked sentence averages, rounded to
  // float precision so that it survives the model container unchanged.
  std::vector<double> direction;
};

SifState FitSif(const std::vector<Sentence>& train_sentences,
                const WordEmbeddingStore& store, const Vocabulary& vocab,
                double alpha);

// v_s - u (u.v_s) / (u.u).
SentenceVector EncodeSif(const Sentence& sentence,
                         const WordEmbeddingStore& store,
                         const Vocabulary& vocab, double alpha,
                         const SifState& state, OovStats* stats = nullptr);

// Everything needed to turn a sentence into the network input. Immutable after
// fitting.
class SentenceEncoder {
 public:
  SentenceEncoder() = default;

  // Fits vocabulary (and SIF state for kEmb) on the training documents.
  // `store` is required for kEmb and is restricted to vocabulary words.
  static SentenceEncoder Fit(const EncoderConfig& config,
                             const std::vector<Document>& train_docs,
                             const WordEmbeddingStore* store = nullptr);

  static SentenceEncoder FromParts(EncoderConfig config, Vocabulary vocab,
                                   WordEmbeddingStore store, SifState sif);

  const EncoderConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const WordEmbeddingStore& store() const { return store_; }
  const SifState& sif() const { return sif_; }

  size_t dim() const;
  SentenceVector Encode(const Sentence& sentence, OovStats* stats = nullptr) const;

 private:
  EncoderConfig config_;
  Vocabulary vocab_;
  WordEmbeddingStore store_;
  SifState sif_;
};

}  // namespace sector

#endif  // SECTOR_ENCODE_H_
