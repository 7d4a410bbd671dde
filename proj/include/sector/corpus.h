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

#ifndef SECTOR_CORPUS_H_
#define SECTOR_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sector {

inline constexpr std::string_view kOtherLabel = "other";

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;
  bool followed_by_newline = false;

  bool operator==(const Sentence&) const = default;
};

// Sentence span [begin, end) plus the section heading and topic label.
struct SectionAnnotation {
  size_t begin_sentence = 0;
  size_t end_sentence = 0;
  std::string heading;
  std::optional<std::string> topic_label;

  size_t size() const { return end_sentence - begin_sentence; }
  bool operator==(const SectionAnnotation&) const = default;
};

struct Document {
  std::string id;
  std::string title;
  std::vector<Sentence> sentences;
  std::vector<SectionAnnotation> sections;

  size_t size() const { return sentences.size(); }

  // Throws DataError unless sections partition [0, N) and N >= 1.
  void Validate() const;

  bool operator==(const Document&) const = default;
};

// Lowercases ASCII and splits on every character that is not an ASCII letter
// or digit. Bytes >= 0x80 are kept as word characters so UTF-8 words survive.
std::vector<std::string> Tokenize(std::string_view text);

// Character span of one sentence inside the source text.
struct SentenceSpan {
  size_t begin = 0;
  size_t end = 0;
  bool followed_by_newline = false;
};

// Splits at newline characters and at '.', '!' or '?' followed by whitespace
// and then an uppercase ASCII letter or a digit. Spans are trimmed; spans
// without tokens are dropped (their newline mark moves to the previous kept
// span). Abbreviations such as "Dr. Smith" are split as well.
std::vector<SentenceSpan> SplitSentenceSpans(std::string_view text);

std::vector<Sentence> SplitSentences(std::string_view text);

struct LoadOptions {
  // Longer documents are truncated with a warning.
  size_t max_sentences = 512;
  // Documents without annotations become a single `other` section instead of
  // failing. Used for unlabeled inference input.
  bool allow_unannotated = false;
};

// Reads the WikiSection JSON layout: an array of
// {id, title, text, annotations: [{begin, length, sectionHeading,
// sectionLabel}]}. Character offsets are snapped to the nearest sentence
// start (ties toward the earlier one).
std::vector<Document> LoadWikiSection(const std::string& path,
                                      const LoadOptions& options = {});
std::vector<Document> ParseWikiSection(std::string_view json_text,
                                       const LoadOptions& options = {});

// Inverse of ParseWikiSection for documents produced by it.
std::string SerializeWikiSection(const std::vector<Document>& docs);
void SaveWikiSection(const std::vector<Document>& docs,
                     const std::string& path);

// Single-label topic vocabulary; always contains `other`.
class LabelVocab {
 public:
  LabelVocab() = default;
  explicit LabelVocab(std::vector<std::string> labels);

  static LabelVocab FromDocuments(const std::vector<Document>& docs);

  size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(size_t index) const { return labels_.at(index); }
  std::optional<size_t> Find(std::string_view label) const;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, size_t, std::less<>> index_;
};

// Lowercase heading words seen at least `min_frequency` times (counted once
// per section) in the training headings.
class HeadingVocab {
 public:
  HeadingVocab() = default;
  HeadingVocab(std::vector<std::string> words, size_t min_frequency);

  static HeadingVocab FromDocuments(const std::vector<Document>& docs,
                                    size_t min_frequency);

  size_t size() const { return words_.size(); }
  size_t min_frequency() const { return min_frequency_; }
  const std::vector<std::string>& words() const { return words_; }
  std::optional<size_t> Find(std::string_view word) const;

  // In-vocabulary word indices of a heading, sorted and unique.
  std::vector<size_t> Encode(std::string_view heading) const;

 private:
  std::vector<std::string> words_;
  std::map<std::string, size_t, std::less<>> index_;
  size_t min_frequency_ = 1;
};

// Per-sentence targets: the one-hot label index and the multi-hot heading
// word set inherited from the enclosing section.
struct SentenceTargets {
  std::vector<size_t> label;
  std::vector<std::vector<size_t>> heading_words;

  // Dense views used by tests and the multi-label losses.
  std::vector<double> OneHot(size_t sentence, size_t num_labels) const;
  std::vector<double> MultiHot(size_t sentence, size_t num_words) const;
};

// `labels` may be empty when only heading targets are needed.
SentenceTargets MakeSentenceTargets(const Document& doc,
                                    const LabelVocab& labels,
                                    const HeadingVocab& headings);

// Label of a section as used by the single-label task.
std::string SectionLabel(const SectionAnnotation& section);

struct CorpusSplit {
  std::vector<Document> train;
  std::vector<Document> validation;
  std::vector<Document> test;
  uint64_t seed = 0;
};

// 70/10/20 split after a seeded shuffle of the id-sorted corpus.
// Train and validation sizes are round(0.7 n) and round(0.1 n).
CorpusSplit SplitCorpus(std::vector<Document> docs, uint64_t seed);

struct SyntheticConfig {
  size_t topic_count = 5;
  size_t vocab_size = 200;
  size_t doc_count = 50;
  size_t min_segment_length = 5;
  size_t max_segment_length = 10;
  size_t min_segments = 3;
  size_t max_segments = 6;
  size_t min_sentence_length = 6;
  size_t max_sentence_length = 12;
  // Dirichlet concentration of each topic's word distribution over the full
  // vocabulary. Ignored when `disjoint_vocab` is set.
  double concentration = 0.1;
  // Partition the vocabulary into one equally sized block per topic and draw
  // uniformly inside the block.
  bool disjoint_vocab = true;
  bool newline_after_segment = true;
  uint64_t seed = 1;
};

// Topic names used as headings and labels of synthetic segments.
std::vector<std::string> SyntheticTopicNames(size_t topic_count);

std::vector<Document> GenerateSynthetic(const SyntheticConfig& config);

}  // namespace sector

#endif  // SECTOR_CORPUS_H_
