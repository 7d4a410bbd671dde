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

#include "sector/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sector/common.h"
#include "sector/random.h"

namespace sector {
namespace {

using nlohmann::json;

bool IsWordByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

bool StartsSentence(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Number of UTF-16 code units encoded by the UTF-8 bytes in [0, end). The
// published dataset stores offsets in Java string units.
std::vector<size_t> Utf16OffsetsByByte(std::string_view text) {
  std::vector<size_t> units(text.size() + 1, 0);
  size_t count = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    units[i] = count;
    const auto c = static_cast<unsigned char>(text[i]);
    if ((c & 0xC0) == 0x80) continue;  // continuation byte
    count += (c >= 0xF0) ? 2 : 1;
  }
  units[text.size()] = count;
  return units;
}

size_t ByteForUtf16Offset(const std::vector<size_t>& units, size_t offset) {
  // First byte whose unit offset reaches `offset`.
  const auto it = std::lower_bound(units.begin(), units.end(), offset);
  return static_cast<size_t>(it - units.begin());
}

template <typename T>
T RequireField(const json& record, const char* field, const std::string& id) {
  const auto it = record.find(field);
  if (it == record.end() || it->is_null()) {
    throw DataError("document '" + id + "': missing field '" + field + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError("document '" + id + "': field '" + field +
                    "' has the wrong type");
  }
}

Document ParseRecord(const json& record, size_t position,
                     const LoadOptions& options) {
  std::string id = "#" + std::to_string(position);
  if (!record.is_object()) {
    throw DataError("document " + id + ": record is not an object");
  }
  id = RequireField<std::string>(record, "id", id);

  Document doc;
  doc.id = id;
  if (const auto it = record.find("title"); it != record.end() && it->is_string()) {
    doc.title = it->get<std::string>();
  }
  const auto text = RequireField<std::string>(record, "text", id);
  const auto spans = SplitSentenceSpans(text);
  for (const auto& span : spans) {
    Sentence sentence;
    sentence.text = text.substr(span.begin, span.end - span.begin);
    sentence.tokens = Tokenize(sentence.text);
    sentence.followed_by_newline = span.followed_by_newline;
    doc.sentences.push_back(std::move(sentence));
  }
  if (doc.sentences.empty()) {
    throw DataError("document '" + id + "': text contains no sentences");
  }

  json annotations = json::array();
  if (const auto it = record.find("annotations"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw DataError("document '" + id + "': field 'annotations' is not an array");
    }
    annotations = *it;
  } else if (!options.allow_unannotated) {
    throw DataError("document '" + id + "': missing field 'annotations'");
  }

  if (annotations.empty()) {
    if (!options.allow_unannotated) {
      throw DataError("document '" + id + "': document has no sections");
    }
    doc.sections.push_back(
        SectionAnnotation{0, doc.sentences.size(), "", std::nullopt});
  } else {
    const auto units = Utf16OffsetsByByte(text);
    const size_t text_units = units.back();

    struct Pending {
      size_t begin_byte;
      std::string heading;
      std::optional<std::string> label;
    };
    std::vector<Pending> pending;
    for (const auto& annotation : annotations) {
      if (!annotation.is_object()) {
        throw DataError("document '" + id + "': annotation is not an object");
      }
      const auto begin = RequireField<int64_t>(annotation, "begin", id);
      const auto length = RequireField<int64_t>(annotation, "length", id);
      if (begin < 0 || length < 0 ||
          static_cast<size_t>(begin + length) > text_units) {
        throw DataError("document '" + id + "': annotation offsets [" +
                        std::to_string(begin) + ", " +
                        std::to_string(begin + length) +
                        ") outside text of length " + std::to_string(text_units));
      }
      Pending p;
      p.begin_byte = ByteForUtf16Offset(units, static_cast<size_t>(begin));
      p.heading = RequireField<std::string>(annotation, "sectionHeading", id);
      if (const auto it = annotation.find("sectionLabel");
          it != annotation.end() && !it->is_null()) {
        if (!it->is_string()) {
          throw DataError("document '" + id +
                          "': field 'sectionLabel' has the wrong type");
        }
        p.label = it->get<std::string>();
      }
      pending.push_back(std::move(p));
    }
    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending& a, const Pending& b) {
                       return a.begin_byte < b.begin_byte;
                     });

    std::vector<size_t> starts;
    starts.reserve(spans.size());
    for (const auto& span : spans) starts.push_back(span.begin);

    std::vector<size_t> begins;
    for (size_t a = 0; a < pending.size(); ++a) {
      const size_t b = pending[a].begin_byte;
      size_t best = 0;
      size_t best_distance = SIZE_MAX;
      for (size_t j = 0; j < starts.size(); ++j) {
        const size_t distance = starts[j] > b ? starts[j] - b : b - starts[j];
        if (distance < best_distance) {  // strict: ties keep the earlier start
          best = j;
          best_distance = distance;
        }
      }
      for (const auto& span : spans) {
        if (b > span.begin && b < span.end) {
          Warn("document '" + id + "': section boundary at offset " +
               std::to_string(b) + " falls inside a sentence; snapped to " +
               "sentence " + std::to_string(best));
          break;
        }
      }
      if (a == 0 && best != 0) {
        Warn("document '" + id + "': first section extended to sentence 0");
        best = 0;
      }
      begins.push_back(best);
    }

    for (size_t a = 0; a < pending.size(); ++a) {
      const size_t begin = begins[a];
      const size_t end =
          a + 1 < pending.size() ? begins[a + 1] : doc.sentences.size();
      if (end <= begin) {
        Warn("document '" + id + "': section '" + pending[a].heading +
             "' collapsed to zero sentences and was dropped");
        continue;
      }
      doc.sections.push_back(SectionAnnotation{begin, end, pending[a].heading,
                                               pending[a].label});
    }
  }

  if (doc.sentences.size() > options.max_sentences) {
    Warn("document '" + id + "': truncated from " +
         std::to_string(doc.sentences.size()) + " to " +
         std::to_string(options.max_sentences) + " sentences");
    doc.sentences.resize(options.max_sentences);
    std::vector<SectionAnnotation> kept;
    for (auto section : doc.sections) {
      if (section.begin_sentence >= options.max_sentences) break;
      section.end_sentence = std::min(section.end_sentence, options.max_sentences);
      kept.push_back(std::move(section));
    }
    doc.sections = std::move(kept);
  }
  doc.Validate();
  return doc;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

void Document::Validate() const {
  if (sentences.empty()) {
    throw DataError("document '" + id + "' has no sentences");
  }
  if (sections.empty()) {
    throw DataError("document '" + id + "': document has no sections");
  }
  size_t expected = 0;
  for (const auto& section : sections) {
    if (section.begin_sentence != expected ||
        section.end_sentence <= section.begin_sentence) {
      throw DataError("document '" + id +
                      "': sections do not partition the sentence range");
    }
    expected = section.end_sentence;
  }
  if (expected != sentences.size()) {
    throw DataError("document '" + id +
                    "': sections do not cover all sentences");
  }
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsWordByte(c)) {
      current.push_back(
          (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<SentenceSpan> SplitSentenceSpans(std::string_view text) {
  std::vector<SentenceSpan> raw;
  size_t start = 0;
  auto emit = [&](size_t end, bool newline) {
    raw.push_back(SentenceSpan{start, end, newline});
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      emit(i, true);
      start = i + 1;
      continue;
    }
    if (c == '.' || c == '!' || c == '?') {
      size_t j = i + 1;
      if (j >= text.size() || !IsSpace(text[j])) continue;
      while (j < text.size() && IsSpace(text[j])) ++j;
      if (j < text.size() && StartsSentence(text[j])) {
        emit(i + 1, false);
        start = i + 1;
      }
    }
  }
  emit(text.size(), false);

  std::vector<SentenceSpan> spans;
  for (auto span : raw) {
    while (span.begin < span.end &&
           (IsSpace(text[span.begin]) || text[span.begin] == '\n')) {
      ++span.begin;
    }
    while (span.end > span.begin && IsSpace(text[span.end - 1])) --span.end;
    const auto tokens = Tokenize(text.substr(span.begin, span.end - span.begin));
    if (tokens.empty()) {
      if (span.followed_by_newline && !spans.empty()) {
        spans.back().followed_by_newline = true;
      }
      continue;
    }
    spans.push_back(span);
  }
  return spans;
}

std::vector<Sentence> SplitSentences(std::string_view text) {
  std::vector<Sentence> sentences;
  for (const auto& span : SplitSentenceSpans(text)) {
    Sentence sentence;
    sentence.text = std::string(text.substr(span.begin, span.end - span.begin));
    sentence.tokens = Tokenize(sentence.text);
    sentence.followed_by_newline = span.followed_by_newline;
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

std::vector<Document> ParseWikiSection(std::string_view json_text,
                                       const LoadOptions& options) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_array()) {
    throw DataError("WikiSection file must contain a top-level array");
  }
  std::vector<Document> docs;
  docs.reserve(root.size());
  for (size_t i = 0; i < root.size(); ++i) {
    docs.push_back(ParseRecord(root[i], i, options));
  }
  return docs;
}

std::vector<Document> LoadWikiSection(const std::string& path,
                                      const LoadOptions& options) {
  return ParseWikiSection(ReadFile(path), options);
}

std::string SerializeWikiSection(const std::vector<Document>& docs) {
  json root = json::array();
  for (const auto& doc : docs) {
    std::string text;
    std::vector<size_t> sentence_begin;
    std::vector<size_t> sentence_end;
    for (const auto& sentence : doc.sentences) {
      sentence_begin.push_back(text.size());
      text += sentence.text;
      sentence_end.push_back(text.size());
      text += sentence.followed_by_newline ? "\n" : " ";
    }
    if (!text.empty() && text.back() == ' ') text.pop_back();
    const auto units = Utf16OffsetsByByte(text);

    json annotations = json::array();
    for (const auto& section : doc.sections) {
      const size_t begin = units[sentence_begin[section.begin_sentence]];
      const size_t end = units[sentence_end[section.end_sentence - 1]];
      json annotation;
      annotation["begin"] = begin;
      annotation["length"] = end - begin;
      annotation["sectionHeading"] = section.heading;
      annotation["sectionLabel"] =
          section.topic_label ? json(*section.topic_label) : json(nullptr);
      annotations.push_back(std::move(annotation));
    }
    json record;
    record["id"] = doc.id;
    record["title"] = doc.title;
    record["text"] = text;
    record["annotations"] = std::move(annotations);
    root.push_back(std::move(record));
  }
  return root.dump(1) + "\n";
}

void SaveWikiSection(const std::vector<Document>& docs,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << SerializeWikiSection(docs);
  if (!out) throw DataError("failed writing '" + path + "'");
}

LabelVocab::LabelVocab(std::vector<std::string> labels) {
  std::set<std::string> unique(labels.begin(), labels.end());
  unique.insert(std::string(kOtherLabel));
  labels_.assign(unique.begin(), unique.end());
  for (size_t i = 0; i < labels_.size(); ++i) index_[labels_[i]] = i;
}

LabelVocab LabelVocab::FromDocuments(const std::vector<Document>& docs) {
  std::vector<std::string> labels;
  for (const auto& doc : docs) {
    for (const auto& section : doc.sections) {
      labels.push_back(SectionLabel(section));
    }
  }
  return LabelVocab(std::move(labels));
}

std::optional<size_t> LabelVocab::Find(std::string_view label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

HeadingVocab::HeadingVocab(std::vector<std::string> words,
                           size_t min_frequency)
    : min_frequency_(min_frequency) {
  std::set<std::string> unique(words.begin(), words.end());
  words_.assign(unique.begin(), unique.end());
  for (size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = i;
}

HeadingVocab HeadingVocab::FromDocuments(const std::vector<Document>& docs,
                                         size_t min_frequency) {
  std::map<std::string, size_t> counts;
  for (const auto& doc : docs) {
    for (const auto& section : doc.sections) {
      const auto tokens = Tokenize(section.heading);
      const std::set<std::string> unique(tokens.begin(), tokens.end());
      for (const auto& word : unique) ++counts[word];
    }
  }
  std::vector<std::string> words;
  for (const auto& [word, count] : counts) {
    if (count >= min_frequency) words.push_back(word);
  }
  return HeadingVocab(std::move(words), min_frequency);
}

std::optional<size_t> HeadingVocab::Find(std::string_view word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<size_t> HeadingVocab::Encode(std::string_view heading) const {
  std::set<size_t> indices;
  for (const auto& token : Tokenize(heading)) {
    if (const auto index = Find(token)) indices.insert(*index);
  }
  return {indices.begin(), indices.end()};
}

std::vector<double> SentenceTargets::OneHot(size_t sentence,
                                            size_t num_labels) const {
  std::vector<double> out(num_labels, 0.0);
  out.at(label.at(sentence)) = 1.0;
  return out;
}

std::vector<double> SentenceTargets::MultiHot(size_t sentence,
                                              size_t num_words) const {
  std::vector<double> out(num_words, 0.0);
  for (size_t word : heading_words.at(sentence)) out.at(word) = 1.0;
  return out;
}

std::string SectionLabel(const SectionAnnotation& section) {
  if (section.topic_label && !section.topic_label->empty()) {
    return *section.topic_label;
  }
  return std::string(kOtherLabel);
}

SentenceTargets MakeSentenceTargets(const Document& doc,
                                    const LabelVocab& labels,
                                    const HeadingVocab& headings) {
  SentenceTargets targets;
  const bool with_labels = labels.size() > 0;
  if (with_labels) targets.label.resize(doc.size());
  targets.heading_words.resize(doc.size());
  for (const auto& section : doc.sections) {
    size_t label_index = 0;
    if (with_labels) {
      const auto label = SectionLabel(section);
      const auto found = labels.Find(label);
      if (!found) {
        throw DataError("document '" + doc.id + "': label '" + label +
                        "' is not in the label vocabulary");
      }
      label_index = *found;
    }
    const auto words = headings.Encode(section.heading);
    for (size_t k = section.begin_sentence; k < section.end_sentence; ++k) {
      if (with_labels) targets.label[k] = label_index;
      targets.heading_words[k] = words;
    }
  }
  return targets;
}

CorpusSplit SplitCorpus(std::vector<Document> docs, uint64_t seed) {
  const size_t n = docs.size();
  if (n < 10) {
    throw DataError("corpus split needs at least 10 documents, got " +
                    std::to_string(n));
  }
  std::stable_sort(docs.begin(), docs.end(),
                   [](const Document& a, const Document& b) { return a.id < b.id; });
  Rng rng(seed);
  rng.Shuffle(docs);

  const auto n_train = static_cast<size_t>(std::floor(0.7 * n + 0.5));
  const auto n_validation = static_cast<size_t>(std::floor(0.1 * n + 0.5));
  CorpusSplit split;
  split.seed = seed;
  auto it = std::make_move_iterator(docs.begin());
  split.train.assign(it, it + n_train);
  split.validation.assign(it + n_train, it + n_train + n_validation);
  split.test.assign(it + n_train + n_validation, std::make_move_iterator(docs.end()));
  return split;
}

std::vector<std::string> SyntheticTopicNames(size_t topic_count) {
  static const char* const kNames[] = {
      "history",   "geography", "economy",  "culture",   "climate",
      "transport", "education", "sport",    "politics",  "religion",
      "symptoms",  "diagnosis", "treatment", "prognosis", "epidemiology",
      "genetics"};
  constexpr size_t kNamed = sizeof(kNames) / sizeof(kNames[0]);
  std::vector<std::string> names;
  for (size_t t = 0; t < topic_count; ++t) {
    names.push_back(t < kNamed ? std::string(kNames[t])
                               : "topic" + std::to_string(t));
  }
  return names;
}

std::vector<Document> GenerateSynthetic(const SyntheticConfig& config) {
  if (config.topic_count < 2) {
    throw UsageError("synthetic corpus needs at least 2 topics");
  }
  if (config.vocab_size < config.topic_count) {
    throw UsageError("synthetic vocabulary smaller than the topic count");
  }
  if (config.min_segment_length < 1 ||
      config.min_segment_length > config.max_segment_length ||
      config.min_segments < 1 || config.min_segments > config.max_segments ||
      config.min_sentence_length < 1 ||
      config.min_sentence_length > config.max_sentence_length) {
    throw UsageError("synthetic length ranges must satisfy 1 <= min <= max");
  }

  Rng rng(config.seed);
  const auto names = SyntheticTopicNames(config.topic_count);

  std::vector<std::vector<double>> word_weights(config.topic_count);
  const size_t block = config.vocab_size / config.topic_count;
  for (size_t t = 0; t < config.topic_count; ++t) {
    if (config.disjoint_vocab) {
      word_weights[t].assign(config.vocab_size, 0.0);
      for (size_t w = t * block; w < (t + 1) * block; ++w) word_weights[t][w] = 1.0;
    } else {
      word_weights[t] = rng.Dirichlet(config.concentration, config.vocab_size);
    }
  }

  std::vector<Document> docs;
  docs.reserve(config.doc_count);
  char id_buffer[32];
  for (size_t d = 0; d < config.doc_count; ++d) {
    Document doc;
    std::snprintf(id_buffer, sizeof(id_buffer), "synth-%05zu", d);
    doc.id = id_buffer;
    doc.title = "Synthetic document " + std::to_string(d);

    const auto segments = static_cast<size_t>(
        rng.UniformRange(static_cast<int64_t>(config.min_segments),
                         static_cast<int64_t>(config.max_segments)));
    size_t previous_topic = SIZE_MAX;
    for (size_t s = 0; s < segments; ++s) {
      size_t topic;
      if (previous_topic == SIZE_MAX) {
        topic = rng.UniformInt(config.topic_count);
      } else {
        topic = rng.UniformInt(config.topic_count - 1);
        if (topic >= previous_topic) ++topic;
      }
      previous_topic = topic;

      const auto length = static_cast<size_t>(
          rng.UniformRange(static_cast<int64_t>(config.min_segment_length),
                           static_cast<int64_t>(config.max_segment_length)));
      SectionAnnotation section;
      section.begin_sentence = doc.sentences.size();
      section.heading = names[topic];
      section.topic_label = names[topic];
      for (size_t k = 0; k < length; ++k) {
        const auto words = static_cast<size_t>(
            rng.UniformRange(static_cast<int64_t>(config.min_sentence_length),
                             static_cast<int64_t>(config.max_sentence_length)));
        Sentence sentence;
        for (size_t w = 0; w < words; ++w) {
          const size_t word = rng.Categorical(word_weights[topic]);
          sentence.tokens.push_back("w" + std::to_string(word));
        }
        for (size_t w = 0; w < sentence.tokens.size(); ++w) {
          if (w > 0) sentence.text += ' ';
          sentence.text += sentence.tokens[w];
        }
        sentence.text[0] = 'W';
        sentence.text += '.';
        sentence.followed_by_newline =
            config.newline_after_segment && k + 1 == length;
        doc.sentences.push_back(std::move(sentence));
      }
      section.end_sentence = doc.sentences.size();
      doc.sections.push_back(std::move(section));
    }
    doc.Validate();
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace sector
