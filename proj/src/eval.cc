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

#include "sector/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"
#include "sector/common.h"

namespace sector {
namespace {

using nlohmann::json;

std::string HeadingKey(const std::string& heading) {
  std::string key;
  for (const auto& token : Tokenize(heading)) {
    if (!key.empty()) key += ' ';
    key += token;
  }
  return key;
}

template <typename Label>
double AveragePrecisionImpl(const std::set<Label>& gold,
                            const std::vector<Label>& ranking) {
  if (gold.empty()) return 0.0;
  double sum = 0.0;
  size_t hits = 0;
  for (size_t rank = 0; rank < ranking.size(); ++rank) {
    if (gold.count(ranking[rank])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return sum / static_cast<double>(gold.size());
}

}  // namespace

void ValidatePartition(const std::vector<Span>& spans, size_t n) {
  size_t expected = 0;
  for (const auto& span : spans) {
    if (span.begin != expected || span.end <= span.begin) {
      throw DataError("spans do not partition the sentence range");
    }
    expected = span.end;
  }
  if (expected != n) throw DataError("spans do not cover all sentences");
}

std::set<size_t> RelevantBoundaries(const std::vector<LabeledSpan>& sections) {
  std::set<size_t> boundaries;
  for (size_t i = 1; i < sections.size(); ++i) {
    if (sections[i].label != sections[i - 1].label) {
      boundaries.insert(sections[i].span.begin);
    }
  }
  return boundaries;
}

size_t DefaultPkWindow(size_t n, size_t ref_segments) {
  if (ref_segments == 0) ref_segments = 1;
  const double half_mean =
      static_cast<double>(n) / (2.0 * static_cast<double>(ref_segments));
  return std::max<size_t>(1, static_cast<size_t>(std::floor(half_mean + 0.5)));
}

double Pk(const std::set<size_t>& ref_boundaries,
          const std::set<size_t>& hyp_boundaries, size_t n, size_t k) {
  if (k == 0) k = DefaultPkWindow(n, ref_boundaries.size() + 1);
  if (n <= k) {
    throw DataError("Pk window " + std::to_string(k) +
                    " is not smaller than the document length " + std::to_string(n));
  }
  // Prefix counts of boundaries: count[s] = boundaries with start <= s.
  auto prefix = [n](const std::set<size_t>& boundaries) {
    std::vector<size_t> count(n, 0);
    for (size_t b : boundaries) {
      if (b < n) ++count[b];
    }
    for (size_t s = 1; s < n; ++s) count[s] += count[s - 1];
    return count;
  };
  const auto ref = prefix(ref_boundaries);
  const auto hyp = prefix(hyp_boundaries);
  size_t disagreements = 0;
  for (size_t i = 0; i + k < n; ++i) {
    // Boundaries strictly between sentences i and i + k start in (i, i + k].
    const bool ref_same = ref[i + k] == ref[i];
    const bool hyp_same = hyp[i + k] == hyp[i];
    if (ref_same != hyp_same) ++disagreements;
  }
  return static_cast<double>(disagreements) / static_cast<double>(n - k);
}

std::vector<size_t> MatchSections(const std::vector<Span>& ref,
                                  const std::vector<Span>& hyp) {
  std::vector<size_t> matches;
  matches.reserve(ref.size());
  for (const auto& r : ref) {
    size_t best = 0;
    size_t best_overlap = 0;
    for (size_t h = 0; h < hyp.size(); ++h) {
      const size_t lo = std::max(r.begin, hyp[h].begin);
      const size_t hi = std::min(r.end, hyp[h].end);
      const size_t overlap = hi > lo ? hi - lo : 0;
      if (overlap > best_overlap) {
        best = h;
        best_overlap = overlap;
      }
    }
    matches.push_back(best);
  }
  return matches;
}

double MicroF1(const std::vector<LabelPair>& pairs) {
  std::map<std::string, size_t> tp, fp, fn;
  for (const auto& pair : pairs) {
    if (pair.gold == pair.predicted) {
      ++tp[pair.gold];
    } else {
      ++fp[pair.predicted];
      ++fn[pair.gold];
    }
  }
  size_t total_tp = 0, total_fp = 0, total_fn = 0;
  for (const auto& [label, count] : tp) total_tp += count;
  for (const auto& [label, count] : fp) total_fp += count;
  for (const auto& [label, count] : fn) total_fn += count;
  if (total_tp == 0) return 0.0;
  const double precision =
      static_cast<double>(total_tp) / static_cast<double>(total_tp + total_fp);
  const double recall =
      static_cast<double>(total_tp) / static_cast<double>(total_tp + total_fn);
  return 2.0 * precision * recall / (precision + recall);
}

double PrecisionAt1(const std::vector<std::set<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& rankings,
                    RankingStats* stats) {
  if (gold.size() != rankings.size()) {
    throw DataError("gold and ranking counts differ");
  }
  size_t evaluated = 0;
  size_t hits = 0;
  size_t skipped = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].empty()) {
      ++skipped;
      continue;
    }
    ++evaluated;
    if (!rankings[i].empty() && gold[i].count(rankings[i].front())) ++hits;
  }
  if (stats) *stats = {evaluated, skipped};
  return evaluated == 0 ? 0.0
                        : static_cast<double>(hits) / static_cast<double>(evaluated);
}

double AveragePrecision(const std::set<std::string>& gold,
                        const std::vector<std::string>& ranking) {
  return AveragePrecisionImpl(gold, ranking);
}

double AveragePrecision(const std::set<size_t>& gold,
                        const std::vector<size_t>& ranking) {
  return AveragePrecisionImpl(gold, ranking);
}

double MeanAveragePrecision(const std::vector<std::set<std::string>>& gold,
                            const std::vector<std::vector<std::string>>& rankings,
                            RankingStats* stats) {
  if (gold.size() != rankings.size()) {
    throw DataError("gold and ranking counts differ");
  }
  double sum = 0.0;
  size_t evaluated = 0;
  size_t skipped = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].empty()) {
      ++skipped;
      continue;
    }
    sum += AveragePrecision(gold[i], rankings[i]);
    ++evaluated;
  }
  if (stats) *stats = {evaluated, skipped};
  return evaluated == 0 ? 0.0 : sum / static_cast<double>(evaluated);
}

std::string SerializePredictions(const PredictionSet& predictions) {
  json root;
  root["model"] = predictions.model;
  root["strategy"] = predictions.strategy;
  root["task"] = predictions.task;
  json documents = json::array();
  for (const auto& doc : predictions.documents) {
    json d;
    d["id"] = doc.id;
    d["n_sentences"] = doc.sentence_count;
    json sections = json::array();
    for (const auto& section : doc.sections) {
      json s;
      s["begin"] = section.span.begin;
      s["end"] = section.span.end;
      json labels = json::array();
      for (const auto& scored : section.ranked) {
        labels.push_back({{"label", scored.label}, {"score", scored.score}});
      }
      s["labels"] = std::move(labels);
      sections.push_back(std::move(s));
    }
    d["sections"] = std::move(sections);
    documents.push_back(std::move(d));
  }
  root["documents"] = std::move(documents);
  return root.dump(1) + "\n";
}

PredictionSet ParsePredictions(const std::string& json_text) {
  PredictionSet out;
  try {
    const json root = json::parse(json_text);
    out.model = root.value("model", "");
    out.strategy = root.value("strategy", "");
    out.task = root.value("task", "");
    for (const auto& d : root.at("documents")) {
      DocumentPrediction doc;
      doc.id = d.at("id").get<std::string>();
      doc.sentence_count = d.at("n_sentences").get<size_t>();
      for (const auto& s : d.at("sections")) {
        PredictedSection section;
        section.span = {s.at("begin").get<size_t>(), s.at("end").get<size_t>()};
        for (const auto& l : s.at("labels")) {
          section.ranked.push_back(
              {l.at("label").get<std::string>(), l.at("score").get<double>()});
        }
        doc.sections.push_back(std::move(section));
      }
      out.documents.push_back(std::move(doc));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed predictions file: ") + e.what());
  }
  return out;
}

EvalReport EvaluateRun(const std::vector<Document>& gold,
                       const PredictionSet& predictions, const std::string& task,
                       const std::string& dataset) {
  if (task != "single" && task != "multi") {
    throw UsageError("unknown task '" + task + "'");
  }
  const bool single = task == "single";
  std::map<std::string, const DocumentPrediction*> by_id;
  for (const auto& doc : predictions.documents) by_id[doc.id] = &doc;

  std::vector<std::string> missing;
  for (const auto& doc : gold) {
    if (!by_id.count(doc.id)) missing.push_back(doc.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw DataError("missing prediction for document(s): " + list);
  }

  EvalReport report;
  report.dataset = dataset;
  report.model = predictions.model;
  report.strategy = predictions.strategy;
  report.n_documents = gold.size();

  double pk_sum = 0.0;
  std::vector<LabelPair> pairs;
  std::vector<std::set<std::string>> gold_sets;
  std::vector<std::vector<std::string>> rankings;

  for (const auto& doc : gold) {
    const auto& prediction = *by_id[doc.id];
    const size_t n = doc.size();
    if (prediction.sentence_count != n) {
      throw DataError("document '" + doc.id + "': prediction covers " +
                      std::to_string(prediction.sentence_count) +
                      " sentences, gold has " + std::to_string(n));
    }
    std::vector<Span> hyp_spans;
    std::vector<LabeledSpan> hyp_labeled;
    for (const auto& section : prediction.sections) {
      hyp_spans.push_back(section.span);
      hyp_labeled.push_back(
          {section.span, section.ranked.empty() ? "" : section.ranked.front().label});
    }
    ValidatePartition(hyp_spans, n);

    std::vector<Span> ref_spans;
    std::vector<LabeledSpan> ref_labeled;
    for (const auto& section : doc.sections) {
      const Span span{section.begin_sentence, section.end_sentence};
      ref_spans.push_back(span);
      ref_labeled.push_back(
          {span, single ? SectionLabel(section) : HeadingKey(section.heading)});
    }

    const auto ref_boundaries = RelevantBoundaries(ref_labeled);
    const size_t k = DefaultPkWindow(n, ref_boundaries.size() + 1);
    if (n > k) {
      pk_sum += Pk(ref_boundaries, RelevantBoundaries(hyp_labeled), n, k);
      ++report.pk_documents;
    }

    const auto matches = MatchSections(ref_spans, hyp_spans);
    for (size_t r = 0; r < doc.sections.size(); ++r) {
      const auto& hyp = prediction.sections[matches[r]];
      std::vector<std::string> ranking;
      for (const auto& scored : hyp.ranked) ranking.push_back(scored.label);
      std::set<std::string> gold_set;
      if (single) {
        gold_set.insert(SectionLabel(doc.sections[r]));
        pairs.push_back({SectionLabel(doc.sections[r]),
                         ranking.empty() ? "" : ranking.front()});
      } else {
        const std::set<std::string> in_ranking(ranking.begin(), ranking.end());
        for (const auto& token : Tokenize(doc.sections[r].heading)) {
          if (in_ranking.count(token)) gold_set.insert(token);
        }
      }
      gold_sets.push_back(std::move(gold_set));
      rankings.push_back(std::move(ranking));
    }
  }

  report.n_sections = gold_sets.size();
  report.pk = report.pk_documents == 0
                  ? 0.0
                  : pk_sum / static_cast<double>(report.pk_documents);
  if (single) report.f1 = MicroF1(pairs);
  RankingStats stats;
  report.p_at_1 = PrecisionAt1(gold_sets, rankings, &stats);
  report.map = MeanAveragePrecision(gold_sets, rankings);
  report.skipped_sections = stats.skipped;
  return report;
}

std::string EvalReport::ToJson() const {
  json out;
  out["dataset"] = dataset;
  out["model"] = model;
  out["strategy"] = strategy;
  out["pk"] = pk;
  out["f1"] = f1 ? json(*f1) : json(nullptr);
  out["p_at_1"] = p_at_1;
  out["map"] = map;
  out["n_documents"] = n_documents;
  return out.dump(2) + "\n";
}

std::string EvalReport::ToTable() const {
  auto pct = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
    return std::string(buf);
  };
  auto cell = [](const std::string& s, size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
  };
  const std::string header_dataset = dataset.empty() ? "dataset" : dataset;
  std::ostringstream out;
  out << cell("model configuration", 28) << cell("segm.", 7) << cell("Pk", 7)
      << cell("F1", 7) << cell("P@1", 7) << cell("MAP", 7) << "n\n";
  out << cell(model.empty() ? header_dataset : model, 28) << cell(strategy, 7)
      << cell(pct(pk), 7) << cell(f1 ? pct(*f1) : "n/a", 7) << cell(pct(p_at_1), 7)
      << cell(pct(map), 7) << n_documents << "\n";
  return out.str();
}

}  // namespace sector
