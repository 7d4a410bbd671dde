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

#ifndef SECTOR_EVAL_H_
#define SECTOR_EVAL_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sector/corpus.h"

namespace sector {

struct Span {
  size_t begin = 0;
  size_t end = 0;

  size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

// Throws DataError unless `spans` partition [0, n).
void ValidatePartition(const std::vector<Span>& spans, size_t n);

struct LabeledSpan {
  Span span;
  std::string label;
};

// Starts of sections whose label differs from the preceding section's label.
// Boundary b means a new section starts at sentence b.
std::set<size_t> RelevantBoundaries(const std::vector<LabeledSpan>& sections);

// Default window: max(1, round_half_up(n / (2 * segments))).
size_t DefaultPkWindow(size_t n, size_t ref_segments);

// Fraction of probe pairs (i, i + k), i = 1..n-k, on which reference and
// hypothesis disagree about whether the two sentences share a segment.
// k == 0 selects DefaultPkWindow. Throws DataError when n <= k.
double Pk(const std::set<size_t>& ref_boundaries,
          const std::set<size_t>& hyp_boundaries, size_t n, size_t k = 0);

// For each reference span, the index of the hypothesis span with the largest
// sentence overlap (earlier span on ties).
std::vector<size_t> MatchSections(const std::vector<Span>& ref,
                                  const std::vector<Span>& hyp);

struct LabelPair {
  std::string gold;
  std::string predicted;
};

// Micro-averaged F1 with TP/FP/FN pooled over classes.
double MicroF1(const std::vector<LabelPair>& pairs);

// Counts skipped (empty-gold) items for diagnostics.
struct RankingStats {
  size_t evaluated = 0;
  size_t skipped = 0;
};

// Share of items whose top-ranked label is in the gold set. Items with an
// empty gold set are skipped.
double PrecisionAt1(const std::vector<std::set<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& rankings,
                    RankingStats* stats = nullptr);

// Mean over gold labels g of |{gold labels ranked at or above g}| / rank(g).
// Gold labels absent from the ranking count as precision 0.
double AveragePrecision(const std::set<std::string>& gold,
                        const std::vector<std::string>& ranking);
double AveragePrecision(const std::set<size_t>& gold,
                        const std::vector<size_t>& ranking);

double MeanAveragePrecision(const std::vector<std::set<std::string>>& gold,
                            const std::vector<std::vector<std::string>>& rankings,
                            RankingStats* stats = nullptr);

struct ScoredLabel {
  std::string label;
  double score = 0.0;
};

struct PredictedSection {
  Span span;
  std::vector<ScoredLabel> ranked;  // descending score
};

struct DocumentPrediction {
  std::string id;
  size_t sentence_count = 0;
  std::vector<PredictedSection> sections;
};

struct PredictionSet {
  std::string model;
  std::string strategy;
  std::string task;
  std::vector<DocumentPrediction> documents;
};

std::string SerializePredictions(const PredictionSet& predictions);
PredictionSet ParsePredictions(const std::string& json_text);

struct EvalReport {
  std::string dataset;
  std::string model;
  std::string strategy;
  double pk = 0.0;
  std::optional<double> f1;  // single-label task only
  double p_at_1 = 0.0;
  double map = 0.0;
  size_t n_documents = 0;
  size_t n_sections = 0;
  size_t pk_documents = 0;       // documents long enough for a Pk window
  size_t skipped_sections = 0;   // empty gold sets

  std::string ToJson() const;
  std::string ToTable() const;
};

// Pk is averaged uniformly over documents; classification metrics are pooled
// over the matched sections of all documents. For the multi-label task the
// gold bag of a section is its heading tokens that occur in the predicted
// ranking, and F1 is not reported.
EvalReport EvaluateRun(const std::vector<Document>& gold,
                       const PredictionSet& predictions, const std::string& task,
                       const std::string& dataset = "");

}  // namespace sector

#endif  // SECTOR_EVAL_H_
