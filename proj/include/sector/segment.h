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

#ifndef SECTOR_SEGMENT_H_
#define SECTOR_SEGMENT_H_

#include <Eigen/Dense>

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sector/eval.h"

namespace sector {

enum class SegmentStrategy { kNewline, kMaxLabel, kEmd, kBemd };

std::string_view StrategyName(SegmentStrategy strategy);
SegmentStrategy ParseStrategy(std::string_view name);

// Which pair of backward embeddings enters the bidirectional deviation at
// sentence k. kTransition pairs (k-1, k) so that both directions measure the
// same sentence transition; kLiteral pairs (k, k+1).
enum class BemdPairing { kTransition, kLiteral };

struct SegConfig {
  size_t pca_dims = 16;
  double gaussian_sigma = 2.5;
  SegmentStrategy strategy = SegmentStrategy::kBemd;
  BemdPairing bemd_pairing = BemdPairing::kTransition;

  void Validate() const;
};

// Rows are sentences.
using EmbeddingMatrix = Eigen::MatrixXd;

// Splits after every sentence flagged with a newline, then repeatedly merges
// adjacent spans whose averaged top label agrees until nothing changes.
// Without any newline mark the whole document is one span (with a warning).
std::vector<Span> SegmentNewline(const std::vector<bool>& followed_by_newline,
                                 const Eigen::MatrixXd& distributions);

// Top-2 label indices per sentence (descending score, ties to lower index).
std::vector<std::array<size_t, 2>> TopTwoLabels(const Eigen::MatrixXd& distributions);

// Starts from one span per sentence and merges adjacent spans whose top-2
// label sets intersect; a merged span carries the union of its members' sets.
std::vector<Span> SegmentMaxLabel(const std::vector<std::set<size_t>>& top_labels);

// Projection of E onto its top-D right-singular vectors (no centering). Each
// vector's largest-magnitude entry is made positive. Columns beyond the rank
// are zero.
EmbeddingMatrix PcaProject(const EmbeddingMatrix& embeddings, size_t dims);

// Gaussian smoothing along the sentence axis, kernel radius ceil(3 sigma),
// half-sample symmetric padding (a b c | c b a ...).
EmbeddingMatrix GaussianSmooth(const EmbeddingMatrix& series, double sigma);

// 1 - cos(a, b); 0 when either vector has zero norm.
double CosineDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// PCA, smoothing, then d_k = 1 - cos(e'_{k-1}, e'_k) with d_0 = 0.
std::vector<double> DeviationEmd(const EmbeddingMatrix& embeddings,
                                 const SegConfig& config);

// Geometric mean of forward and backward smoothed-embedding movement.
std::vector<double> DeviationBemd(const EmbeddingMatrix& forward,
                                  const EmbeddingMatrix& backward,
                                  const SegConfig& config);

// Indices k with d_{k-1} < d_k > d_{k+1}. A plateau d_{k-1} < d_k = ... = d_j
// > d_{j+1} yields its leftmost index k. Boundary k starts a new section.
std::vector<size_t> FindBoundaries(const std::vector<double>& deviation);

std::vector<Span> SpansFromBoundaries(const std::vector<size_t>& boundaries,
                                      size_t n);

struct SectionPrediction {
  Span span;
  std::vector<double> distribution;  // mean over member sentences
  std::vector<size_t> ranked;        // label indices, descending score
};

// distributions: one row per sentence, one column per label.
std::vector<SectionPrediction> AssignLabels(const std::vector<Span>& spans,
                                            const Eigen::MatrixXd& distributions);

// Inputs needed by every strategy for one document.
struct SegmentationInput {
  std::vector<bool> followed_by_newline;
  Eigen::MatrixXd distributions;       // N x labels
  EmbeddingMatrix embedding_forward;   // N x E
  EmbeddingMatrix embedding_backward;  // N x E
};

struct SegmentationResult {
  std::vector<SectionPrediction> sections;
  std::vector<double> emd;
  std::vector<double> bemd;
};

SegmentationResult SegmentDocument(const SegmentationInput& input,
                                   const SegConfig& config);

}  // namespace sector

#endif  // SECTOR_SEGMENT_H_
