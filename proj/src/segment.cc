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

#include "sector/segment.h"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "sector/common.h"

namespace sector {
namespace {

size_t ArgMax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return static_cast<size_t>(best);
}

Eigen::VectorXd MeanRows(const Eigen::MatrixXd& m, const Span& span) {
  return m.middleRows(static_cast<Eigen::Index>(span.begin),
                      static_cast<Eigen::Index>(span.size()))
      .colwise()
      .mean()
      .transpose();
}

size_t ReflectIndex(long long i, long long n) {
  const long long period = 2 * n;
  long long m = ((i % period) + period) % period;
  if (m >= n) m = period - 1 - m;
  return static_cast<size_t>(m);
}

std::vector<double> StepDistances(const EmbeddingMatrix& e, bool* zero_norm) {
  const auto n = static_cast<size_t>(e.rows());
  std::vector<double> d(n, 0.0);
  for (size_t k = 1; k < n; ++k) {
    const Eigen::VectorXd a = e.row(static_cast<Eigen::Index>(k - 1)).transpose();
    const Eigen::VectorXd b = e.row(static_cast<Eigen::Index>(k)).transpose();
    if (a.norm() == 0.0 || b.norm() == 0.0) *zero_norm = true;
    d[k] = CosineDistance(a, b);
  }
  return d;
}

EmbeddingMatrix ReduceAndSmooth(const EmbeddingMatrix& e, const SegConfig& config) {
  return GaussianSmooth(PcaProject(e, config.pca_dims), config.gaussian_sigma);
}

void WarnZeroNorm(bool zero_norm) {
  if (zero_norm) {
    Warn("zero-norm topic embedding; its cosine distance is taken as 0");
  }
}

}  // namespace

std::string_view StrategyName(SegmentStrategy strategy) {
  switch (strategy) {
    case SegmentStrategy::kNewline: return "nl";
    case SegmentStrategy::kMaxLabel: return "max";
    case SegmentStrategy::kEmd: return "emd";
    case SegmentStrategy::kBemd: return "bemd";
  }
  return "unknown";
}

SegmentStrategy ParseStrategy(std::string_view name) {
  if (name == "nl") return SegmentStrategy::kNewline;
  if (name == "max") return SegmentStrategy::kMaxLabel;
  if (name == "emd") return SegmentStrategy::kEmd;
  if (name == "bemd") return SegmentStrategy::kBemd;
  throw UsageError("unknown segmentation strategy '" + std::string(name) +
                   "' (expected nl, max, emd or bemd)");
}

void SegConfig::Validate() const {
  if (pca_dims < 1) throw UsageError("segment.pca_dims must be >= 1");
  if (!(gaussian_sigma > 0.0)) throw UsageError("segment.sigma must be > 0");
}

std::vector<Span> SegmentNewline(const std::vector<bool>& followed_by_newline,
                                 const Eigen::MatrixXd& distributions) {
  const size_t n = followed_by_newline.size();
  if (n == 0) return {};
  std::vector<Span> spans;
  size_t begin = 0;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (followed_by_newline[k]) {
      spans.push_back({begin, k + 1});
      begin = k + 1;
    }
  }
  spans.push_back({begin, n});
  if (spans.size() == 1) {
    Warn("no newline marks inside the document; using a single section");
    return spans;
  }

  while (true) {
    std::vector<Span> merged;
    std::vector<size_t> merged_label;
    for (const auto& span : spans) {
      const size_t label = ArgMax(MeanRows(distributions, span));
      if (!merged.empty() && merged_label.back() == label) {
        merged.back().end = span.end;
      } else {
        merged.push_back(span);
        merged_label.push_back(label);
      }
    }
    if (merged.size() == spans.size()) break;
    spans = std::move(merged);
  }
  return spans;
}

std::vector<std::array<size_t, 2>> TopTwoLabels(const Eigen::MatrixXd& distributions) {
  std::vector<std::array<size_t, 2>> out;
  const Eigen::Index labels = distributions.cols();
  for (Eigen::Index k = 0; k < distributions.rows(); ++k) {
    std::vector<size_t> order(static_cast<size_t>(labels));
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return distributions(k, static_cast<Eigen::Index>(a)) >
             distributions(k, static_cast<Eigen::Index>(b));
    });
    out.push_back({order[0], order.size() > 1 ? order[1] : order[0]});
  }
  return out;
}

std::vector<Span> SegmentMaxLabel(const std::vector<std::set<size_t>>& top_labels) {
  struct Group {
    Span span;
    std::set<size_t> labels;
  };
  std::vector<Group> groups;
  for (size_t k = 0; k < top_labels.size(); ++k) {
    groups.push_back({{k, k + 1}, top_labels[k]});
  }
  auto intersects = [](const std::set<size_t>& a, const std::set<size_t>& b) {
    for (size_t x : a) {
      if (b.count(x)) return true;
    }
    return false;
  };
  while (true) {
    std::vector<Group> merged;
    for (auto& group : groups) {
      if (!merged.empty() && intersects(merged.back().labels, group.labels)) {
        merged.back().span.end = group.span.end;
        merged.back().labels.insert(group.labels.begin(), group.labels.end());
      } else {
        merged.push_back(std::move(group));
      }
    }
    const bool changed = merged.size() != groups.size();
    groups = std::move(merged);
    if (!changed) break;
  }
  std::vector<Span> spans;
  for (const auto& group : groups) spans.push_back(group.span);
  return spans;
}

EmbeddingMatrix PcaProject(const EmbeddingMatrix& embeddings, size_t dims) {
  if (embeddings.rows() < 2) {
    throw DataError("PCA projection needs at least 2 sentences");
  }
  if (dims < 1) throw UsageError("PCA dimension must be >= 1");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(embeddings, Eigen::ComputeThinV);
  const auto& singular = svd.singularValues();
  const double tolerance =
      singular.size() == 0
          ? 0.0
          : singular(0) * static_cast<double>(std::max(embeddings.rows(),
                                                       embeddings.cols())) *
                std::numeric_limits<double>::epsilon();
  Eigen::Index rank = 0;
  while (rank < singular.size() && singular(rank) > tolerance) ++rank;

  const auto d = static_cast<Eigen::Index>(dims);
  const Eigen::Index used = std::min(rank, d);
  if (used < d) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
      Warn("embedding matrix rank " + std::to_string(rank) + " is below the " +
           std::to_string(dims) +
           " PCA dimensions; missing components are zero (further rank "
           "warnings suppressed)");
    }
  }
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(embeddings.cols(), d);
  for (Eigen::Index c = 0; c < used; ++c) {
    Eigen::VectorXd v = svd.matrixV().col(c);
    Eigen::Index argmax = 0;
    for (Eigen::Index j = 1; j < v.size(); ++j) {
      if (std::abs(v(j)) > std::abs(v(argmax))) argmax = j;
    }
    if (v(argmax) < 0) v = -v;
    basis.col(c) = v;
  }
  return embeddings * basis;
}

EmbeddingMatrix GaussianSmooth(const EmbeddingMatrix& series, double sigma) {
  if (!(sigma > 0.0)) throw UsageError("Gaussian sigma must be > 0");
  const auto radius = static_cast<long long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
  double total = 0.0;
  for (long long j = -radius; j <= radius; ++j) {
    const double w = std::exp(-static_cast<double>(j * j) / (2.0 * sigma * sigma));
    kernel[static_cast<size_t>(j + radius)] = w;
    total += w;
  }
  for (auto& w : kernel) w /= total;

  const long long n = series.rows();
  EmbeddingMatrix out = EmbeddingMatrix::Zero(series.rows(), series.cols());
  for (long long k = 0; k < n; ++k) {
    for (long long j = -radius; j <= radius; ++j) {
      const auto source = static_cast<Eigen::Index>(ReflectIndex(k + j, n));
      out.row(k) += kernel[static_cast<size_t>(j + radius)] * series.row(source);
    }
  }
  return out;
}

double CosineDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return 1.0 - a.dot(b) / (na * nb);
}

std::vector<double> DeviationEmd(const EmbeddingMatrix& embeddings,
                                 const SegConfig& config) {
  const auto n = static_cast<size_t>(embeddings.rows());
  if (n < 2) return std::vector<double>(n, 0.0);
  bool zero_norm = false;
  auto d = StepDistances(ReduceAndSmooth(embeddings, config), &zero_norm);
  WarnZeroNorm(zero_norm);
  return d;
}

std::vector<double> DeviationBemd(const EmbeddingMatrix& forward,
                                  const EmbeddingMatrix& backward,
                                  const SegConfig& config) {
  if (forward.rows() != backward.rows()) {
    throw DataError("forward and backward embeddings differ in length");
  }
  const auto n = static_cast<size_t>(forward.rows());
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  bool zero_norm = false;
  const auto f = StepDistances(ReduceAndSmooth(forward, config), &zero_norm);
  const auto b = StepDistances(ReduceAndSmooth(backward, config), &zero_norm);
  WarnZeroNorm(zero_norm);
  for (size_t k = 1; k < n; ++k) {
    double backward_step = 0.0;
    if (config.bemd_pairing == BemdPairing::kTransition) {
      backward_step = b[k];
    } else if (k + 1 < n) {
      backward_step = b[k + 1];  // distance between rows k and k+1
    }
    d[k] = std::sqrt(std::max(0.0, f[k]) * std::max(0.0, backward_step));
  }
  return d;
}

std::vector<size_t> FindBoundaries(const std::vector<double>& deviation) {
  std::vector<size_t> boundaries;
  const size_t n = deviation.size();
  size_t k = 1;
  while (k + 1 < n) {
    if (deviation[k - 1] < deviation[k]) {
      size_t j = k;
      while (j + 1 < n && deviation[j + 1] == deviation[k]) ++j;
      if (j + 1 < n && deviation[j + 1] < deviation[k]) boundaries.push_back(k);
      k = j + 1;
    } else {
      ++k;
    }
  }
  return boundaries;
}

std::vector<Span> SpansFromBoundaries(const std::vector<size_t>& boundaries,
                                      size_t n) {
  std::vector<Span> spans;
  size_t begin = 0;
  for (size_t b : boundaries) {
    if (b <= begin || b >= n) continue;
    spans.push_back({begin, b});
    begin = b;
  }
  if (n > 0) spans.push_back({begin, n});
  return spans;
}

std::vector<SectionPrediction> AssignLabels(const std::vector<Span>& spans,
                                            const Eigen::MatrixXd& distributions) {
  ValidatePartition(spans, static_cast<size_t>(distributions.rows()));
  std::vector<SectionPrediction> out;
  for (const auto& span : spans) {
    SectionPrediction section;
    section.span = span;
    const Eigen::VectorXd mean = MeanRows(distributions, span);
    section.distribution.assign(mean.data(), mean.data() + mean.size());
    section.ranked.resize(section.distribution.size());
    for (size_t i = 0; i < section.ranked.size(); ++i) section.ranked[i] = i;
    std::stable_sort(section.ranked.begin(), section.ranked.end(),
                     [&](size_t a, size_t b) {
                       return section.distribution[a] > section.distribution[b];
                     });
    out.push_back(std::move(section));
  }
  return out;
}

SegmentationResult SegmentDocument(const SegmentationInput& input,
                                   const SegConfig& config) {
  config.Validate();
  const auto n = static_cast<size_t>(input.distributions.rows());
  if (n == 0) throw DataError("cannot segment an empty document");
  SegmentationResult result;

  EmbeddingMatrix concatenated(input.embedding_forward.rows(),
                               input.embedding_forward.cols() +
                                   input.embedding_backward.cols());
  concatenated << input.embedding_forward, input.embedding_backward;
  result.emd = DeviationEmd(concatenated, config);
  result.bemd =
      DeviationBemd(input.embedding_forward, input.embedding_backward, config);

  std::vector<Span> spans;
  switch (config.strategy) {
    case SegmentStrategy::kNewline:
      spans = SegmentNewline(input.followed_by_newline, input.distributions);
      break;
    case SegmentStrategy::kMaxLabel: {
      std::vector<std::set<size_t>> sets;
      for (const auto& top : TopTwoLabels(input.distributions)) {
        sets.push_back({top[0], top[1]});
      }
      spans = SegmentMaxLabel(sets);
      break;
    }
    case SegmentStrategy::kEmd:
      spans = SpansFromBoundaries(FindBoundaries(result.emd), n);
      break;
    case SegmentStrategy::kBemd:
      spans = SpansFromBoundaries(FindBoundaries(result.bemd), n);
      break;
  }
  result.sections = AssignLabels(spans, input.distributions);
  return result;
}

}  // namespace sector
