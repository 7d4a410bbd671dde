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

// Acceptance run: one PASS/FAIL line per criterion. Every tolerance used here
// is pinned in this file.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sector/cli.h"
#include "sector/common.h"
#include "sector/corpus.h"
#include "sector/encode.h"
#include "sector/eval.h"
#include "sector/model.h"
#include "sector/network.h"
#include "sector/normalize.h"
#include "sector/pipeline.h"
#include "sector/random.h"
#include "sector/segment.h"

namespace sector {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and sizes.
constexpr double kGradEps = 1e-4;
constexpr double kGradRelTol = 1e-4;
constexpr size_t kGradMinCoords = 200;
constexpr double kGradMaxSeconds = 60.0;
constexpr size_t kMetricInstances = 1000;
constexpr size_t kMetricMaxN = 12;
constexpr size_t kMetricMaxLabels = 5;
constexpr double kOverfitAccuracy = 0.95;
constexpr size_t kOverfitMaxEpochs = 200;
constexpr double kOverfitMaxSeconds = 600.0;
constexpr size_t kRecoveryDocs = 100;
constexpr double kRecoveryNoise = 0.01;
constexpr double kRecoveryShare = 0.95;
constexpr double kEndToEndPkFactor = 0.5;
constexpr double kEndToEndF1 = 0.90;
constexpr double kEndToEndMap = 0.90;
constexpr size_t kHeldOutDocs = 30;
constexpr size_t kRandomBaselineDraws = 50;
constexpr size_t kBloomSentences = 1000;
constexpr double kSifMaxNorm = 1e-9;
constexpr double kRankMarginTol = 1e-9;
constexpr size_t kLiveDocs = 100;
constexpr size_t kLiveEpochs = 2;

struct Outcome {
  enum Status { kPass, kFail, kSkip } status = kFail;
  std::string detail;
};

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------- 1

Outcome GradientCheck() {
  const auto start = Clock::now();
  const NetworkDims dims{6, 5, 4, 3};
  const size_t n = 5;
  double worst = 0.0;
  size_t coords = 0;
  std::string worst_where;
  for (LossKind loss : {LossKind::kCrossEntropy, LossKind::kBce, LossKind::kRanking}) {
    const Task task = loss == LossKind::kCrossEntropy ? Task::kSingle : Task::kMulti;
    auto params = NetworkParams<double>::Initialize(dims, 101);
    Rng noise(102);
    for (auto& [name, tensor] : params.Tensors()) {
      for (Eigen::Index i = 0; i < tensor->size(); ++i) tensor->data()[i] += 0.1 * noise.Normal();
    }
    Matrix<double> inputs(6, n);
    for (Eigen::Index i = 0; i < inputs.size(); ++i) inputs.data()[i] = noise.Normal();
    const std::vector<size_t> labels = {0, 2, 1, 1, 0};
    const std::vector<std::vector<size_t>> positives = {{0}, {1, 2}, {2}, {0, 1}, {1}};
    SentenceTargetsView targets;
    targets.labels = labels;
    targets.positives = &positives;
    const RankingParams ranking;
    auto grads = NetworkParams<double>::Zeros(dims);
    DocumentLossAndGradient<double>(params, inputs, task, loss, ranking, targets, nullptr,
                                    &grads);
    auto tensors = params.Tensors();
    const auto grad_tensors = grads.Tensors();
    for (size_t t = 0; t < tensors.size(); ++t) {
      for (Eigen::Index i = 0; i < tensors[t].second->size(); ++i) {
        double& w = tensors[t].second->data()[i];
        const double saved = w;
        w = saved + kGradEps;
        const double up = DocumentLossAndGradient<double>(params, inputs, task, loss, ranking,
                                                          targets, nullptr, nullptr);
        w = saved - kGradEps;
        const double down = DocumentLossAndGradient<double>(params, inputs, task, loss,
                                                            ranking, targets, nullptr, nullptr);
        w = saved;
        const double numeric = (up - down) / (2.0 * kGradEps);
        const double analytic = grad_tensors[t].second->data()[i];
        const double rel = std::abs(numeric - analytic) /
                           std::max(std::abs(numeric) + std::abs(analytic), 1e-8);
        if (rel > worst) {
          worst = rel;
          worst_where = LossName(loss) + "/" + tensors[t].first;
        }
        ++coords;
      }
    }
  }
  const double elapsed = Seconds(start);
  Outcome out;
  out.status = worst < kGradRelTol && coords >= 3 * kGradMinCoords && elapsed < kGradMaxSeconds
                   ? Outcome::kPass
                   : Outcome::kFail;
  out.detail = Fmt("max rel err %.2e (%s) over %zu coords, 3 losses, %.1fs", worst,
                   worst_where.c_str(), coords, elapsed);
  return out;
}

// ---------------------------------------------------------------- 2

double BrutePk(const std::set<size_t>& ref, const std::set<size_t>& hyp, size_t n, size_t k) {
  auto segment_of = [n](const std::set<size_t>& b) {
    std::vector<size_t> id(n, 0);
    for (size_t s = 1; s < n; ++s) id[s] = id[s - 1] + (b.count(s) ? 1 : 0);
    return id;
  };
  const auto r = segment_of(ref);
  const auto h = segment_of(hyp);
  size_t wrong = 0;
  for (size_t i = 0; i + k < n; ++i) wrong += (r[i] == r[i + k]) != (h[i] == h[i + k]);
  return static_cast<double>(wrong) / static_cast<double>(n - k);
}

double BruteF1(const std::vector<LabelPair>& pairs, size_t labels) {
  size_t tp = 0, fp = 0, fn = 0;
  for (size_t c = 0; c < labels; ++c) {
    const std::string name(1, static_cast<char>('a' + c));
    for (const auto& p : pairs) {
      if (p.gold == name && p.predicted == name) ++tp;
      if (p.gold != name && p.predicted == name) ++fp;
      if (p.gold == name && p.predicted != name) ++fn;
    }
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

// Precision at every gold label's rank, by pairwise counting, summed in rank
// order so the floating-point sum matches any rank-ordered implementation.
double BruteAp(const std::set<std::string>& gold, const std::vector<std::string>& ranking) {
  std::vector<std::pair<size_t, double>> terms;
  for (const auto& g : gold) {
    const auto it = std::find(ranking.begin(), ranking.end(), g);
    if (it == ranking.end()) continue;
    const size_t rank = static_cast<size_t>(it - ranking.begin()) + 1;
    size_t above = 0;
    for (const auto& other : gold) {
      const auto jt = std::find(ranking.begin(), ranking.end(), other);
      if (jt != ranking.end() && static_cast<size_t>(jt - ranking.begin()) + 1 <= rank) ++above;
    }
    terms.push_back({rank, static_cast<double>(above) / static_cast<double>(rank)});
  }
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (const auto& t : terms) sum += t.second;
  return sum / static_cast<double>(gold.size());
}

Outcome MetricOracles() {
  Rng rng(202);
  size_t mismatches = 0;
  size_t pk_checked = 0;
  for (size_t trial = 0; trial < kMetricInstances; ++trial) {
    const size_t n = 2 + rng.UniformInt(kMetricMaxN - 1);
    const size_t labels = 2 + rng.UniformInt(kMetricMaxLabels - 1);
    std::set<size_t> ref, hyp;
    for (size_t s = 1; s < n; ++s) {
      if (rng.Uniform() < 0.25) ref.insert(s);
      if (rng.Uniform() < 0.25) hyp.insert(s);
    }
    const size_t k = DefaultPkWindow(n, ref.size() + 1);
    if (n > k) {
      mismatches += Pk(ref, hyp, n) != BrutePk(ref, hyp, n, k);
      ++pk_checked;
    }

    std::vector<LabelPair> pairs;
    std::vector<std::set<std::string>> gold;
    std::vector<std::vector<std::string>> rankings;
    const size_t items = 1 + rng.UniformInt(kMetricMaxN);
    for (size_t i = 0; i < items; ++i) {
      std::vector<std::string> ranking;
      for (size_t c = 0; c < labels; ++c) ranking.push_back(std::string(1, static_cast<char>('a' + c)));
      rng.Shuffle(ranking);
      std::set<std::string> g;
      for (const auto& l : ranking) {
        if (rng.Uniform() < 0.35) g.insert(l);
      }
      pairs.push_back({std::string(1, static_cast<char>('a' + rng.UniformInt(labels))),
                       ranking.front()});
      gold.push_back(g);
      rankings.push_back(ranking);
    }
    mismatches += MicroF1(pairs) != BruteF1(pairs, labels);

    size_t evaluated = 0, hits = 0;
    double ap_sum = 0.0;
    for (size_t i = 0; i < items; ++i) {
      if (gold[i].empty()) continue;
      ++evaluated;
      hits += gold[i].count(rankings[i].front());
      ap_sum += BruteAp(gold[i], rankings[i]);
    }
    const double p1 = evaluated ? static_cast<double>(hits) / static_cast<double>(evaluated) : 0.0;
    const double map = evaluated ? ap_sum / static_cast<double>(evaluated) : 0.0;
    mismatches += PrecisionAt1(gold, rankings) != p1;
    mismatches += MeanAveragePrecision(gold, rankings) != map;
  }
  const double hand = Pk({3}, {}, 6, 2);
  Outcome out;
  out.status = mismatches == 0 && hand == 0.5 ? Outcome::kPass : Outcome::kFail;
  out.detail = Fmt("%zu instances (%zu with Pk), %zu mismatches; hand case Pk = %.3f",
                   kMetricInstances, pk_checked, mismatches, hand);
  return out;
}

// ---------------------------------------------------------------- 3 and 5

SyntheticConfig OverfitCorpusConfig(size_t docs, uint64_t seed) {
  SyntheticConfig config;  // 5 topics, 200 words in disjoint blocks of 40, segments 5-10
  config.doc_count = docs;
  config.seed = seed;
  return config;
}

struct OverfitState {
  bool reached = false;
  size_t epochs = 0;
  double accuracy = 0.0;
  double seconds = 0.0;
  std::optional<SectorModel> model;
};

OverfitState& Overfit() {
  static OverfitState state = [] {
    OverfitState s;
    const auto train = GenerateSynthetic(OverfitCorpusConfig(50, 1));
    const auto validation = GenerateSynthetic(OverfitCorpusConfig(10, 2));
    EncoderConfig enc;
    enc.variant = EncoderVariant::kBow;
    TrainConfig config;  // full hyperparameters
    config.max_epochs = kOverfitMaxEpochs;
    config.patience = kOverfitMaxEpochs;  // no early stop: this measures fitting
    config.seed = 1;
    const auto start = Clock::now();
    Train(train, validation, SentenceEncoder::Fit(enc, train), config,
          [&](const EpochRecord& record, const SectorModel& model) {
            s.epochs = record.epoch;
            s.accuracy = SentenceAccuracy(model, train);
            if (s.accuracy >= kOverfitAccuracy) {
              s.reached = true;
              s.model = model;
              return false;
            }
            return Seconds(start) < kOverfitMaxSeconds;
          });
    s.seconds = Seconds(start);
    return s;
  }();
  return state;
}

Outcome OverfitTest() {
  const auto& s = Overfit();
  Outcome out;
  out.status = s.reached && s.seconds < kOverfitMaxSeconds ? Outcome::kPass : Outcome::kFail;
  out.detail = Fmt("train sentence accuracy %.3f after %zu epochs, %.1fs", s.accuracy,
                   s.epochs, s.seconds);
  return out;
}

// Pk of boundaries placed uniformly at random, as many as the gold has.
double RandomBaselinePk(const std::vector<Document>& docs) {
  Rng rng(505);
  double total = 0.0;
  size_t count = 0;
  for (const auto& doc : docs) {
    std::vector<LabeledSpan> gold;
    for (const auto& s : doc.sections) {
      gold.push_back({{s.begin_sentence, s.end_sentence}, SectionLabel(s)});
    }
    const auto ref = RelevantBoundaries(gold);
    const size_t n = doc.size();
    const size_t k = DefaultPkWindow(n, ref.size() + 1);
    if (n <= k) continue;
    std::vector<size_t> positions(n - 1);
    std::iota(positions.begin(), positions.end(), size_t{1});
    for (size_t draw = 0; draw < kRandomBaselineDraws; ++draw) {
      rng.Shuffle(positions);
      const std::set<size_t> hyp(positions.begin(), positions.begin() + ref.size());
      total += Pk(ref, hyp, n, k);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

Outcome EndToEnd() {
  const auto& s = Overfit();
  Outcome out;
  if (!s.model) {
    out.detail = "no model from the overfit run";
    return out;
  }
  const auto held_out = GenerateSynthetic(OverfitCorpusConfig(kHeldOutDocs, 3));
  SegConfig seg;
  seg.strategy = SegmentStrategy::kBemd;
  const auto single = EvaluateRun(held_out, PredictAll(*s.model, held_out, seg, "single"),
                                  "single");
  const double baseline = RandomBaselinePk(held_out);

  const auto train = GenerateSynthetic(OverfitCorpusConfig(50, 1));
  const auto validation = GenerateSynthetic(OverfitCorpusConfig(10, 2));
  EncoderConfig enc;
  enc.variant = EncoderVariant::kBow;
  TrainConfig config;
  config.task = Task::kMulti;
  config.loss = LossKind::kRanking;
  config.max_epochs = 30;
  config.patience = 5;
  config.seed = 1;
  const auto ranked = Train(train, validation, SentenceEncoder::Fit(enc, train), config);
  const auto multi =
      EvaluateRun(held_out, PredictAll(ranked.model, held_out, seg, "multi"), "multi");

  const bool pk_ok = single.pk <= kEndToEndPkFactor * baseline;
  const bool f1_ok = single.f1 && *single.f1 >= kEndToEndF1;
  const bool map_ok = multi.map >= kEndToEndMap;
  out.status = pk_ok && f1_ok && map_ok ? Outcome::kPass : Outcome::kFail;
  out.detail = Fmt("bemd Pk %.3f vs random %.3f, F1 %.3f; rank MAP %.3f (best epoch %zu)",
                   single.pk, baseline, single.f1.value_or(0.0), multi.map,
                   ranked.best_epoch);
  return out;
}

// ---------------------------------------------------------------- 4

struct RecoveryFixture {
  EmbeddingMatrix forward;
  EmbeddingMatrix backward;
  std::set<size_t> boundaries;
};

Eigen::VectorXd RandomUnit(size_t dim, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.Normal();
  return v / v.norm();
}

RecoveryFixture MakeRecoveryFixture(Rng& rng) {
  const size_t dim = 16;
  const size_t topics = 5;
  std::vector<Eigen::VectorXd> fwd_topics, bwd_topics;
  for (size_t t = 0; t < topics; ++t) {
    fwd_topics.push_back(RandomUnit(dim, rng));
    bwd_topics.push_back(RandomUnit(dim, rng));
  }
  std::vector<size_t> topic_of;
  RecoveryFixture f;
  const size_t segments = 3 + rng.UniformInt(4);
  size_t previous = topics;
  for (size_t s = 0; s < segments; ++s) {
    size_t topic = rng.UniformInt(topics);
    while (topic == previous) topic = rng.UniformInt(topics);
    previous = topic;
    if (s > 0) f.boundaries.insert(topic_of.size());
    const size_t length = 5 + rng.UniformInt(6);
    for (size_t k = 0; k < length; ++k) topic_of.push_back(topic);
  }
  const auto n = static_cast<Eigen::Index>(topic_of.size());
  f.forward.resize(n, static_cast<Eigen::Index>(dim));
  f.backward.resize(n, static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < n; ++k) {
    f.forward.row(k) = fwd_topics[topic_of[static_cast<size_t>(k)]].transpose();
    f.backward.row(k) = bwd_topics[topic_of[static_cast<size_t>(k)]].transpose();
    for (Eigen::Index j = 0; j < f.forward.cols(); ++j) {
      f.forward(k, j) += kRecoveryNoise * (2.0 * rng.Uniform() - 1.0);
      f.backward(k, j) += kRecoveryNoise * (2.0 * rng.Uniform() - 1.0);
    }
  }
  return f;
}

// Mean deviation at gold boundaries over the mean deviation elsewhere.
double PeakToMean(const std::vector<double>& d, const std::set<size_t>& boundaries) {
  double peak = 0.0, rest = 0.0;
  size_t n_rest = 0;
  for (size_t k = 1; k < d.size(); ++k) {
    if (boundaries.count(k)) {
      peak += d[k];
    } else {
      rest += d[k];
      ++n_rest;
    }
  }
  peak /= static_cast<double>(boundaries.size());
  rest /= static_cast<double>(n_rest);
  return peak / rest;
}

Outcome SegmentationRecovery() {
  Rng rng(404);
  SegConfig config;
  size_t emd_exact = 0, bemd_exact = 0;
  double emd_ratio = 0.0, bemd_ratio = 0.0;
  for (size_t doc = 0; doc < kRecoveryDocs; ++doc) {
    const auto f = MakeRecoveryFixture(rng);
    const size_t n = static_cast<size_t>(f.forward.rows());
    EmbeddingMatrix both(f.forward.rows(), 2 * f.forward.cols());
    both << f.forward, f.backward;
    const auto emd = DeviationEmd(both, config);
    const auto bemd = DeviationBemd(f.forward, f.backward, config);
    const auto emd_b = FindBoundaries(emd);
    const auto bemd_b = FindBoundaries(bemd);
    emd_exact += Pk(f.boundaries, {emd_b.begin(), emd_b.end()}, n) == 0.0;
    bemd_exact += Pk(f.boundaries, {bemd_b.begin(), bemd_b.end()}, n) == 0.0;
    emd_ratio += PeakToMean(emd, f.boundaries);
    bemd_ratio += PeakToMean(bemd, f.boundaries);
  }
  emd_ratio /= kRecoveryDocs;
  bemd_ratio /= kRecoveryDocs;
  const auto needed = static_cast<size_t>(std::ceil(kRecoveryShare * kRecoveryDocs));
  Outcome out;
  out.status = emd_exact >= needed && bemd_exact >= needed && bemd_ratio > emd_ratio
                   ? Outcome::kPass
                   : Outcome::kFail;
  out.detail = Fmt("Pk = 0 on emd %zu/%zu, bemd %zu/%zu; peak/mean emd %.2f, bemd %.2f",
                   emd_exact, kRecoveryDocs, bemd_exact, kRecoveryDocs, emd_ratio, bemd_ratio);
  return out;
}

// ---------------------------------------------------------------- 6

Outcome EncoderContracts() {
  Rng rng(606);
  const uint32_t m = 4096, k = 5;
  size_t l1_bad = 0, repeat_bad = 0;
  for (size_t i = 0; i < kBloomSentences; ++i) {
    Sentence s;
    const size_t len = rng.UniformInt(30);
    for (size_t t = 0; t < len; ++t) s.tokens.push_back("w" + std::to_string(rng.UniformInt(500)));
    const auto a = EncodeBloom(s, m, k);
    const auto b = EncodeBloom(s, m, k);
    const double l1 = std::accumulate(a.values.begin(), a.values.end(), 0.0);
    l1_bad += l1 != static_cast<double>(k) * static_cast<double>(len);
    repeat_bad += std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) != 0;
  }

  WordEmbeddingStore store(4);
  store.Add("same", {0.5f, 0.5f, 0.5f, 0.5f});
  store.Add("word", {0.1f, -0.3f, 0.2f, 0.7f});
  Document doc;
  doc.id = "identical";
  for (int i = 0; i < 8; ++i) doc.sentences.push_back({"same word", {"same", "word"}, false});
  doc.sections.push_back({0, 8, "Body", std::string("body")});
  EncoderConfig enc;
  enc.variant = EncoderVariant::kEmb;
  const auto encoder = SentenceEncoder::Fit(enc, {doc}, &store);
  double sif_norm = 0.0;
  for (const auto& s : doc.sentences) {
    const auto v = encoder.Encode(s);
    double sq = 0.0;
    for (double x : v.values) sq += x * x;
    sif_norm = std::max(sif_norm, std::sqrt(sq));
  }

  const RankingParams ranking;
  const std::vector<double> scores = {ranking.margin_positive, -ranking.margin_negative};
  const std::vector<size_t> positive = {0};
  const double at_margin = RankingLossScalar(scores, positive, ranking);
  const double margin_err = std::abs(at_margin - 2.0 * std::log(2.0));

  Outcome out;
  out.status = l1_bad == 0 && repeat_bad == 0 && sif_norm < kSifMaxNorm &&
                       margin_err <= kRankMarginTol
                   ? Outcome::kPass
                   : Outcome::kFail;
  out.detail = Fmt("bloom L1 mismatches %zu/%zu, repeat mismatches %zu; SIF max norm %.1e; "
                   "rank loss at margins off by %.1e",
                   l1_bad, kBloomSentences, repeat_bad, sif_norm, margin_err);
  return out;
}

// ---------------------------------------------------------------- 7

double ModularityOf(const SynsetGraph& g, const std::vector<size_t>& side) {
  const size_t n = g.nodes.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& [key, w] : g.edges) {
    a[key.first][key.second] += static_cast<double>(w);
    a[key.second][key.first] += static_cast<double>(w);
  }
  std::vector<double> deg(n, 0.0);
  double two_m = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) deg[i] += a[i][j];
    two_m += deg[i];
  }
  double q = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (side[i] == side[j]) q += a[i][j] - deg[i] * deg[j] / two_m;
    }
  }
  return q / two_m;
}

Outcome Normalization() {
  SynsetLexicon lex;
  auto add = [&](const std::string& lemma, std::initializer_list<std::string> ids) {
    for (const auto& id : ids) lex.Add(lemma, id, "");
  };
  add("therapy", {"bn:a1", "bn:a2", "bn:a3"});
  add("treatment", {"bn:a3", "bn:a4", "bn:a5"});
  add("management", {"bn:a5", "bn:a6", "bn:a1"});
  add("cure", {"bn:a2", "bn:a4", "bn:a6"});
  add("symptoms", {"bn:b1", "bn:b2", "bn:b3"});
  add("signs", {"bn:b3", "bn:b4", "bn:b5"});
  add("presentation", {"bn:b5", "bn:b6", "bn:b1"});
  add("features", {"bn:b2", "bn:b4", "bn:b6"});
  add("care", {"bn:a6", "bn:b1"});
  const std::vector<HeadingRecord> headings = {
      {"Therapy", 9}, {"Treatment", 5}, {"Management", 3}, {"Cure", 1}, {"Symptoms", 8},
      {"Signs", 4},   {"Presentation", 2}, {"Features", 1}, {"Care", 1}};
  const auto graph = BuildSynsetGraph(headings, lex);
  const size_t n = graph.nodes.size();

  double best_q = -1.0;
  std::vector<size_t> best;
  for (uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<size_t> side(n, 0);
    for (size_t i = 1; i < n; ++i) side[i] = (mask >> (i - 1)) & 1u;
    const double q = ModularityOf(graph, side);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = side;
    }
  }
  std::vector<size_t> planted(n, 0);
  for (size_t i = 0; i < n; ++i) planted[i] = graph.nodes[i].rfind("bn:b", 0) == 0 ? 1 : 0;

  const auto clusters = DetectCommunities(graph);
  std::vector<size_t> found(n, 0);
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (size_t node : clusters[c].members) found[node] = c;
  }
  std::vector<TopicCluster> pruned(4);
  const uint64_t counts[] = {5, 1, 1, 1};
  for (size_t i = 0; i < 4; ++i) pruned[i].total_count = counts[i];
  const auto kept = PruneClusters(pruned);

  const bool planted_is_best = best == planted;
  const bool recovered = clusters.size() == 2 && found == planted;
  const bool prune_ok = kept == std::vector<bool>{true, false, false, false};
  Outcome out;
  out.status = planted_is_best && recovered && n == 12 && prune_ok ? Outcome::kPass
                                                                   : Outcome::kFail;
  out.detail = Fmt("%zu synsets, %zu edges; planted split is the best of %u 2-partitions: %s; "
                   "detected %zu communities matching it: %s; prune [5,1,1,1] keeps only 5: %s",
                   n, graph.edges.size(), 1u << (n - 1), planted_is_best ? "yes" : "no",
                   clusters.size(), recovered ? "yes" : "no", prune_ok ? "yes" : "no");
  return out;
}

// ---------------------------------------------------------------- 8

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome DeterminismAndPersistence() {
  const auto dir = fs::temp_directory_path() / "sector_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SyntheticConfig synth;
  synth.doc_count = 12;
  synth.seed = 8;
  SaveWikiSection(GenerateSynthetic(synth), (dir / "train.json").string());
  synth.doc_count = 4;
  synth.seed = 9;
  const auto held_out = GenerateSynthetic(synth);
  SaveWikiSection(held_out, (dir / "val.json").string());
  std::ofstream(dir / "run.json") << R"({"data.train": "train.json", "data.validation": "val.json",
    "encoder.variant": "bloom", "encoder.bloom_m": 512, "train.hidden": 32,
    "train.embedding": 16, "train.max_epochs": 3, "seed": 77})";

  const int a = RunCli({"train", "-c", (dir / "run.json").string(), "-o", (dir / "a").string()});
  const int b = RunCli({"train", "-c", (dir / "run.json").string(), "-o", (dir / "b").string(),
                        "--threads", "2"});
  const auto bytes_a = ReadFile(dir / "a" / "model.secm");
  const bool identical = a == 0 && b == 0 && !bytes_a.empty() &&
                         bytes_a == ReadFile(dir / "b" / "model.secm");

  const auto model = LoadModel((dir / "a" / "model.secm").string());
  SaveModel(model, (dir / "resaved.secm").string());
  const auto reloaded = LoadModel((dir / "resaved.secm").string());
  const bool resave_identical = ReadFile(dir / "resaved.secm") == bytes_a;
  bool predictions_equal = true;
  for (const auto& doc : held_out) {
    const auto x = model.Predict(doc);
    const auto y = reloaded.Predict(doc);
    predictions_equal = predictions_equal && x.scores == y.scores &&
                        x.embedding_forward == y.embedding_forward &&
                        x.embedding_backward == y.embedding_backward;
  }
  fs::remove_all(dir);
  Outcome out;
  out.status = identical && resave_identical && predictions_equal ? Outcome::kPass
                                                                  : Outcome::kFail;
  out.detail = Fmt("two same-seed trainings (1 and 2 threads) bit-identical: %s; "
                   "save-load-save identical: %s; predictions after reload identical: %s",
                   identical ? "yes" : "no", resave_identical ? "yes" : "no",
                   predictions_equal ? "yes" : "no");
  return out;
}

// ---------------------------------------------------------------- 9

Outcome LiveDataSmoke() {
  Outcome out;
  const char* path = std::getenv("SECTOR_EN_DISEASE");
  if (path == nullptr || *path == '\0' || !fs::is_regular_file(path)) {
    out.status = Outcome::kSkip;
    out.detail = "set SECTOR_EN_DISEASE to a WikiSection en_disease JSON file to run";
    return out;
  }
  const auto start = Clock::now();
  auto docs = LoadWikiSection(path);
  if (docs.size() < kLiveDocs + 20) {
    out.detail = Fmt("%s has only %zu documents", path, docs.size());
    return out;
  }
  const std::vector<Document> train(docs.begin(), docs.begin() + kLiveDocs * 8 / 10);
  const std::vector<Document> validation(docs.begin() + kLiveDocs * 8 / 10,
                                         docs.begin() + kLiveDocs);
  const std::vector<Document> test(docs.begin() + kLiveDocs,
                                   docs.begin() + std::min(docs.size(), kLiveDocs + 50));
  const auto dir = fs::temp_directory_path() / "sector_acceptance_live";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SaveWikiSection(train, (dir / "train.json").string());
  SaveWikiSection(validation, (dir / "validation.json").string());
  SaveWikiSection(test, (dir / "test.json").string());
  std::ofstream(dir / "run.json") << Fmt(
      R"({"data.train": "train.json", "data.validation": "validation.json",
          "data.name": "en_disease", "encoder.variant": "bloom",
          "train.max_epochs": %zu, "seed": 1})",
      kLiveEpochs);
  const int train_code = RunCli({"train", "-c", (dir / "run.json").string(), "-o",
                                 (dir / "out").string()});
  const int predict_code =
      RunCli({"predict", "-m", (dir / "out" / "model.secm").string(), "-i",
              (dir / "test.json").string(), "-s", "nl", "-o", (dir / "pred.json").string()});
  const int eval_code =
      RunCli({"evaluate", "-g", (dir / "test.json").string(), "-p",
              (dir / "pred.json").string(), "--dataset", "en_disease", "-o",
              (dir / "report.json").string()});
  if (train_code != 0 || predict_code != 0 || eval_code != 0) {
    out.detail = Fmt("exit codes train %d, predict %d, evaluate %d", train_code, predict_code,
                     eval_code);
    fs::remove_all(dir);
    return out;
  }
  const auto gold = LoadWikiSection((dir / "test.json").string());
  const auto predictions = ParsePredictions(ReadFile(dir / "pred.json"));
  const auto trained = EvaluateRun(gold, predictions, "single", "en_disease");

  // Same newline spans, every section labeled with the most frequent
  // training label.
  std::map<std::string, size_t> label_counts;
  for (const auto& doc : train) {
    for (const auto& s : doc.sections) ++label_counts[SectionLabel(s)];
  }
  const auto majority = std::max_element(label_counts.begin(), label_counts.end(),
                                         [](const auto& a, const auto& b) {
                                           return a.second < b.second;
                                         })->first;
  auto baseline = predictions;
  for (auto& doc : baseline.documents) {
    for (auto& section : doc.sections) section.ranked = {{majority, 1.0}};
  }
  const auto base = EvaluateRun(gold, baseline, "single", "en_disease");
  fs::remove_all(dir);
  out.status = trained.f1.value_or(0.0) > base.f1.value_or(0.0) ? Outcome::kPass
                                                                  : Outcome::kFail;
  out.detail = Fmt("NL F1 %.3f vs majority '%s' %.3f, Pk %.3f, %.0fs", trained.f1.value_or(0.0),
                   majority.c_str(), base.f1.value_or(0.0), trained.pk, Seconds(start));
  return out;
}

}  // namespace
}  // namespace sector

int main() {
  using sector::Outcome;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", sector::GradientCheck},
      {2, "metric oracles", sector::MetricOracles},
      {3, "overfit synthetic corpus", sector::OverfitTest},
      {4, "segmentation recovery", sector::SegmentationRecovery},
      {5, "end-to-end held-out", sector::EndToEnd},
      {6, "encoder contracts", sector::EncoderContracts},
      {7, "heading normalization", sector::Normalization},
      {8, "determinism and persistence", sector::DeterminismAndPersistence},
      {9, "live-data smoke", sector::LiveDataSmoke},
  };
  // Keep library warnings out of the report lines.
  sector::SetWarningHandler([](std::string_view) {});
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.status = Outcome::kFail;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const char* tag = outcome.status == Outcome::kPass   ? "PASS"
                      : outcome.status == Outcome::kSkip ? "SKIP"
                                                         : "FAIL";
    std::printf("[%s] %d %s: %s\n", tag, c.id, c.name, outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.status == Outcome::kFail;
  }
  return failures == 0 ? 0 : 1;
}
