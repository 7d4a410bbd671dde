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

#include "sector/network.h"

#include <cmath>
#include <limits>

#include "sector/common.h"
#include "sector/random.h"

namespace sector {
namespace {

template <typename T>
T Sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
T Softplus(T x) {
  return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename T>
Matrix<T> UniformMatrix(Eigen::Index rows, Eigen::Index cols, double fan_in,
                        double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  Matrix<T> m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      m(r, c) = static_cast<T>(limit * (2.0 * rng.Uniform() - 1.0));
    }
  }
  return m;
}

template <typename T>
LstmParams<T> InitLstm(size_t input, size_t hidden, Rng& rng) {
  const auto h = static_cast<Eigen::Index>(hidden);
  LstmParams<T> p;
  p.input_weights = UniformMatrix<T>(4 * h, static_cast<Eigen::Index>(input),
                                     static_cast<double>(input),
                                     static_cast<double>(hidden), rng);
  p.recurrent_weights = UniformMatrix<T>(4 * h, h, static_cast<double>(hidden),
                                         static_cast<double>(hidden), rng);
  p.bias = Matrix<T>::Zero(4 * h, 1);
  p.bias.block(h, 0, h, 1).setConstant(T(1));
  return p;
}

template <typename T>
void LstmBackward(const LstmParams<T>& params, const LstmTrace<T>& trace,
                  const Matrix<T>& inputs, const Matrix<T>& dhidden,
                  LstmParams<T>& grads) {
  const Eigen::Index h = static_cast<Eigen::Index>(params.hidden());
  const Eigen::Index n = inputs.cols();
  const bool forward = trace.direction == Direction::kForward;

  Matrix<T> dgates(4 * h, n);
  Matrix<T> previous_hidden = Matrix<T>::Zero(h, n);
  Matrix<T> dh_next = Matrix<T>::Zero(h, 1);
  Matrix<T> dc_next = Matrix<T>::Zero(h, 1);
  const Matrix<T> zero = Matrix<T>::Zero(h, 1);

  for (Eigen::Index s = n - 1; s >= 0; --s) {
    const Eigen::Index k = forward ? s : n - 1 - s;
    const bool has_previous = s > 0;
    const Eigen::Index kp = forward ? k - 1 : k + 1;

    const auto i = trace.input_gate.col(k).array();
    const auto f = trace.forget_gate.col(k).array();
    const auto o = trace.output_gate.col(k).array();
    const auto g = trace.candidate.col(k).array();
    const auto ct = trace.cell_tanh.col(k).array();
    const auto c_prev = has_previous ? trace.cell.col(kp).array() : zero.col(0).array();

    const Matrix<T> dh = dhidden.col(k) + dh_next;
    const auto dh_a = dh.array();
    const Matrix<T> dc = (dc_next.array() + dh_a * o * (T(1) - ct * ct)).matrix();
    const auto dc_a = dc.array();

    dgates.block(0, k, h, 1) = (dc_a * g * i * (T(1) - i)).matrix();
    dgates.block(h, k, h, 1) = (dc_a * c_prev * f * (T(1) - f)).matrix();
    dgates.block(2 * h, k, h, 1) = (dh_a * ct * o * (T(1) - o)).matrix();
    dgates.block(3 * h, k, h, 1) = (dc_a * i * (T(1) - g * g)).matrix();

    dh_next.noalias() = params.recurrent_weights.transpose() * dgates.col(k);
    dc_next = (dc_a * f).matrix();
    if (has_previous) previous_hidden.col(k) = trace.hidden.col(kp);
  }

  grads.input_weights.noalias() += dgates * inputs.transpose();
  grads.recurrent_weights.noalias() += dgates * previous_hidden.transpose();
  grads.bias += dgates.rowwise().sum();
}

}  // namespace

std::string TaskName(Task task) {
  return task == Task::kSingle ? "single" : "multi";
}

Task ParseTask(const std::string& name) {
  if (name == "single") return Task::kSingle;
  if (name == "multi") return Task::kMulti;
  throw UsageError("unknown task '" + name + "' (expected single or multi)");
}

std::string LossName(LossKind loss) {
  switch (loss) {
    case LossKind::kCrossEntropy: return "ce";
    case LossKind::kBce: return "bce";
    case LossKind::kRanking: return "rank";
  }
  return "unknown";
}

LossKind ParseLoss(const std::string& name) {
  if (name == "ce" || name == "cross-entropy") return LossKind::kCrossEntropy;
  if (name == "bce") return LossKind::kBce;
  if (name == "rank" || name == "ranking") return LossKind::kRanking;
  throw UsageError("unknown loss '" + name + "' (expected ce, bce or rank)");
}

template <typename T>
NetworkParams<T> NetworkParams<T>::Zeros(const NetworkDims& dims) {
  const auto in = static_cast<Eigen::Index>(dims.input);
  const auto h = static_cast<Eigen::Index>(dims.hidden);
  const auto e = static_cast<Eigen::Index>(dims.embedding);
  const auto l = static_cast<Eigen::Index>(dims.labels);
  NetworkParams p;
  for (auto* lstm : {&p.forward, &p.backward}) {
    lstm->input_weights = Matrix<T>::Zero(4 * h, in);
    lstm->recurrent_weights = Matrix<T>::Zero(4 * h, h);
    lstm->bias = Matrix<T>::Zero(4 * h, 1);
  }
  p.shared.bottleneck_weights = Matrix<T>::Zero(e, h);
  p.shared.bottleneck_bias = Matrix<T>::Zero(e, 1);
  p.shared.output_weights = Matrix<T>::Zero(l, e);
  p.shared.output_bias = Matrix<T>::Zero(l, 1);
  return p;
}

template <typename T>
NetworkParams<T> NetworkParams<T>::Initialize(const NetworkDims& dims,
                                              uint64_t seed) {
  if (dims.input == 0 || dims.hidden == 0 || dims.embedding == 0 ||
      dims.labels == 0) {
    throw UsageError("network dimensions must all be positive");
  }
  Rng rng(Rng::Mix(seed, 0x5ec7011));
  NetworkParams p;
  p.forward = InitLstm<T>(dims.input, dims.hidden, rng);
  p.backward = InitLstm<T>(dims.input, dims.hidden, rng);
  const auto h = static_cast<Eigen::Index>(dims.hidden);
  const auto e = static_cast<Eigen::Index>(dims.embedding);
  const auto l = static_cast<Eigen::Index>(dims.labels);
  p.shared.bottleneck_weights = UniformMatrix<T>(
      e, h, static_cast<double>(dims.hidden), static_cast<double>(dims.embedding), rng);
  p.shared.bottleneck_bias = Matrix<T>::Zero(e, 1);
  p.shared.output_weights = UniformMatrix<T>(
      l, e, static_cast<double>(dims.embedding), static_cast<double>(dims.labels), rng);
  p.shared.output_bias = Matrix<T>::Zero(l, 1);
  return p;
}

template <typename T>
NetworkDims NetworkParams<T>::dims() const {
  NetworkDims d;
  d.input = static_cast<size_t>(forward.input_weights.cols());
  d.hidden = static_cast<size_t>(forward.recurrent_weights.cols());
  d.embedding = static_cast<size_t>(shared.bottleneck_weights.rows());
  d.labels = static_cast<size_t>(shared.output_weights.rows());
  return d;
}

template <typename T>
std::vector<std::pair<std::string, Matrix<T>*>> NetworkParams<T>::Tensors() {
  return {{"forward.input_weights", &forward.input_weights},
          {"forward.recurrent_weights", &forward.recurrent_weights},
          {"forward.bias", &forward.bias},
          {"backward.input_weights", &backward.input_weights},
          {"backward.recurrent_weights", &backward.recurrent_weights},
          {"backward.bias", &backward.bias},
          {"shared.bottleneck_weights", &shared.bottleneck_weights},
          {"shared.bottleneck_bias", &shared.bottleneck_bias},
          {"shared.output_weights", &shared.output_weights},
          {"shared.output_bias", &shared.output_bias}};
}

template <typename T>
std::vector<std::pair<std::string, const Matrix<T>*>> NetworkParams<T>::Tensors()
    const {
  std::vector<std::pair<std::string, const Matrix<T>*>> out;
  for (auto& [name, tensor] : const_cast<NetworkParams*>(this)->Tensors()) {
    out.emplace_back(name, tensor);
  }
  return out;
}

template <typename T>
void NetworkParams<T>::SetZero() {
  for (auto& [name, tensor] : Tensors()) tensor->setZero();
}

template <typename T>
void NetworkParams<T>::AddScaled(const NetworkParams& other, T scale) {
  auto mine = Tensors();
  auto theirs = other.Tensors();
  for (size_t i = 0; i < mine.size(); ++i) *mine[i].second += scale * *theirs[i].second;
}

template <typename T>
void NetworkParams<T>::Scale(T factor) {
  for (auto& [name, tensor] : Tensors()) *tensor *= factor;
}

template <typename T>
bool NetworkParams<T>::AllFinite() const {
  for (const auto& [name, tensor] : Tensors()) {
    if (!tensor->allFinite()) return false;
  }
  return true;
}

template <typename T>
LstmTrace<T> LstmForward(const LstmParams<T>& params, const Matrix<T>& inputs,
                         Direction direction) {
  const Eigen::Index h = static_cast<Eigen::Index>(params.hidden());
  const Eigen::Index n = inputs.cols();
  if (n < 1) throw DataError("LSTM input sequence is empty");
  if (inputs.rows() != params.input_weights.cols()) {
    throw DataError("LSTM input dimension " + std::to_string(inputs.rows()) +
                    " does not match parameters (" +
                    std::to_string(params.input_weights.cols()) + ")");
  }
  if (inputs.hasNaN()) throw NumericError("NaN in LSTM input");

  LstmTrace<T> trace;
  trace.direction = direction;
  trace.input_gate.resize(h, n);
  trace.forget_gate.resize(h, n);
  trace.output_gate.resize(h, n);
  trace.candidate.resize(h, n);
  trace.cell.resize(h, n);
  trace.cell_tanh.resize(h, n);
  trace.hidden.resize(h, n);

  Matrix<T> preactivation = params.input_weights * inputs;
  preactivation.colwise() += params.bias.col(0);

  Matrix<T> h_prev = Matrix<T>::Zero(h, 1);
  Matrix<T> c_prev = Matrix<T>::Zero(h, 1);
  Matrix<T> z(4 * h, 1);
  for (Eigen::Index s = 0; s < n; ++s) {
    const Eigen::Index k = direction == Direction::kForward ? s : n - 1 - s;
    z = preactivation.col(k);
    z.noalias() += params.recurrent_weights * h_prev;
    for (Eigen::Index r = 0; r < h; ++r) {
      const T i = Sigmoid(z(r, 0));
      const T f = Sigmoid(z(h + r, 0));
      const T o = Sigmoid(z(2 * h + r, 0));
      const T g = std::tanh(z(3 * h + r, 0));
      const T c = f * c_prev(r, 0) + i * g;
      const T ct = std::tanh(c);
      trace.input_gate(r, k) = i;
      trace.forget_gate(r, k) = f;
      trace.output_gate(r, k) = o;
      trace.candidate(r, k) = g;
      trace.cell(r, k) = c;
      trace.cell_tanh(r, k) = ct;
      trace.hidden(r, k) = o * ct;
    }
    h_prev = trace.hidden.col(k);
    c_prev = trace.cell.col(k);
  }
  return trace;
}

template <typename T>
DropoutMasks<T> SampleDropout(size_t hidden, size_t steps, double rate,
                              uint64_t seed) {
  DropoutMasks<T> masks;
  if (rate <= 0.0) return masks;
  if (rate >= 1.0) throw UsageError("dropout rate must be < 1");
  Rng rng(seed);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  for (auto* mask : {&masks.forward, &masks.backward}) {
    mask->resize(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(steps));
    for (Eigen::Index c = 0; c < mask->cols(); ++c) {
      for (Eigen::Index r = 0; r < mask->rows(); ++r) {
        (*mask)(r, c) = rng.Uniform() >= rate ? keep_scale : T(0);
      }
    }
  }
  return masks;
}

template <typename T>
ForwardPass<T> RunNetwork(const NetworkParams<T>& params, const Matrix<T>& inputs,
                          Task task, const DropoutMasks<T>* masks) {
  ForwardPass<T> pass;
  pass.forward = LstmForward(params.forward, inputs, Direction::kForward);
  pass.backward = LstmForward(params.backward, inputs, Direction::kBackward);
  if (masks != nullptr && masks->forward.size() > 0) pass.masks = *masks;

  auto embed = [&](const LstmTrace<T>& trace, const Matrix<T>& mask) {
    Matrix<T> pre = mask.size() > 0
                        ? Matrix<T>(params.shared.bottleneck_weights *
                                    trace.hidden.cwiseProduct(mask))
                        : Matrix<T>(params.shared.bottleneck_weights * trace.hidden);
    pre.colwise() += params.shared.bottleneck_bias.col(0);
    return Matrix<T>(pre.array().tanh().matrix());
  };
  pass.embedding_forward = embed(pass.forward, pass.masks.forward);
  pass.embedding_backward = embed(pass.backward, pass.masks.backward);

  pass.logits = params.shared.output_weights *
                (pass.embedding_forward + pass.embedding_backward);
  pass.logits.colwise() += params.shared.output_bias.col(0);

  pass.scores.resize(pass.logits.rows(), pass.logits.cols());
  for (Eigen::Index k = 0; k < pass.logits.cols(); ++k) {
    if (task == Task::kSingle) {
      const T max = pass.logits.col(k).maxCoeff();
      const auto shifted = (pass.logits.col(k).array() - max).exp();
      pass.scores.col(k) = (shifted / shifted.sum()).matrix();
    } else {
      for (Eigen::Index r = 0; r < pass.logits.rows(); ++r) {
        pass.scores(r, k) = Sigmoid(pass.logits(r, k));
      }
    }
  }
  return pass;
}

template <typename T>
void Backpropagate(const NetworkParams<T>& params, const Matrix<T>& inputs,
                   const ForwardPass<T>& pass, const Matrix<T>& dlogits,
                   NetworkParams<T>& grads) {
  grads.shared.output_weights.noalias() +=
      dlogits * (pass.embedding_forward + pass.embedding_backward).transpose();
  grads.shared.output_bias += dlogits.rowwise().sum();
  // Both directions receive the same upstream gradient through the tied
  // output weights.
  const Matrix<T> dembedding = params.shared.output_weights.transpose() * dlogits;

  auto direction = [&](const Matrix<T>& embedding, const LstmTrace<T>& trace,
                       const Matrix<T>& mask, const LstmParams<T>& lstm,
                       LstmParams<T>& lstm_grads) {
    const Matrix<T> dpre =
        dembedding.cwiseProduct((T(1) - embedding.array().square()).matrix());
    const Matrix<T> dropped =
        mask.size() > 0 ? Matrix<T>(trace.hidden.cwiseProduct(mask)) : trace.hidden;
    grads.shared.bottleneck_weights.noalias() += dpre * dropped.transpose();
    grads.shared.bottleneck_bias += dpre.rowwise().sum();
    Matrix<T> dhidden = params.shared.bottleneck_weights.transpose() * dpre;
    if (mask.size() > 0) dhidden = dhidden.cwiseProduct(mask);
    LstmBackward(lstm, trace, inputs, dhidden, lstm_grads);
  };
  direction(pass.embedding_forward, pass.forward, pass.masks.forward,
            params.forward, grads.forward);
  direction(pass.embedding_backward, pass.backward, pass.masks.backward,
            params.backward, grads.backward);
}

template <typename T>
LossResult<T> CrossEntropyLoss(const Matrix<T>& logits,
                               std::span<const size_t> labels) {
  const Eigen::Index n = logits.cols();
  if (static_cast<size_t>(n) != labels.size()) {
    throw DataError("label count does not match the number of sentences");
  }
  const T log_floor = static_cast<T>(std::log(kProbabilityFloor));
  LossResult<T> result;
  result.dlogits = Matrix<T>::Zero(logits.rows(), n);
  double total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const size_t label = labels[static_cast<size_t>(k)];
    if (label >= static_cast<size_t>(logits.rows())) {
      throw DataError("target label index " + std::to_string(label) +
                      " out of range");
    }
    const T max = logits.col(k).maxCoeff();
    const T sum = (logits.col(k).array() - max).exp().sum();
    const T lse = max + std::log(sum);
    const T log_p = logits(static_cast<Eigen::Index>(label), k) - lse;
    if (log_p < log_floor) {
      total -= static_cast<double>(log_floor);
      continue;
    }
    total -= static_cast<double>(log_p);
    result.dlogits.col(k) = (logits.col(k).array() - lse).exp().matrix();
    result.dlogits(static_cast<Eigen::Index>(label), k) -= T(1);
  }
  const T inv_n = T(1) / static_cast<T>(n);
  result.loss = static_cast<T>(total) * inv_n;
  result.dlogits *= inv_n;
  return result;
}

template <typename T>
LossResult<T> BinaryCrossEntropyLoss(
    const Matrix<T>& logits, const std::vector<std::vector<size_t>>& positives) {
  const Eigen::Index n = logits.cols();
  const Eigen::Index l = logits.rows();
  if (static_cast<size_t>(n) != positives.size()) {
    throw DataError("target count does not match the number of sentences");
  }
  const T max_term = static_cast<T>(-std::log(kProbabilityFloor));
  LossResult<T> result;
  result.dlogits = Matrix<T>::Zero(l, n);
  double total = 0.0;
  Matrix<T> target(l, 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    target.setZero();
    for (size_t p : positives[static_cast<size_t>(k)]) {
      if (p >= static_cast<size_t>(l)) {
        throw DataError("target label index " + std::to_string(p) + " out of range");
      }
      target(static_cast<Eigen::Index>(p), 0) = T(1);
    }
    for (Eigen::Index r = 0; r < l; ++r) {
      const T a = logits(r, k);
      const T p = Sigmoid(a);
      if (target(r, 0) > T(0)) {
        const T term = Softplus(-a);  // -log sigmoid(a)
        if (term > max_term) {
          total += static_cast<double>(max_term);
        } else {
          total += static_cast<double>(term);
          result.dlogits(r, k) = p - T(1);
        }
      } else {
        const T term = Softplus(a);  // -log(1 - sigmoid(a))
        if (term > max_term) {
          total += static_cast<double>(max_term);
        } else {
          total += static_cast<double>(term);
          result.dlogits(r, k) = p;
        }
      }
    }
  }
  const T inv = T(1) / static_cast<T>(n * l);
  result.loss = static_cast<T>(total) * inv;
  result.dlogits *= inv;
  return result;
}

template <typename T>
LossResult<T> RankingLoss(const Matrix<T>& logits,
                          const std::vector<std::vector<size_t>>& positives,
                          const RankingParams& params) {
  const Eigen::Index n = logits.cols();
  const Eigen::Index l = logits.rows();
  if (static_cast<size_t>(n) != positives.size()) {
    throw DataError("target count does not match the number of sentences");
  }
  const T gamma = static_cast<T>(params.gamma);
  const T m_pos = static_cast<T>(params.margin_positive);
  const T m_neg = static_cast<T>(params.margin_negative);
  LossResult<T> result;
  result.dlogits = Matrix<T>::Zero(l, n);
  double total = 0.0;
  std::vector<bool> is_positive(static_cast<size_t>(l));
  for (Eigen::Index k = 0; k < n; ++k) {
    std::fill(is_positive.begin(), is_positive.end(), false);
    const auto& pos = positives[static_cast<size_t>(k)];
    for (size_t p : pos) {
      if (p >= static_cast<size_t>(l)) {
        throw DataError("target label index " + std::to_string(p) + " out of range");
      }
      is_positive[p] = true;
    }
    size_t n_pos = 0;
    T score_pos = 0;
    Eigen::Index worst = -1;
    for (Eigen::Index r = 0; r < l; ++r) {
      if (is_positive[static_cast<size_t>(r)]) {
        score_pos += logits(r, k);
        ++n_pos;
      } else if (worst < 0 || logits(r, k) > logits(worst, k)) {
        worst = r;
      }
    }
    if (n_pos > 0) {
      score_pos /= static_cast<T>(n_pos);
      const T x = gamma * (m_pos - score_pos);
      total += static_cast<double>(Softplus(x));
      const T d_score = -gamma * Sigmoid(x) / static_cast<T>(n_pos);
      for (Eigen::Index r = 0; r < l; ++r) {
        if (is_positive[static_cast<size_t>(r)]) result.dlogits(r, k) += d_score;
      }
    }
    if (worst >= 0) {
      const T x = gamma * (m_neg + logits(worst, k));
      total += static_cast<double>(Softplus(x));
      result.dlogits(worst, k) += gamma * Sigmoid(x);
    }
  }
  const T inv_n = T(1) / static_cast<T>(n);
  result.loss = static_cast<T>(total) * inv_n;
  result.dlogits *= inv_n;
  return result;
}

double SingleLabelLoss(const Matrix<double>& probabilities,
                       std::span<const size_t> labels) {
  if (static_cast<size_t>(probabilities.cols()) != labels.size()) {
    throw DataError("label count does not match the number of sentences");
  }
  double total = 0.0;
  for (Eigen::Index k = 0; k < probabilities.cols(); ++k) {
    const size_t label = labels[static_cast<size_t>(k)];
    if (label >= static_cast<size_t>(probabilities.rows())) {
      throw DataError("target label index " + std::to_string(label) +
                      " out of range");
    }
    total -= std::log(std::max(
        probabilities(static_cast<Eigen::Index>(label), k), kProbabilityFloor));
  }
  return total / static_cast<double>(probabilities.cols());
}

double MultiLabelBceLoss(const Matrix<double>& probabilities,
                         const std::vector<std::vector<size_t>>& positives) {
  if (static_cast<size_t>(probabilities.cols()) != positives.size()) {
    throw DataError("target count does not match the number of sentences");
  }
  double total = 0.0;
  for (Eigen::Index k = 0; k < probabilities.cols(); ++k) {
    std::vector<bool> positive(static_cast<size_t>(probabilities.rows()), false);
    for (size_t p : positives[static_cast<size_t>(k)]) {
      if (p >= positive.size()) {
        throw DataError("target label index " + std::to_string(p) + " out of range");
      }
      positive[p] = true;
    }
    for (Eigen::Index r = 0; r < probabilities.rows(); ++r) {
      const double p = probabilities(r, k);
      total -= positive[static_cast<size_t>(r)]
                   ? std::log(std::max(p, kProbabilityFloor))
                   : std::log(std::max(1.0 - p, kProbabilityFloor));
    }
  }
  return total / static_cast<double>(probabilities.size());
}

double RankingLossScalar(std::span<const double> scores,
                         std::span<const size_t> positives,
                         const RankingParams& params) {
  if (positives.empty()) throw DataError("ranking loss needs a positive label");
  std::vector<bool> is_positive(scores.size(), false);
  for (size_t p : positives) {
    if (p >= scores.size()) {
      throw DataError("target label index " + std::to_string(p) + " out of range");
    }
    is_positive[p] = true;
  }
  double positive_sum = 0.0;
  size_t n_pos = 0;
  double worst = -std::numeric_limits<double>::infinity();
  bool has_negative = false;
  for (size_t r = 0; r < scores.size(); ++r) {
    if (is_positive[r]) {
      positive_sum += scores[r];
      ++n_pos;
    } else {
      worst = std::max(worst, scores[r]);
      has_negative = true;
    }
  }
  if (!has_negative) {
    throw DataError("ranking loss needs at least one negative label");
  }
  const double score_pos = positive_sum / static_cast<double>(n_pos);
  return Softplus(params.gamma * (params.margin_positive - score_pos)) +
         Softplus(params.gamma * (params.margin_negative + worst));
}

template <typename T>
T DocumentLossAndGradient(const NetworkParams<T>& params, const Matrix<T>& inputs,
                          Task task, LossKind loss, const RankingParams& ranking,
                          const SentenceTargetsView& targets,
                          const DropoutMasks<T>* masks, NetworkParams<T>* grads,
                          T loss_scale) {
  const auto pass = RunNetwork(params, inputs, task, masks);
  LossResult<T> result;
  switch (loss) {
    case LossKind::kCrossEntropy:
      if (task != Task::kSingle) {
        throw UsageError("cross-entropy loss needs the single-label task");
      }
      result = CrossEntropyLoss(pass.logits, targets.labels);
      break;
    case LossKind::kBce:
    case LossKind::kRanking:
      if (task != Task::kMulti || targets.positives == nullptr) {
        throw UsageError(LossName(loss) + " loss needs the multi-label task");
      }
      result = loss == LossKind::kBce
                   ? BinaryCrossEntropyLoss(pass.logits, *targets.positives)
                   : RankingLoss(pass.logits, *targets.positives, ranking);
      break;
  }
  if (grads != nullptr) {
    if (loss_scale != T(1)) result.dlogits *= loss_scale;
    Backpropagate(params, inputs, pass, result.dlogits, *grads);
  }
  return result.loss * loss_scale;
}

#define SECTOR_INSTANTIATE(T)                                                  \
  template struct NetworkParams<T>;                                            \
  template LstmTrace<T> LstmForward(const LstmParams<T>&, const Matrix<T>&,    \
                                    Direction);                                \
  template DropoutMasks<T> SampleDropout<T>(size_t, size_t, double, uint64_t); \
  template ForwardPass<T> RunNetwork(const NetworkParams<T>&,                  \
                                     const Matrix<T>&, Task,                   \
                                     const DropoutMasks<T>*);                  \
  template void Backpropagate(const NetworkParams<T>&, const Matrix<T>&,       \
                              const ForwardPass<T>&, const Matrix<T>&,         \
                              NetworkParams<T>&);                              \
  template LossResult<T> CrossEntropyLoss(const Matrix<T>&,                    \
                                          std::span<const size_t>);            \
  template LossResult<T> BinaryCrossEntropyLoss(                               \
      const Matrix<T>&, const std::vector<std::vector<size_t>>&);              \
  template LossResult<T> RankingLoss(const Matrix<T>&,                         \
                                     const std::vector<std::vector<size_t>>&,  \
                                     const RankingParams&);                    \
  template T DocumentLossAndGradient(                                          \
      const NetworkParams<T>&, const Matrix<T>&, Task, LossKind,               \
      const RankingParams&, const SentenceTargetsView&,                        \
      const DropoutMasks<T>*, NetworkParams<T>*, T);

SECTOR_INSTANTIATE(float)
SECTOR_INSTANTIATE(double)

#undef SECTOR_INSTANTIATE

}  // namespace sector
