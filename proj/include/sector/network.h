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

#ifndef SECTOR_NETWORK_H_
#define SECTOR_NETWORK_H_

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sector {

// The topic network: one LSTM per reading direction, a tanh bottleneck shared
// by both directions that yields the topic embeddings, and an output layer
// shared by both directions whose logits are W e_fwd + W e_bwd + b.
//
// Matrices store one sentence per column. Everything is templated on the
// scalar so the same code runs in float for training and in double for the
// gradient check.

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

enum class Task { kSingle, kMulti };
enum class LossKind { kCrossEntropy, kBce, kRanking };
enum class Direction { kForward, kBackward };

std::string TaskName(Task task);
Task ParseTask(const std::string& name);
std::string LossName(LossKind loss);
LossKind ParseLoss(const std::string& name);

struct NetworkDims {
  size_t input = 0;
  size_t hidden = 256;
  size_t embedding = 128;
  size_t labels = 0;
};

// Gate rows are stacked as [input; forget; output; candidate], H rows each.
template <typename T>
struct LstmParams {
  Matrix<T> input_weights;      // 4H x input
  Matrix<T> recurrent_weights;  // 4H x H
  Matrix<T> bias;               // 4H x 1

  size_t hidden() const { return static_cast<size_t>(recurrent_weights.cols()); }
};

template <typename T>
struct SharedParams {
  Matrix<T> bottleneck_weights;  // E x H
  Matrix<T> bottleneck_bias;     // E x 1
  Matrix<T> output_weights;      // labels x E
  Matrix<T> output_bias;         // labels x 1
};

template <typename T>
struct NetworkParams {
  LstmParams<T> forward;
  LstmParams<T> backward;
  SharedParams<T> shared;

  static NetworkParams Zeros(const NetworkDims& dims);

  // Uniform in +-sqrt(6 / (fan_in + fan_out)) per weight block, zero biases
  // except the forget gate bias, which starts at 1.
  static NetworkParams Initialize(const NetworkDims& dims, uint64_t seed);

  NetworkDims dims() const;

  // Stable order used for persistence, optimization and gradient checks.
  std::vector<std::pair<std::string, Matrix<T>*>> Tensors();
  std::vector<std::pair<std::string, const Matrix<T>*>> Tensors() const;

  template <typename U>
  NetworkParams<U> Cast() const {
    NetworkParams<U> out;
    out.forward = {forward.input_weights.template cast<U>(),
                   forward.recurrent_weights.template cast<U>(),
                   forward.bias.template cast<U>()};
    out.backward = {backward.input_weights.template cast<U>(),
                    backward.recurrent_weights.template cast<U>(),
                    backward.bias.template cast<U>()};
    out.shared = {shared.bottleneck_weights.template cast<U>(),
                  shared.bottleneck_bias.template cast<U>(),
                  shared.output_weights.template cast<U>(),
                  shared.output_bias.template cast<U>()};
    return out;
  }

  void SetZero();
  void AddScaled(const NetworkParams& other, T scale);
  void Scale(T factor);
  bool AllFinite() const;
};

// Per-step activations kept for backpropagation. Column k always refers to
// sentence k, whatever the reading direction.
template <typename T>
struct LstmTrace {
  Direction direction = Direction::kForward;
  Matrix<T> input_gate;
  Matrix<T> forget_gate;
  Matrix<T> output_gate;
  Matrix<T> candidate;
  Matrix<T> cell;
  Matrix<T> cell_tanh;
  Matrix<T> hidden;
};

// Standard LSTM with forget gate and zero initial state. The backward
// direction reads sentences N..1. Throws NumericError on NaN input.
template <typename T>
LstmTrace<T> LstmForward(const LstmParams<T>& params, const Matrix<T>& inputs,
                         Direction direction);

// Inverted dropout masks (0 or 1/(1-rate)) on the hidden states that feed the
// bottleneck. Empty masks mean no dropout.
template <typename T>
struct DropoutMasks {
  Matrix<T> forward;
  Matrix<T> backward;
};

template <typename T>
DropoutMasks<T> SampleDropout(size_t hidden, size_t steps, double rate,
                              uint64_t seed);

template <typename T>
struct ForwardPass {
  LstmTrace<T> forward;
  LstmTrace<T> backward;
  DropoutMasks<T> masks;
  Matrix<T> embedding_forward;   // E x N
  Matrix<T> embedding_backward;  // E x N
  Matrix<T> logits;              // labels x N
  Matrix<T> scores;              // softmax or sigmoid of logits
};

template <typename T>
ForwardPass<T> RunNetwork(const NetworkParams<T>& params, const Matrix<T>& inputs,
                          Task task, const DropoutMasks<T>* masks = nullptr);

// Accumulates d loss / d params into `grads` given d loss / d logits.
template <typename T>
void Backpropagate(const NetworkParams<T>& params, const Matrix<T>& inputs,
                   const ForwardPass<T>& pass, const Matrix<T>& dlogits,
                   NetworkParams<T>& grads);

struct RankingParams {
  double gamma = 2.0;
  double margin_positive = 2.5;
  double margin_negative = 0.5;
};

template <typename T>
struct LossResult {
  T loss = 0;
  Matrix<T> dlogits;
};

// Probabilities are clamped at this value before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

// Mean over sentences of -log softmax(logits)[label].
template <typename T>
LossResult<T> CrossEntropyLoss(const Matrix<T>& logits,
                               std::span<const size_t> labels);

// Mean over sentences and labels of the binary cross-entropy of
// sigmoid(logits) against the multi-hot targets.
template <typename T>
LossResult<T> BinaryCrossEntropyLoss(const Matrix<T>& logits,
                                     const std::vector<std::vector<size_t>>& positives);

// Mean over sentences of the pairwise ranking loss on raw logits. Sentences
// without positive labels contribute only the negative term.
template <typename T>
LossResult<T> RankingLoss(const Matrix<T>& logits,
                          const std::vector<std::vector<size_t>>& positives,
                          const RankingParams& params);

// Score-level losses. `probabilities` holds one sentence per column.
double SingleLabelLoss(const Matrix<double>& probabilities,
                       std::span<const size_t> labels);
double MultiLabelBceLoss(const Matrix<double>& probabilities,
                         const std::vector<std::vector<size_t>>& positives);

// log(1 + exp(g (m+ - mean positive score))) +
// log(1 + exp(g (m- + max negative score))).
double RankingLossScalar(std::span<const double> scores,
                         std::span<const size_t> positives,
                         const RankingParams& params);

struct SentenceTargetsView {
  std::span<const size_t> labels;                         // single-label task
  const std::vector<std::vector<size_t>>* positives = nullptr;  // multi-label task
};

// Forward pass, loss and (optional) gradient accumulation for one document.
template <typename T>
T DocumentLossAndGradient(const NetworkParams<T>& params, const Matrix<T>& inputs,
                          Task task, LossKind loss, const RankingParams& ranking,
                          const SentenceTargetsView& targets,
                          const DropoutMasks<T>* masks, NetworkParams<T>* grads,
                          T loss_scale = T(1));

}  // namespace sector

#endif  // SECTOR_NETWORK_H_
