#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dfocast/sample.hpp"

namespace dfocast::nn {

struct Seq2SeqConfig {
  int window = 12;            // T, encoder steps
  int horizon = 1;            // T', steps between last input and target
  int hidden = 16;            // H
  int layers = 1;
  int epochs = 25;
  int batch_size = 32;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
  bool use_bias = false;      // gate and projection biases; off by default

  /// Throws InvalidParameter on non-positive counts or learning rate.
  void validate() const;

  friend bool operator==(const Seq2SeqConfig&, const Seq2SeqConfig&) = default;
};

/// Weights of one LSTM layer. The `*_in` matrices act on the layer input
/// (H x Q), the `*_rec` matrices on the previous hidden state (H x H).
/// Bias vectors are empty unless the model was built with use_bias.
struct LstmWeights {
  Eigen::MatrixXd forget_in, input_in, output_in, cell_in;
  Eigen::MatrixXd forget_rec, input_rec, output_rec, cell_rec;
  Eigen::VectorXd forget_bias, input_bias, output_bias, cell_bias;

  Eigen::Index hidden_size() const { return forget_rec.rows(); }
  Eigen::Index input_size() const { return forget_in.cols(); }
  bool has_bias() const { return forget_bias.size() > 0; }
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;

  static LstmState zeros(Eigen::Index hidden) {
    return {Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(hidden)};
  }
};

/// Encoder/decoder LSTM stacks and the linear read-out of the top decoder
/// hidden state. The same type doubles as the gradient container.
struct Seq2SeqModel {
  Seq2SeqConfig config;
  Eigen::Index input_size = 0;  // Q
  std::vector<LstmWeights> encoder;
  std::vector<LstmWeights> decoder;
  Eigen::RowVectorXd projection;  // 1 x H
  double projection_bias = 0.0;   // trained only with use_bias
};

/// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero biases. Deterministic in seed.
Seq2SeqModel init_weights(const Seq2SeqConfig& config, Eigen::Index input_size,
                          std::uint64_t seed);

/// A model of the right shape with every parameter zero.
Seq2SeqModel zeros_like(const Seq2SeqModel& model);

LstmState lstm_step(const LstmWeights& weights, const Eigen::VectorXd& input,
                    const LstmState& state);

/// Encodes the T x Q window from a zero state, seeds the decoder with the
/// encoder's final (h, c) per layer, runs one decoder step on a zero input and
/// projects the top hidden state.
double forward(const Seq2SeqModel& model, const Eigen::MatrixXd& input);

inline double predict(const Seq2SeqModel& model, const Eigen::MatrixXd& input) {
  return forward(model, input);
}

/// Batched inference; result[i] == forward(model, samples[i].input).
std::vector<double> predict_batch(const Seq2SeqModel& model,
                                  std::span<const WindowedSample> samples);

struct GradientResult {
  Seq2SeqModel gradient;
  double loss = 0.0;  // mean squared error over the batch
};

GradientResult compute_gradients(const Seq2SeqModel& model,
                                 std::span<const WindowedSample> samples);
GradientResult compute_gradients(const Seq2SeqModel& model,
                                 std::span<const WindowedSample> samples,
                                 std::span<const std::size_t> indices);

// Flat parameter view, in a fixed order shared by every model of one shape.
std::size_t parameter_count(const Seq2SeqModel& model);
Eigen::VectorXd flatten(const Seq2SeqModel& model);
void unflatten(const Eigen::VectorXd& values, Seq2SeqModel& model);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_size(std::size_t n) {
    AdamState s;
    s.m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    s.v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    return s;
  }
};

void adam_update(std::span<double> params, std::span<const double> grads,
                 AdamState& state, double learning_rate);

struct FitResult {
  Seq2SeqModel model;
  std::vector<double> train_loss;        // per epoch, mean over samples
  std::vector<double> validation_maape;  // per epoch; empty without validation
  AdamState adam;
};

/// Mini-batch ADAM for config.epochs epochs. Batch order is shuffled by a
/// generator seeded from config.seed.
FitResult fit(Seq2SeqModel model, std::span<const WindowedSample> train,
              std::span<const WindowedSample> validation = {});

/// `steps` full-batch ADAM updates on `samples`, continuing `adam`.
void train_steps(Seq2SeqModel& model, AdamState& adam,
                 std::span<const WindowedSample> samples, int steps);

}  // namespace dfocast::nn
