#include "dfocast/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dfocast/error.hpp"
#include "dfocast/random.hpp"
#include "dfocast/metrics.hpp"

namespace dfocast::nn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void Seq2SeqConfig::validate() const {
  if (window < 1 || horizon < 1 || hidden < 1 || layers < 1 || epochs < 1 ||
      batch_size < 1) {
    throw Error(ErrorKind::InvalidParameter,
                "seq2seq counts (window, horizon, hidden, layers, epochs, "
                "batch_size) must all be >= 1");
  }
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "learning_rate must be positive");
  }
}

namespace {

// Calls fn(pointer, size) for every parameter block in a fixed order.
template <class Weights, class Fn>
void visit_layer(Weights& w, bool bias, Fn&& fn) {
  for (auto* m : {&w.forget_in, &w.input_in, &w.output_in, &w.cell_in,
                  &w.forget_rec, &w.input_rec, &w.output_rec, &w.cell_rec}) {
    fn(m->data(), m->size());
  }
  if (bias) {
    for (auto* b : {&w.forget_bias, &w.input_bias, &w.output_bias, &w.cell_bias}) {
      fn(b->data(), b->size());
    }
  }
}

template <class Model, class Fn>
void visit(Model& model, Fn&& fn) {
  const bool bias = model.config.use_bias;
  for (auto& layer : model.encoder) visit_layer(layer, bias, fn);
  for (auto& layer : model.decoder) visit_layer(layer, bias, fn);
  fn(model.projection.data(), model.projection.size());
  if (bias) fn(&model.projection_bias, Index{1});
}

LstmWeights make_layer(Index hidden, Index input, bool bias) {
  LstmWeights w;
  for (auto* m : {&w.forget_in, &w.input_in, &w.output_in, &w.cell_in}) {
    *m = MatrixXd::Zero(hidden, input);
  }
  for (auto* m : {&w.forget_rec, &w.input_rec, &w.output_rec, &w.cell_rec}) {
    *m = MatrixXd::Zero(hidden, hidden);
  }
  if (bias) {
    for (auto* b : {&w.forget_bias, &w.input_bias, &w.output_bias, &w.cell_bias}) {
      *b = VectorXd::Zero(hidden);
    }
  }
  return w;
}

Seq2SeqModel make_shape(const Seq2SeqConfig& config, Index input_size) {
  Seq2SeqModel model;
  model.config = config;
  model.input_size = input_size;
  const Index h = config.hidden;
  for (int k = 0; k < config.layers; ++k) {
    const Index in = k == 0 ? input_size : h;
    model.encoder.push_back(make_layer(h, in, config.use_bias));
    model.decoder.push_back(make_layer(h, in, config.use_bias));
  }
  model.projection = Eigen::RowVectorXd::Zero(h);
  return model;
}

template <class Derived>
MatrixXd sigmoid(const Eigen::MatrixBase<Derived>& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

// Activations of one layer at one time step for a whole batch (columns).
struct StepCache {
  MatrixXd a, h_prev, c_prev;
  MatrixXd f, p, o, g, c, tc, h;
};

void step_forward(const LstmWeights& w, const MatrixXd& a, const MatrixXd& h_prev,
                  const MatrixXd& c_prev, StepCache& s) {
  MatrixXd zf = w.forget_in * a;
  zf.noalias() += w.forget_rec * h_prev;
  MatrixXd zp = w.input_in * a;
  zp.noalias() += w.input_rec * h_prev;
  MatrixXd zo = w.output_in * a;
  zo.noalias() += w.output_rec * h_prev;
  MatrixXd zg = w.cell_in * a;
  zg.noalias() += w.cell_rec * h_prev;
  if (w.has_bias()) {
    zf.colwise() += w.forget_bias;
    zp.colwise() += w.input_bias;
    zo.colwise() += w.output_bias;
    zg.colwise() += w.cell_bias;
  }
  s.a = a;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.f = sigmoid(zf);
  s.p = sigmoid(zp);
  s.o = sigmoid(zo);
  s.g = zg.array().tanh().matrix();
  s.c = s.f.cwiseProduct(c_prev) + s.p.cwiseProduct(s.g);
  s.tc = s.c.array().tanh().matrix();
  s.h = s.o.cwiseProduct(s.tc);
}

// Accumulates parameter gradients into `grad`; writes input and previous-state
// gradients into da, dh_prev, dc_prev.
void step_backward(const LstmWeights& w, const StepCache& s, const MatrixXd& dh,
                   const MatrixXd& dc, LstmWeights& grad, MatrixXd& da,
                   MatrixXd& dh_prev, MatrixXd& dc_prev) {
  const auto one = 1.0;
  const MatrixXd d_o = dh.cwiseProduct(s.tc);
  const MatrixXd dc_total =
      dc + dh.cwiseProduct(s.o).cwiseProduct(
               (one - s.tc.array().square()).matrix());
  const MatrixXd dzf =
      dc_total.cwiseProduct(s.c_prev).cwiseProduct(
          (s.f.array() * (one - s.f.array())).matrix());
  const MatrixXd dzp = dc_total.cwiseProduct(s.g).cwiseProduct(
      (s.p.array() * (one - s.p.array())).matrix());
  const MatrixXd dzo =
      d_o.cwiseProduct((s.o.array() * (one - s.o.array())).matrix());
  const MatrixXd dzg = dc_total.cwiseProduct(s.p).cwiseProduct(
      (one - s.g.array().square()).matrix());
  dc_prev = dc_total.cwiseProduct(s.f);

  grad.forget_in.noalias() += dzf * s.a.transpose();
  grad.input_in.noalias() += dzp * s.a.transpose();
  grad.output_in.noalias() += dzo * s.a.transpose();
  grad.cell_in.noalias() += dzg * s.a.transpose();
  grad.forget_rec.noalias() += dzf * s.h_prev.transpose();
  grad.input_rec.noalias() += dzp * s.h_prev.transpose();
  grad.output_rec.noalias() += dzo * s.h_prev.transpose();
  grad.cell_rec.noalias() += dzg * s.h_prev.transpose();
  if (w.has_bias()) {
    grad.forget_bias += dzf.rowwise().sum();
    grad.input_bias += dzp.rowwise().sum();
    grad.output_bias += dzo.rowwise().sum();
    grad.cell_bias += dzg.rowwise().sum();
  }

  da.noalias() = w.forget_in.transpose() * dzf;
  da.noalias() += w.input_in.transpose() * dzp;
  da.noalias() += w.output_in.transpose() * dzo;
  da.noalias() += w.cell_in.transpose() * dzg;
  dh_prev.noalias() = w.forget_rec.transpose() * dzf;
  dh_prev.noalias() += w.input_rec.transpose() * dzp;
  dh_prev.noalias() += w.output_rec.transpose() * dzo;
  dh_prev.noalias() += w.cell_rec.transpose() * dzg;
}

struct Trace {
  std::vector<std::vector<StepCache>> encoder;  // [layer][t]
  std::vector<StepCache> decoder;               // [layer]
  Eigen::RowVectorXd output;
};

void check_input(const Seq2SeqModel& model, const MatrixXd& input) {
  if (input.rows() != model.config.window) {
    throw Error(ErrorKind::InvalidInput,
                "input window has " + std::to_string(input.rows()) +
                    " rows, model expects " + std::to_string(model.config.window));
  }
  if (input.cols() != model.input_size) {
    throw Error(ErrorKind::InvalidInput,
                "input window has " + std::to_string(input.cols()) +
                    " features, model expects " + std::to_string(model.input_size));
  }
}

template <class IndexFn>
void run_forward(const Seq2SeqModel& model, std::span<const WindowedSample> samples,
                 Index batch, IndexFn&& sample_at, Trace& trace) {
  const Index T = model.config.window;
  const Index Q = model.input_size;
  const Index H = model.config.hidden;
  const auto layers = static_cast<std::size_t>(model.config.layers);

  std::vector<MatrixXd> xs(static_cast<std::size_t>(T), MatrixXd(Q, batch));
  for (Index s = 0; s < batch; ++s) {
    const WindowedSample& sample = samples[sample_at(s)];
    check_input(model, sample.input);
    for (Index t = 0; t < T; ++t) {
      xs[static_cast<std::size_t>(t)].col(s) = sample.input.row(t).transpose();
    }
  }

  trace.encoder.assign(layers, std::vector<StepCache>(static_cast<std::size_t>(T)));
  trace.decoder.assign(layers, StepCache{});
  const MatrixXd zero_state = MatrixXd::Zero(H, batch);
  for (std::size_t k = 0; k < layers; ++k) {
    const MatrixXd* h = &zero_state;
    const MatrixXd* c = &zero_state;
    for (std::size_t t = 0; t < static_cast<std::size_t>(T); ++t) {
      const MatrixXd& a = k == 0 ? xs[t] : trace.encoder[k - 1][t].h;
      StepCache& s = trace.encoder[k][t];
      step_forward(model.encoder[k], a, *h, *c, s);
      h = &s.h;
      c = &s.c;
    }
  }
  const MatrixXd zero_input = MatrixXd::Zero(Q, batch);
  for (std::size_t k = 0; k < layers; ++k) {
    const StepCache& last = trace.encoder[k].back();
    const MatrixXd& a = k == 0 ? zero_input : trace.decoder[k - 1].h;
    step_forward(model.decoder[k], a, last.h, last.c, trace.decoder[k]);
  }
  trace.output = model.projection * trace.decoder.back().h;
  if (model.config.use_bias) trace.output.array() += model.projection_bias;
}

}  // namespace

Seq2SeqModel init_weights(const Seq2SeqConfig& config, Index input_size,
                          std::uint64_t seed) {
  config.validate();
  if (input_size < 1) {
    throw Error(ErrorKind::InvalidParameter, "input size must be >= 1");
  }
  Seq2SeqModel model = make_shape(config, input_size);
  model.config.seed = seed;
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.hidden));
  auto rng = seeded_engine(seed, 0x1417u);
  std::uniform_real_distribution<double> dist(-scale, scale);
  auto fill = [&](double* data, Index n) {
    for (Index i = 0; i < n; ++i) data[i] = dist(rng);
  };
  for (auto& layer : model.encoder) visit_layer(layer, false, fill);
  for (auto& layer : model.decoder) visit_layer(layer, false, fill);
  fill(model.projection.data(), model.projection.size());
  return model;
}

Seq2SeqModel zeros_like(const Seq2SeqModel& model) {
  return make_shape(model.config, model.input_size);
}

LstmState lstm_step(const LstmWeights& w, const VectorXd& input,
                    const LstmState& state) {
  const Index H = w.hidden_size();
  if (input.size() != w.input_size() || state.h.size() != H ||
      state.c.size() != H) {
    throw Error(ErrorKind::InvalidInput, "lstm_step dimension mismatch");
  }
  VectorXd zf = w.forget_in * input + w.forget_rec * state.h;
  VectorXd zp = w.input_in * input + w.input_rec * state.h;
  VectorXd zo = w.output_in * input + w.output_rec * state.h;
  VectorXd zg = w.cell_in * input + w.cell_rec * state.h;
  if (w.has_bias()) {
    zf += w.forget_bias;
    zp += w.input_bias;
    zo += w.output_bias;
    zg += w.cell_bias;
  }
  const VectorXd f = sigmoid(zf);
  const VectorXd p = sigmoid(zp);
  const VectorXd o = sigmoid(zo);
  LstmState next;
  next.c = f.cwiseProduct(state.c) + p.cwiseProduct(zg.array().tanh().matrix());
  next.h = o.cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

double forward(const Seq2SeqModel& model, const MatrixXd& input) {
  check_input(model, input);
  const std::size_t layers = model.encoder.size();
  std::vector<LstmState> states(layers, LstmState::zeros(model.config.hidden));
  for (Index t = 0; t < input.rows(); ++t) {
    VectorXd a = input.row(t).transpose();
    for (std::size_t k = 0; k < layers; ++k) {
      states[k] = lstm_step(model.encoder[k], a, states[k]);
      a = states[k].h;
    }
  }
  VectorXd a = VectorXd::Zero(model.input_size);
  for (std::size_t k = 0; k < layers; ++k) {
    a = lstm_step(model.decoder[k], a, states[k]).h;
  }
  double y = model.projection.dot(a);
  if (model.config.use_bias) y += model.projection_bias;
  return y;
}

std::vector<double> predict_batch(const Seq2SeqModel& model,
                                  std::span<const WindowedSample> samples) {
  constexpr std::size_t kChunk = 256;
  std::vector<double> out;
  out.reserve(samples.size());
  Trace trace;
  for (std::size_t begin = 0; begin < samples.size(); begin += kChunk) {
    const std::size_t n = std::min(kChunk, samples.size() - begin);
    run_forward(model, samples, static_cast<Index>(n),
                [begin](Index s) { return begin + static_cast<std::size_t>(s); },
                trace);
    for (Index s = 0; s < trace.output.size(); ++s) out.push_back(trace.output(s));
  }
  return out;
}

namespace {

template <class IndexFn>
GradientResult gradients_impl(const Seq2SeqModel& model,
                              std::span<const WindowedSample> samples, Index batch,
                              IndexFn&& sample_at) {
  if (batch == 0) {
    throw Error(ErrorKind::InvalidInput, "gradient batch is empty");
  }
  Trace trace;
  run_forward(model, samples, batch, sample_at, trace);

  GradientResult result;
  result.gradient = zeros_like(model);
  Seq2SeqModel& grad = result.gradient;

  Eigen::RowVectorXd dy(batch);
  double loss = 0.0;
  for (Index s = 0; s < batch; ++s) {
    const double r = trace.output(s) - samples[sample_at(s)].target;
    loss += r * r;
    dy(s) = 2.0 * r / static_cast<double>(batch);
  }
  result.loss = loss / static_cast<double>(batch);

  const std::size_t layers = model.encoder.size();
  const Index H = model.config.hidden;
  grad.projection = dy * trace.decoder.back().h.transpose();
  if (model.config.use_bias) grad.projection_bias = dy.sum();

  // Decoder, top layer first. Each layer hands its input gradient down and
  // its initial-state gradient to the encoder layer of the same depth.
  std::vector<MatrixXd> enc_dh_final(layers), enc_dc_final(layers);
  MatrixXd dh = model.projection.transpose() * dy;
  const MatrixXd zero_hb = MatrixXd::Zero(H, batch);
  MatrixXd da, dh_prev, dc_prev;
  for (std::size_t k = layers; k-- > 0;) {
    step_backward(model.decoder[k], trace.decoder[k], dh, zero_hb, grad.decoder[k],
                  da, dh_prev, dc_prev);
    enc_dh_final[k] = dh_prev;
    enc_dc_final[k] = dc_prev;
    dh = da;
  }

  // Encoder, top layer first; `from_above[t]` carries the upper layer's input
  // gradient at time t.
  const auto T = static_cast<std::size_t>(model.config.window);
  std::vector<MatrixXd> from_above;
  std::vector<MatrixXd> to_below(T);
  for (std::size_t k = layers; k-- > 0;) {
    MatrixXd dh_next = enc_dh_final[k];
    MatrixXd dc_next = enc_dc_final[k];
    for (std::size_t t = T; t-- > 0;) {
      MatrixXd dh_t = dh_next;
      if (!from_above.empty()) dh_t += from_above[t];
      step_backward(model.encoder[k], trace.encoder[k][t], dh_t, dc_next,
                    grad.encoder[k], to_below[t], dh_prev, dc_prev);
      dh_next = dh_prev;
      dc_next = dc_prev;
    }
    from_above = to_below;
  }
  return result;
}

}  // namespace

GradientResult compute_gradients(const Seq2SeqModel& model,
                                 std::span<const WindowedSample> samples) {
  return gradients_impl(model, samples, static_cast<Index>(samples.size()),
                        [](Index s) { return static_cast<std::size_t>(s); });
}

GradientResult compute_gradients(const Seq2SeqModel& model,
                                 std::span<const WindowedSample> samples,
                                 std::span<const std::size_t> indices) {
  for (std::size_t i : indices) {
    if (i >= samples.size()) {
      throw Error(ErrorKind::InvalidInput, "sample index out of range");
    }
  }
  return gradients_impl(model, samples, static_cast<Index>(indices.size()),
                        [indices](Index s) { return indices[static_cast<std::size_t>(s)]; });
}

std::size_t parameter_count(const Seq2SeqModel& model) {
  std::size_t n = 0;
  visit(model, [&](const double*, Index size) { n += static_cast<std::size_t>(size); });
  return n;
}

VectorXd flatten(const Seq2SeqModel& model) {
  VectorXd out(static_cast<Index>(parameter_count(model)));
  Index pos = 0;
  visit(model, [&](const double* data, Index size) {
    out.segment(pos, size) = Eigen::Map<const VectorXd>(data, size);
    pos += size;
  });
  return out;
}

void unflatten(const VectorXd& values, Seq2SeqModel& model) {
  if (static_cast<std::size_t>(values.size()) != parameter_count(model)) {
    throw Error(ErrorKind::InvalidInput, "parameter vector size mismatch");
  }
  Index pos = 0;
  visit(model, [&](double* data, Index size) {
    Eigen::Map<VectorXd>(data, size) = values.segment(pos, size);
    pos += size;
  });
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 AdamState& state, double learning_rate) {
  const auto n = static_cast<Index>(params.size());
  if (grads.size() != params.size() || state.m.size() != n || state.v.size() != n) {
    throw Error(ErrorKind::InvalidInput, "adam_update shape mismatch");
  }
  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (Index i = 0; i < n; ++i) {
    const double g = grads[static_cast<std::size_t>(i)];
    state.m(i) = state.beta1 * state.m(i) + (1.0 - state.beta1) * g;
    state.v(i) = state.beta2 * state.v(i) + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m(i) / c1;
    const double v_hat = state.v(i) / c2;
    params[static_cast<std::size_t>(i)] -=
        learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

namespace {

void apply_adam(Seq2SeqModel& model, const Seq2SeqModel& gradient, AdamState& adam) {
  VectorXd params = flatten(model);
  const VectorXd grads = flatten(gradient);
  adam_update(std::span<double>(params.data(), static_cast<std::size_t>(params.size())),
              std::span<const double>(grads.data(), static_cast<std::size_t>(grads.size())),
              adam, model.config.learning_rate);
  unflatten(params, model);
}

}  // namespace

FitResult fit(Seq2SeqModel model, std::span<const WindowedSample> train,
              std::span<const WindowedSample> validation) {
  model.config.validate();
  if (train.empty()) {
    throw Error(ErrorKind::InvalidInput, "fit requires at least one training sample");
  }
  FitResult result;
  result.adam = AdamState::for_size(parameter_count(model));

  const std::uint64_t seed = model.config.seed;
  auto rng = seeded_engine(seed, 0x5A17u);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(model.config.batch_size);

  std::vector<double> actual;
  for (const auto& s : validation) actual.push_back(s.target);

  for (int epoch = 0; epoch < model.config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t n = std::min(batch, order.size() - begin);
      const std::span<const std::size_t> idx(order.data() + begin, n);
      GradientResult g = compute_gradients(model, train, idx);
      loss_sum += g.loss * static_cast<double>(n);
      apply_adam(model, g.gradient, result.adam);
    }
    result.train_loss.push_back(loss_sum / static_cast<double>(train.size()));
    if (!validation.empty()) {
      const std::vector<double> predicted = predict_batch(model, validation);
      result.validation_maape.push_back(metrics::maape({actual, predicted}));
    }
  }
  result.model = std::move(model);
  return result;
}

void train_steps(Seq2SeqModel& model, AdamState& adam,
                 std::span<const WindowedSample> samples, int steps) {
  if (steps <= 0) return;
  if (samples.empty()) {
    throw Error(ErrorKind::InvalidInput, "train_steps requires samples");
  }
  for (int i = 0; i < steps; ++i) {
    GradientResult g = compute_gradients(model, samples);
    apply_adam(model, g.gradient, adam);
  }
}

}  // namespace dfocast::nn
