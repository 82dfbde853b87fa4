#include "dfocast/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

#include "dfocast/error.hpp"
#include "dfocast/text.hpp"

namespace dfocast::ensemble {

EnsembleModel train_ensemble(std::span<const WindowedSample> train,
                             const resampling::ResamplingPlan& plan,
                             const nn::Seq2SeqConfig& config, const TrainOptions& options) {
  config.validate();
  if (plan.train_size != train.size() || plan.member_train_indices.size() != plan.ef) {
    throw Error(ErrorKind::InvalidInput,
                "resampling plan expects " + std::to_string(plan.train_size) +
                    " training samples, got " + std::to_string(train.size()));
  }
  if (train.empty()) throw Error(ErrorKind::InvalidInput, "no training samples");
  const Eigen::Index q = train.front().input.cols();

  EnsembleModel model;
  model.plan = plan;
  model.config = config;
  model.members.resize(plan.ef);
  model.member_train_loss.resize(plan.ef);

  auto train_member = [&](std::size_t i) {
    std::vector<WindowedSample> own;
    own.reserve(plan.member_train_indices[i].size());
    for (std::size_t idx : plan.member_train_indices[i]) {
      if (idx >= train.size()) throw Error(ErrorKind::InvalidInput, "plan index out of range");
      own.push_back(train[idx]);
    }
    nn::Seq2SeqConfig member_config = config;
    member_config.seed = config.seed + i;
    nn::FitResult fitted =
        nn::fit(nn::init_weights(member_config, q, member_config.seed), own);
    model.members[i] = std::move(fitted.model);
    model.member_train_loss[i] = std::move(fitted.train_loss);
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(plan.ef)));
  if (workers == 1) {
    for (std::size_t i = 0; i < plan.ef; ++i) train_member(i);
    return model;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(plan.ef);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < plan.ef; i = next++) {
        try {
          train_member(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return model;
}

EnsemblePrediction predict_ensemble(const EnsembleModel& model,
                                    std::span<const WindowedSample> eval) {
  const auto& plan = model.plan;
  EnsemblePrediction out;
  if (plan.mode == resampling::Mode::Additive) {
    if (eval.size() != plan.eval_size) {
      throw Error(ErrorKind::InvalidInput,
                  "evaluation pool has " + std::to_string(eval.size()) +
                      " samples, plan expects " + std::to_string(plan.eval_size));
    }
    out.predicted.assign(eval.size(), 0.0);
    out.member.assign(eval.size(), -1);
    for (std::size_t i = 0; i < plan.ef; ++i) {
      const auto& idx = plan.member_eval_indices[i];
      if (idx.empty()) continue;
      // Blocks are contiguous, so the member's slice is a subspan.
      const auto part = eval.subspan(idx.front(), idx.size());
      const std::vector<double> y = nn::predict_batch(model.members[i], part);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        out.predicted[idx[k]] = y[k];
        out.member[idx[k]] = static_cast<int>(i);
      }
    }
    return out;
  }
  out.predicted.assign(eval.size(), 0.0);
  out.member.assign(eval.size(), -1);
  for (const auto& member : model.members) {
    const std::vector<double> y = nn::predict_batch(member, eval);
    for (std::size_t k = 0; k < y.size(); ++k) out.predicted[k] += y[k];
  }
  for (double& v : out.predicted) v /= static_cast<double>(model.members.size());
  return out;
}

std::vector<double> targets_of(std::span<const WindowedSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.target);
  return out;
}

metrics::ErrorReport evaluate_ensemble(const EnsembleModel& model,
                                       std::span<const WindowedSample> eval,
                                       double huber_delta) {
  const EnsemblePrediction p = predict_ensemble(model, eval);
  const std::vector<double> actual = targets_of(eval);
  return metrics::error_report({actual, p.predicted}, huber_delta);
}

void write_predictions_csv(std::ostream& out, std::span<const WindowedSample> samples,
                           const EnsemblePrediction& prediction, std::size_t index_offset,
                           bool with_member) {
  out << "index,actual,predicted" << (with_member ? ",member_id" : "") << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << index_offset + samples[i].target_index << ',' << format_double(samples[i].target)
        << ',' << format_double(prediction.predicted[i]);
    if (with_member) out << ',' << prediction.member[i];
    out << '\n';
  }
}

}  // namespace dfocast::ensemble
