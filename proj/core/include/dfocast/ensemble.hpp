#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dfocast/metrics.hpp"
#include "dfocast/nn.hpp"
#include "dfocast/resampling.hpp"
#include "dfocast/sample.hpp"

namespace dfocast::ensemble {

struct EnsembleModel {
  std::vector<nn::Seq2SeqModel> members;
  resampling::ResamplingPlan plan;
  nn::Seq2SeqConfig config;
  std::vector<std::vector<double>> member_train_loss;
};

struct TrainOptions {
  unsigned threads = 1;  // members trained concurrently; results do not depend on it
};

/// Trains member i on the samples listed in plan.member_train_indices[i] with
/// seed config.seed + i.
EnsembleModel train_ensemble(std::span<const WindowedSample> train,
                             const resampling::ResamplingPlan& plan,
                             const nn::Seq2SeqConfig& config, const TrainOptions& options = {});

struct EnsemblePrediction {
  std::vector<double> predicted;
  std::vector<int> member;  // owning member (additive); -1 when averaged
};

/// Additive: each index is answered by the member owning it. Bagging: mean of
/// all members.
EnsemblePrediction predict_ensemble(const EnsembleModel& model,
                                    std::span<const WindowedSample> eval);

metrics::ErrorReport evaluate_ensemble(const EnsembleModel& model,
                                       std::span<const WindowedSample> eval,
                                       double huber_delta = metrics::kDefaultHuberDelta);

std::vector<double> targets_of(std::span<const WindowedSample> samples);

/// CSV columns index,actual,predicted[,member_id]. `index_offset` maps
/// sample target indices to rows of the original dataset.
void write_predictions_csv(std::ostream& out, std::span<const WindowedSample> samples,
                           const EnsemblePrediction& prediction, std::size_t index_offset,
                           bool with_member);

}  // namespace dfocast::ensemble
