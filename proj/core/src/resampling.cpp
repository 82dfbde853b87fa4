#include "dfocast/resampling.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>

#include "dfocast/error.hpp"
#include "dfocast/random.hpp"

namespace dfocast::resampling {

const char* to_string(Mode mode) noexcept {
  return mode == Mode::Additive ? "additive" : "bagging";
}

Mode mode_from_string(const std::string& text) {
  if (text == "additive") return Mode::Additive;
  if (text == "bagging") return Mode::Bagging;
  throw Error(ErrorKind::Schema, "unknown resampling mode '" + text + "'");
}

std::vector<Block> contiguous_blocks(std::size_t size, std::size_t count) {
  if (count == 0 || count > size) {
    throw Error(ErrorKind::InvalidInput, "cannot split " + std::to_string(size) +
                                             " items into " + std::to_string(count) + " blocks");
  }
  const std::size_t width = size / count;
  std::vector<Block> blocks(count);
  for (std::size_t i = 0; i < count; ++i) {
    blocks[i].begin = i * width;
    blocks[i].end = i + 1 == count ? size : (i + 1) * width;
  }
  return blocks;
}

namespace {

std::vector<std::vector<std::size_t>> additive_eval(std::size_t eval_size, std::size_t ef) {
  std::vector<std::vector<std::size_t>> out;
  for (const Block& b : contiguous_blocks(eval_size, ef)) {
    std::vector<std::size_t> idx(b.end - b.begin);
    std::iota(idx.begin(), idx.end(), b.begin);
    out.push_back(std::move(idx));
  }
  return out;
}

}  // namespace

ResamplingPlan additive_plan(std::size_t train_size, std::size_t eval_size, std::size_t ef,
                             std::uint64_t /*seed*/) {
  if (ef == 0 || train_size < ef || eval_size < ef) {
    throw Error(ErrorKind::InvalidInput,
                "additive resampling needs 1 <= ef <= min(train_size, eval_size)");
  }
  ResamplingPlan plan;
  plan.mode = Mode::Additive;
  plan.ef = ef;
  plan.train_size = train_size;
  plan.eval_size = eval_size;
  for (const Block& b : contiguous_blocks(train_size, ef)) {
    std::vector<std::size_t> idx(train_size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = b.begin; j < b.end; ++j) idx.push_back(j);
    plan.member_train_indices.push_back(std::move(idx));
  }
  plan.member_eval_indices = additive_eval(eval_size, ef);
  return plan;
}

ResamplingPlan bagging_sample(std::size_t train_size, std::size_t ef, std::uint64_t seed) {
  if (ef == 0 || train_size == 0) {
    throw Error(ErrorKind::InvalidInput, "bagging needs ef >= 1 and a non-empty pool");
  }
  ResamplingPlan plan;
  plan.mode = Mode::Bagging;
  plan.ef = ef;
  plan.train_size = train_size;
  auto rng = seeded_engine(seed, 0xBA66u);
  std::uniform_int_distribution<std::size_t> pick(0, train_size - 1);
  plan.member_train_indices.resize(ef);
  plan.member_eval_indices.resize(ef);
  for (auto& idx : plan.member_train_indices) {
    idx.resize(train_size);
    for (auto& i : idx) i = pick(rng);
  }
  return plan;
}

ResamplingPlan with_eval_size(ResamplingPlan plan, std::size_t eval_size) {
  if (plan.mode == Mode::Additive) {
    if (eval_size < plan.ef) {
      throw Error(ErrorKind::InvalidInput, "evaluation pool smaller than ef");
    }
    plan.member_eval_indices = additive_eval(eval_size, plan.ef);
    plan.eval_size = eval_size;
  }
  return plan;
}

double unique_fraction(const std::vector<std::size_t>& indices) {
  if (indices.empty()) return 0.0;
  std::vector<std::size_t> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  const auto unique = static_cast<double>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  return unique / static_cast<double>(indices.size());
}

void write_plan_report(std::ostream& out, const ResamplingPlan& plan) {
  out << "mode " << to_string(plan.mode) << ", ef " << plan.ef << ", train pool "
      << plan.train_size;
  if (plan.mode == Mode::Additive) out << ", eval pool " << plan.eval_size;
  out << '\n';
  for (std::size_t i = 0; i < plan.ef; ++i) {
    const auto& train = plan.member_train_indices[i];
    out << "member " << i << ": " << train.size() << " training samples";
    if (plan.mode == Mode::Additive) {
      const auto& eval = plan.member_eval_indices[i];
      const std::size_t dup_begin = train.size() > plan.train_size ? train[plan.train_size] : 0;
      out << " (full pool + duplicate [" << dup_begin << ", " << train.back() + 1
          << ")), evaluates [" << eval.front() << ", " << eval.back() + 1 << ")";
    } else {
      out << ", unique fraction " << unique_fraction(train);
    }
    out << '\n';
  }
}

}  // namespace dfocast::resampling
