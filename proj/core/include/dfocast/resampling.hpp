#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dfocast::resampling {

enum class Mode { Additive, Bagging };

const char* to_string(Mode mode) noexcept;
Mode mode_from_string(const std::string& text);  // "additive" | "bagging"

/// Which training samples each ensemble member sees and, for additive
/// resampling, which evaluation samples it answers for. Bagging members all
/// answer for the whole evaluation pool, so their eval lists stay empty.
struct ResamplingPlan {
  Mode mode = Mode::Additive;
  std::size_t ef = 1;
  std::size_t train_size = 0;
  std::size_t eval_size = 0;  // additive only
  std::vector<std::vector<std::size_t>> member_train_indices;
  std::vector<std::vector<std::size_t>> member_eval_indices;
};

struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// `count` contiguous blocks of size floor(size / count); the last block
/// also takes the remainder.
std::vector<Block> contiguous_blocks(std::size_t size, std::size_t count);

/// Member i trains on every pool index plus a second copy of training block i
/// and is evaluated on evaluation block i. `seed` is accepted for interface
/// symmetry; the plan is fully determined by the sizes.
ResamplingPlan additive_plan(std::size_t train_size, std::size_t eval_size, std::size_t ef,
                             std::uint64_t seed = 0);

/// Same-size bootstrap sample per member, drawn with replacement.
ResamplingPlan bagging_sample(std::size_t train_size, std::size_t ef, std::uint64_t seed);

/// Re-derives the additive evaluation partition for a pool of a new size.
/// Training lists are unaffected.
ResamplingPlan with_eval_size(ResamplingPlan plan, std::size_t eval_size);

/// Fraction of distinct indices in one member's training list.
double unique_fraction(const std::vector<std::size_t>& indices);

/// Human-readable audit: one line per member with index ranges or counts.
void write_plan_report(std::ostream& out, const ResamplingPlan& plan);

}  // namespace dfocast::resampling
