#include <algorithm>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "dfocast/error.hpp"
#include "dfocast/resampling.hpp"

namespace rs = dfocast::resampling;
using dfocast::Error;

namespace {

std::vector<std::size_t> range(std::size_t b, std::size_t e) {
  std::vector<std::size_t> v;
  for (std::size_t i = b; i < e; ++i) v.push_back(i);
  return v;
}

std::map<std::size_t, int> multiplicity(const std::vector<std::size_t>& v) {
  std::map<std::size_t, int> m;
  for (auto i : v) ++m[i];
  return m;
}

}  // namespace

TEST(Blocks, RemainderGoesLast) {
  const auto b = rs::contiguous_blocks(10, 3);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].begin, 0u);
  EXPECT_EQ(b[0].end, 3u);
  EXPECT_EQ(b[1].end, 6u);
  EXPECT_EQ(b[2].begin, 6u);
  EXPECT_EQ(b[2].end, 10u);
  EXPECT_THROW(rs::contiguous_blocks(2, 3), Error);
}

TEST(Additive, ExamplePlan) {
  const auto p = rs::additive_plan(100, 40, 2);
  ASSERT_EQ(p.member_train_indices.size(), 2u);
  EXPECT_EQ(p.member_train_indices[0].size(), 150u);
  EXPECT_EQ(p.member_train_indices[1].size(), 150u);
  EXPECT_EQ(p.member_eval_indices[0], range(0, 20));
  EXPECT_EQ(p.member_eval_indices[1], range(20, 40));
  const auto m0 = multiplicity(p.member_train_indices[0]);
  EXPECT_EQ(m0.at(0), 2);
  EXPECT_EQ(m0.at(49), 2);
  EXPECT_EQ(m0.at(50), 1);
  const auto m1 = multiplicity(p.member_train_indices[1]);
  EXPECT_EQ(m1.at(49), 1);
  EXPECT_EQ(m1.at(50), 2);
}

TEST(Additive, SingleMemberDuplicatesEverything) {
  const auto p = rs::additive_plan(7, 3, 1);
  for (auto [idx, count] : multiplicity(p.member_train_indices[0])) EXPECT_EQ(count, 2) << idx;
  EXPECT_EQ(p.member_eval_indices[0], range(0, 3));
}

TEST(Additive, PartitionAndMultiplicityProperties) {
  for (std::size_t train : {6u, 17u, 100u}) {
    for (std::size_t eval : {6u, 9u, 41u}) {
      for (std::size_t ef = 1; ef <= 6; ++ef) {
        const auto p = rs::additive_plan(train, eval, ef, 123);
        const auto blocks = rs::contiguous_blocks(train, ef);
        std::vector<std::size_t> all_eval;
        for (std::size_t i = 0; i < ef; ++i) {
          const auto m = multiplicity(p.member_train_indices[i]);
          ASSERT_EQ(m.size(), train);
          for (auto [idx, count] : m) {
            const bool in_block = idx >= blocks[i].begin && idx < blocks[i].end;
            ASSERT_EQ(count, in_block ? 2 : 1);
          }
          all_eval.insert(all_eval.end(), p.member_eval_indices[i].begin(),
                          p.member_eval_indices[i].end());
        }
        EXPECT_EQ(all_eval, range(0, eval));
        // Plans do not depend on the seed.
        EXPECT_EQ(p.member_train_indices, rs::additive_plan(train, eval, ef, 7).member_train_indices);
      }
    }
  }
  EXPECT_THROW(rs::additive_plan(3, 10, 4), Error);
  EXPECT_THROW(rs::additive_plan(10, 3, 4), Error);
  EXPECT_THROW(rs::additive_plan(10, 10, 0), Error);
}

TEST(Additive, WithEvalSizeRepartitions) {
  const auto p = rs::with_eval_size(rs::additive_plan(50, 20, 3), 31);
  EXPECT_EQ(p.eval_size, 31u);
  EXPECT_EQ(p.member_eval_indices[2], range(20, 31));
  EXPECT_EQ(p.member_train_indices, rs::additive_plan(50, 20, 3).member_train_indices);
}

TEST(Bagging, Examples) {
  const auto one = rs::bagging_sample(1, 3, 9);
  for (const auto& m : one.member_train_indices) EXPECT_EQ(m, std::vector<std::size_t>{0});
  const auto a = rs::bagging_sample(500, 4, 42);
  const auto b = rs::bagging_sample(500, 4, 42);
  EXPECT_EQ(a.member_train_indices, b.member_train_indices);
  EXPECT_NE(a.member_train_indices[0], a.member_train_indices[1]);
  EXPECT_NE(a.member_train_indices, rs::bagging_sample(500, 4, 43).member_train_indices);
  for (const auto& m : a.member_train_indices) {
    EXPECT_EQ(m.size(), 500u);
    EXPECT_LT(*std::max_element(m.begin(), m.end()), 500u);
  }
  EXPECT_TRUE(a.member_eval_indices.empty() ||
              std::all_of(a.member_eval_indices.begin(), a.member_eval_indices.end(),
                          [](const auto& v) { return v.empty(); }));
}

TEST(Bagging, UniqueFractionNearOneMinusInverseE) {
  const auto p = rs::bagging_sample(10000, 3, 5);
  for (const auto& m : p.member_train_indices) EXPECT_NEAR(rs::unique_fraction(m), 0.632, 0.02);
}

TEST(Mode, Strings) {
  EXPECT_EQ(rs::mode_from_string("additive"), rs::Mode::Additive);
  EXPECT_EQ(rs::mode_from_string("bagging"), rs::Mode::Bagging);
  EXPECT_STREQ(rs::to_string(rs::Mode::Bagging), "bagging");
  EXPECT_THROW(rs::mode_from_string("boosting"), Error);
}

TEST(Report, OneLinePerMember) {
  std::ostringstream out;
  rs::write_plan_report(out, rs::additive_plan(100, 40, 2));
  const std::string s = out.str();
  EXPECT_NE(s.find("member 0"), std::string::npos) << s;
  EXPECT_NE(s.find("member 1"), std::string::npos) << s;
}
