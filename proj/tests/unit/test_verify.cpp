#include <gtest/gtest.h>

#include <sstream>

#include "kernsgd/verify.hpp"

using namespace kernsgd;

TEST(Verify, QuickPasses) {
  const auto r = run_verify(VerifyLevel::kQuick, 4);
  std::ostringstream os;
  print_verify_table(os, r);
  EXPECT_TRUE(r.all_pass()) << os.str();
  bool has_slope = false;
  for (const auto& i : r.items) has_slope |= i.name == "ntk_eigendecay_slope";
  EXPECT_FALSE(has_slope);
}

TEST(Verify, RandomModelShape) {
  Rng rng = make_rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto m = random_diagonal_model(rng, 20);
    EXPECT_GE(m.size(), 1u);
    EXPECT_LE(m.size(), 20u);
    for (std::size_t j = 1; j < m.size(); ++j) EXPECT_LE(m.lambdas()[j], m.lambdas()[j - 1]);
    EXPECT_LE(m.top_eigenvalue(), 1.0);
  }
}
