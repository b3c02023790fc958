#include <gtest/gtest.h>

#include <cmath>

#include "../data/reference_convergence_samples.hpp"
#include "gairl/eval/metrics.hpp"
#include "gairl/rng.hpp"

using namespace gairl;
using namespace gairl::eval;

namespace {

// Quadratic rank computation, independent of the sort-based implementation.
std::pair<double, double> brute_rank_sums(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) d.push_back(x[i] - y[i]);
  double tp = 0.0, tm = 0.0;
  for (double di : d) {
    double below = 0.0, equal = 0.0;
    for (double dj : d) {
      if (std::abs(dj) < std::abs(di)) below += 1.0;
      if (std::abs(dj) == std::abs(di)) equal += 1.0;
    }
    const double rank = below + (equal + 1.0) / 2.0;
    (di > 0 ? tp : tm) += rank;
  }
  return {tp, tm};
}

PairedSamples pairs(const std::vector<double>& x, const std::vector<double>& y) { return {"x", "y", x, y}; }

}  // namespace

TEST(Wilcoxon, FirstMountainCarComparison) {
  const auto r = wilcoxon_signed_rank(pairs(reference_samples::mountain_car_free, reference_samples::mountain_car_mlp));
  EXPECT_EQ(r.t_plus, 114.0);
  EXPECT_EQ(r.t_minus, 6.0);
  EXPECT_EQ(r.n_nonzero, 15u);
  EXPECT_EQ(r.critical_value, 25u);
  EXPECT_TRUE(r.significant_at_05);
}

TEST(Wilcoxon, ReferenceColumnsMatchBruteForce) {
  using namespace reference_samples;
  const std::vector<std::pair<const std::vector<double>*, const std::vector<double>*>> cases = {
      {&mountain_car_free, &mountain_car_mlp},
      {&mountain_car_mlp, &mountain_car_wgangp},
      {&acrobot_free, &acrobot_mlp},
      {&acrobot_mlp, &acrobot_wgangp}};
  const std::vector<bool> significant = {true, false, true, true};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto r = wilcoxon_signed_rank(pairs(*cases[c].first, *cases[c].second));
    const auto [tp, tm] = brute_rank_sums(*cases[c].first, *cases[c].second);
    EXPECT_EQ(r.t_plus, tp);
    EXPECT_EQ(r.t_minus, tm);
    EXPECT_EQ(r.significant_at_05, significant[c]) << c;
  }
}

TEST(Wilcoxon, EqualDifferencesShareRanks) {
  const auto r = wilcoxon_signed_rank(pairs({2, 3, 4, 5, 6}, {1, 2, 3, 4, 5}));
  EXPECT_EQ(r.t_plus, 15.0);
  EXPECT_EQ(r.t_minus, 0.0);
  EXPECT_FALSE(r.significant_at_05);  // n = 5 can never reach two-tailed 5%
}

TEST(Wilcoxon, ZeroDifferencesDropped) {
  const auto r = wilcoxon_signed_rank(pairs({1, 2, 3, 4}, {1, 2, 1, 5}));
  EXPECT_EQ(r.n_nonzero, 2u);
  EXPECT_EQ(r.t_plus, 2.0);
  EXPECT_EQ(r.t_minus, 1.0);
}

TEST(Wilcoxon, AllZeroOrMismatchedThrows) {
  EXPECT_THROW(wilcoxon_signed_rank(pairs({1, 2}, {1, 2})), std::invalid_argument);
  EXPECT_THROW(wilcoxon_signed_rank(pairs({1, 2}, {1})), std::invalid_argument);
}

TEST(Wilcoxon, RankSumIdentityAndAntisymmetry) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 30);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid so ties and zeros are common
      x[i] = static_cast<double>(uniform_index(rng, 6));
      y[i] = static_cast<double>(uniform_index(rng, 6));
    }
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) any |= x[i] != y[i];
    if (!any) continue;
    const auto r = wilcoxon_signed_rank(pairs(x, y));
    const double m = static_cast<double>(r.n_nonzero);
    EXPECT_DOUBLE_EQ(r.t_plus + r.t_minus, m * (m + 1) / 2);
    const auto s = wilcoxon_signed_rank(pairs(y, x));
    EXPECT_EQ(s.t_plus, r.t_minus);
    EXPECT_EQ(s.t_minus, r.t_plus);
    const auto [tp, tm] = brute_rank_sums(x, y);
    EXPECT_EQ(r.t_plus, tp);
    EXPECT_EQ(r.t_minus, tm);
  }
}

TEST(Wilcoxon, TableMatchesExactNullDistribution) {
  for (std::size_t n = 1; n <= 25; ++n) {
    EXPECT_EQ(wilcoxon_critical_value_05(n), exact_wilcoxon_critical_value(n, 0.05)) << n;
  }
  EXPECT_EQ(wilcoxon_critical_value_05(15), 25u);
  EXPECT_EQ(wilcoxon_critical_value_05(30), exact_wilcoxon_critical_value(30, 0.05));
  EXPECT_EQ(wilcoxon_critical_value_05(30), 137u);
}

TEST(PrecisionRecall, PerfectPredictor) {
  const std::vector<int> a = {1, 0, 1, 0};
  const auto pr = precision_recall(a, a);
  EXPECT_EQ(pr.precision, 1.0);
  EXPECT_EQ(pr.recall, 1.0);
}

TEST(PrecisionRecall, AllPositivePrediction) {
  const std::vector<int> p = {1, 1, 1, 1};
  const std::vector<int> a = {1, 0, 1, 0};
  const auto pr = precision_recall(p, a);
  EXPECT_EQ(pr.precision, 0.5);
  EXPECT_EQ(pr.recall, 1.0);
}

TEST(PrecisionRecall, DegenerateCases) {
  const std::vector<int> none = {0, 0, 0};
  const std::vector<int> a = {1, 0, 0};
  auto pr = precision_recall(none, a);
  EXPECT_FALSE(pr.precision.has_value());
  EXPECT_EQ(pr.recall, 0.0);
  pr = precision_recall(a, none);
  EXPECT_FALSE(pr.recall.has_value());
  EXPECT_EQ(pr.precision, 0.0);
  const std::vector<int> shorter = {1};
  EXPECT_THROW(precision_recall(shorter, a), std::invalid_argument);
}

TEST(Mae, Basics) {
  EXPECT_EQ(mae({{0.1, 0.2}}, {{0.1, 0.2}}), 0.0);
  EXPECT_DOUBLE_EQ(mae({{0.5}}, {{0.9}}), 0.4);
  EXPECT_THROW(mae({{0.5}}, {{0.9, 0.1}}), std::invalid_argument);
}

TEST(Mae, MatchesPairwiseSummation) {
  Rng rng(4);
  std::vector<std::vector<double>> p(300, std::vector<double>(6)), a = p;
  std::vector<double> diffs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      p[i][j] = uniform01(rng);
      a[i][j] = uniform01(rng);
      diffs.push_back(std::abs(p[i][j] - a[i][j]));
    }
  }
  // pairwise reduction as the second implementation
  while (diffs.size() > 1) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < diffs.size(); i += 2) next.push_back(diffs[i] + diffs[i + 1]);
    if (diffs.size() % 2) next.push_back(diffs.back());
    diffs.swap(next);
  }
  EXPECT_NEAR(mae(p, a), diffs[0] / 1800.0, 1e-12);
}

TEST(MeanRecentReward, Cases) {
  const std::vector<double> one = {-300};
  EXPECT_EQ(mean_recent_reward(one), -300.0);
  std::vector<double> many(50, -10000.0);
  many.insert(many.end(), 100, -200.0);
  EXPECT_EQ(mean_recent_reward(many), -200.0);
  EXPECT_THROW(mean_recent_reward(std::vector<double>{}), std::invalid_argument);
}

TEST(MeanRecentReward, SlidingWindowMatchesRecomputation) {
  Rng rng(8);
  RecentMean running(100);
  std::vector<double> history;
  for (int i = 0; i < 500; ++i) {
    history.push_back(-1000.0 * uniform01(rng));
    running.push(history.back());
    double brute = 0.0;
    const std::size_t n = std::min<std::size_t>(100, history.size());
    for (std::size_t k = history.size() - n; k < history.size(); ++k) brute += history[k];
    EXPECT_NEAR(running.mean(), brute / n, 1e-9);
  }
}
