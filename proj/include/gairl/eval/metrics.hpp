#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gairl::eval {

struct PairedSamples {
  std::string x_label = "x";
  std::string y_label = "y";
  std::vector<double> x;
  std::vector<double> y;
};

struct WilcoxonResult {
  double t_plus = 0.0;
  double t_minus = 0.0;
  std::size_t n_nonzero = 0;
  double statistic = 0.0;  // min(t_plus, t_minus)
  std::optional<std::uint64_t> critical_value;  // none when n is too small for any rejection
  bool significant_at_05 = false;
};

/// Two-tailed signed-rank test. Zero differences are dropped and tied
/// absolute differences share the average of their ranks.
WilcoxonResult wilcoxon_signed_rank(const PairedSamples& pairs);

/// Largest T with P(T+ <= T) <= alpha/2 under the exact null distribution,
/// or none when even T = 0 is too likely.
std::optional<std::uint64_t> exact_wilcoxon_critical_value(std::size_t n, double alpha_two_tailed);

/// Tabulated two-tailed 5% critical values for n <= 25, exact computation beyond.
std::optional<std::uint64_t> wilcoxon_critical_value_05(std::size_t n);

std::string to_json(const WilcoxonResult& r, const PairedSamples& pairs);

struct PrecisionRecall {
  std::optional<double> precision;  // none when nothing was predicted positive
  std::optional<double> recall;     // none when no actual positives exist
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

PrecisionRecall precision_recall(std::span<const int> predicted, std::span<const int> actual);

/// Mean absolute difference over samples and components.
double mae(const std::vector<std::vector<double>>& predicted, const std::vector<std::vector<double>>& actual);

double mean_recent_reward(std::span<const double> episode_returns, std::size_t window = 100);

/// Running mean of the last `window` values.
class RecentMean {
 public:
  explicit RecentMean(std::size_t window = 100) : window_(window) {}
  void push(double value);
  double mean() const;
  std::size_t count() const { return total_; }
  bool empty() const { return total_ == 0; }

 private:
  std::size_t window_;
  std::deque<double> values_;
  std::size_t total_ = 0;
};

}  // namespace gairl::eval
