#include "gairl/eval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace gairl::eval {

namespace {

constexpr std::array<int, 21> kCritical05 = {-1, 0,  2,  3,  5,  8,  10, 13, 17, 21, 25,
                                              29, 34, 40, 46, 52, 58, 65, 73, 81, 89};  // n = 5..25

}  // namespace

std::optional<std::uint64_t> exact_wilcoxon_critical_value(std::size_t n, double alpha_two_tailed) {
  if (n == 0) return std::nullopt;
  const std::size_t max_sum = n * (n + 1) / 2;
  // counts[s] / 2^n = P(T+ = s); long double keeps integers exact up to 2^64
  std::vector<long double> counts(max_sum + 1, 0.0L);
  counts[0] = 1.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t s = max_sum; s >= k; --s) counts[s] += counts[s - k];
  }
  const long double total = std::ldexp(1.0L, static_cast<int>(n));
  long double cum = 0.0L;
  std::optional<std::uint64_t> best;
  for (std::size_t t = 0; t <= max_sum; ++t) {
    cum += counts[t];
    if (cum / total <= static_cast<long double>(alpha_two_tailed) / 2.0L) {
      best = t;
    } else {
      break;
    }
  }
  return best;
}

std::optional<std::uint64_t> wilcoxon_critical_value_05(std::size_t n) {
  if (n < 5) return std::nullopt;
  if (n <= 25) {
    const int c = kCritical05[n - 5];
    if (c < 0) return std::nullopt;
    return static_cast<std::uint64_t>(c);
  }
  return exact_wilcoxon_critical_value(n, 0.05);
}

WilcoxonResult wilcoxon_signed_rank(const PairedSamples& pairs) {
  if (pairs.x.size() != pairs.y.size()) throw std::invalid_argument("paired samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < pairs.x.size(); ++i) {
    const double d = pairs.x[i] - pairs.y[i];
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite paired sample");
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw std::invalid_argument("all paired differences are zero");

  std::vector<std::size_t> order(diffs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });
  std::vector<double> ranks(diffs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }

  WilcoxonResult r;
  r.n_nonzero = diffs.size();
  for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? r.t_plus : r.t_minus) += ranks[i];
  r.statistic = std::min(r.t_plus, r.t_minus);
  r.critical_value = wilcoxon_critical_value_05(r.n_nonzero);
  r.significant_at_05 = r.critical_value && r.statistic <= static_cast<double>(*r.critical_value);
  return r;
}

std::string to_json(const WilcoxonResult& r, const PairedSamples& pairs) {
  nlohmann::ordered_json j;
  j["x"] = pairs.x_label;
  j["y"] = pairs.y_label;
  j["t_plus"] = r.t_plus;
  j["t_minus"] = r.t_minus;
  j["n_nonzero"] = r.n_nonzero;
  j["statistic"] = r.statistic;
  j["critical_value"] = r.critical_value ? nlohmann::ordered_json(*r.critical_value) : nlohmann::ordered_json(nullptr);
  j["significant_at_05"] = r.significant_at_05;
  return j.dump(2);
}

PrecisionRecall precision_recall(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("precision_recall: length mismatch");
  PrecisionRecall pr;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool a = actual[i] != 0;
    if (p && a) ++pr.true_positives;
    if (p && !a) ++pr.false_positives;
    if (!p && a) ++pr.false_negatives;
  }
  const std::size_t pred_pos = pr.true_positives + pr.false_positives;
  const std::size_t act_pos = pr.true_positives + pr.false_negatives;
  if (pred_pos > 0) pr.precision = static_cast<double>(pr.true_positives) / static_cast<double>(pred_pos);
  if (act_pos > 0) pr.recall = static_cast<double>(pr.true_positives) / static_cast<double>(act_pos);
  return pr;
}

double mae(const std::vector<std::vector<double>>& predicted, const std::vector<std::vector<double>>& actual) {
  if (predicted.size() != actual.size() || predicted.empty()) throw std::invalid_argument("mae: shape mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i].size() != actual[i].size()) throw std::invalid_argument("mae: shape mismatch");
    for (std::size_t j = 0; j < predicted[i].size(); ++j) sum += std::abs(predicted[i][j] - actual[i][j]);
    count += predicted[i].size();
  }
  if (count == 0) throw std::invalid_argument("mae: empty vectors");
  return sum / static_cast<double>(count);
}

double mean_recent_reward(std::span<const double> episode_returns, std::size_t window) {
  if (episode_returns.empty()) throw std::invalid_argument("mean_recent_reward: no episodes");
  if (window == 0) throw std::invalid_argument("mean_recent_reward: zero window");
  const std::size_t n = std::min(window, episode_returns.size());
  double sum = 0.0;
  for (std::size_t i = episode_returns.size() - n; i < episode_returns.size(); ++i) sum += episode_returns[i];
  return sum / static_cast<double>(n);
}

void RecentMean::push(double value) {
  values_.push_back(value);
  if (values_.size() > window_) values_.pop_front();
  ++total_;
}

double RecentMean::mean() const {
  if (values_.empty()) throw std::logic_error("RecentMean: no values");
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

}  // namespace gairl::eval
