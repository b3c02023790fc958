#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gairl::experiment {

struct PlotSeries {
  std::vector<double> step;
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation across runs
};

using Curve = std::vector<std::pair<double, double>>;  // (step, value), step ascending

/// Interpolates every curve linearly onto `points` evenly spaced steps
/// between the smallest first step and the largest last step; a curve is
/// held constant outside its own range.
PlotSeries aggregate_curves(const std::vector<Curve>& curves, std::size_t points);

/// Reads `metric` against `x_column` from each CSV, skipping rows where
/// the metric is empty (and, when `phase` is non-empty, rows of other phases).
PlotSeries plot_data(const std::vector<std::string>& csv_paths, const std::string& metric, std::size_t points,
                     const std::string& x_column = "real_step", const std::string& phase = "");

std::string to_csv(const PlotSeries& s);

}  // namespace gairl::experiment
