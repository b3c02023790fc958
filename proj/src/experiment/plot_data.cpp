#include "gairl/experiment/plot_data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gairl/experiment/csv.hpp"

namespace gairl::experiment {

namespace {

double value_at(const Curve& c, double x) {
  if (x <= c.front().first) return c.front().second;
  if (x >= c.back().first) return c.back().second;
  const auto hi = std::upper_bound(c.begin(), c.end(), x, [](double v, const auto& p) { return v < p.first; });
  const auto lo = hi - 1;
  if (hi->first == lo->first) return hi->second;
  const double t = (x - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

}  // namespace

PlotSeries aggregate_curves(const std::vector<Curve>& curves, std::size_t points) {
  if (curves.empty()) throw std::invalid_argument("plot data needs at least one run");
  if (points == 0) throw std::invalid_argument("plot grid needs at least one point");
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& c : curves) {
    if (c.empty()) throw std::invalid_argument("a run has no values for the metric");
    lo = std::min(lo, c.front().first);
    hi = std::max(hi, c.back().first);
  }
  PlotSeries s;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    double sum = 0.0;
    std::vector<double> v;
    v.reserve(curves.size());
    for (const auto& c : curves) {
      v.push_back(value_at(c, x));
      sum += v.back();
    }
    const double mean = sum / static_cast<double>(v.size());
    double sq = 0.0;
    for (double y : v) sq += (y - mean) * (y - mean);
    s.step.push_back(x);
    s.mean.push_back(mean);
    s.stddev.push_back(std::sqrt(sq / static_cast<double>(v.size())));
  }
  return s;
}

PlotSeries plot_data(const std::vector<std::string>& csv_paths, const std::string& metric, std::size_t points,
                     const std::string& x_column, const std::string& phase) {
  std::vector<Curve> curves;
  for (const auto& path : csv_paths) {
    const CsvTable t = read_csv(path);
    const std::size_t mc = t.column(metric), xc = t.column(x_column);
    const auto pc = t.find("phase");
    Curve c;
    for (const auto& row : t.rows) {
      if (row[mc].empty() || row[xc].empty()) continue;
      if (!phase.empty() && pc && row[*pc] != phase) continue;
      c.emplace_back(std::stod(row[xc]), std::stod(row[mc]));
    }
    if (c.empty()) throw std::runtime_error("metric '" + metric + "' has no values in " + path);
    std::stable_sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    curves.push_back(std::move(c));
  }
  return aggregate_curves(curves, points);
}

std::string to_csv(const PlotSeries& s) {
  std::string out = "step,mean,stddev\n";
  for (std::size_t i = 0; i < s.step.size(); ++i)
    out += format_number(s.step[i]) + ',' + format_number(s.mean[i]) + ',' + format_number(s.stddev[i]) + '\n';
  return out;
}

}  // namespace gairl::experiment
