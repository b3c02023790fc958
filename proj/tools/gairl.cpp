#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "gairl/eval/metrics.hpp"
#include "gairl/experiment/config.hpp"
#include "gairl/experiment/csv.hpp"
#include "gairl/experiment/plot_data.hpp"
#include "gairl/experiment/runner.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace gairl;
using experiment::ConfigError;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct CommonOptions {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::size_t workers = 0;

  experiment::ExperimentConfig resolve() const {
    experiment::ExperimentConfig c = config_path.empty() ? experiment::parse_config("{}")
                                                         : experiment::load_config(config_path);
    if (!seeds.empty()) c.seeds = seeds;
    if (!out.empty()) c.output_dir = out;
    if (workers > 0) c.workers = workers;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment configuration");
  cmd->add_option("--seed", o.seeds, "seed(s) replacing the configured list");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--workers", o.workers, "parallel runs")->check(CLI::PositiveNumber);
}

// FILE or FILE:COLUMN
std::pair<std::string, std::string> split_column(const std::string& spec, const std::string& default_column) {
  const auto pos = spec.rfind(':');
  if (pos == std::string::npos || fs::exists(spec)) return {spec, default_column};
  return {spec.substr(0, pos), spec.substr(pos + 1)};
}

int cmd_train(const CommonOptions& o) {
  const auto config = o.resolve();
  const auto result = experiment::run_experiment(config);
  std::cout << "summary: " << result.summary_json << '\n';
  return result.all_succeeded() ? 0 : kRuntimeError;
}

int cmd_eval_imagination(const CommonOptions& o, const std::string& memory_path, std::optional<std::size_t> steps) {
  const auto config = o.resolve();
  if (config.variant == experiment::Variant::baseline)
    throw ConfigError("eval-imagination needs a GAIRL variant (gairl_mlp or gairl_wgangp)");
  const auto loop = config.loop_config();
  const std::uint64_t seed = config.seeds.front();
  const auto mem = memory::GairlMemory::load(memory_path, config.memory, derive_seed(seed, "gairl-memory"));
  imagination::Imagination im(loop.imagination, env::state_size(config.env), env::action_count(config.env),
                              derive_seed(seed, "imagination"));
  Rng rng = make_rng(seed, "itp");
  const auto trace = im.train(mem, steps.value_or(config.schedule.itp_steps), rng);
  fs::create_directories(config.output_dir);
  const auto csv_path = fs::path(config.output_dir) / "imagination.csv";
  std::ofstream csv(csv_path);
  csv << "itp_step,state_mae,reward_precision,reward_recall,wasserstein\n";
  for (const auto& m : trace)
    csv << m.itp_step << ',' << experiment::format_number(m.state_mae) << ','
        << experiment::format_optional(m.reward_precision) << ',' << experiment::format_optional(m.reward_recall)
        << ',' << experiment::format_optional(m.wasserstein_estimate) << '\n';
  im.save((fs::path(config.output_dir) / "imagination.gten").string());
  nlohmann::ordered_json j;
  j["memory"] = memory_path;
  j["train_transitions"] = mem.train_store().size();
  j["test_transitions"] = mem.test_store().size();
  j["itp_steps"] = im.steps();
  if (!mem.test_store().empty()) {
    const auto m = im.trained() ? im.evaluate(mem.test_store(), rng) : imagination::ImaginationMetrics{};
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
    j["state_mae"] = m.state_mae;
    j["reward_precision"] = opt(m.reward_precision);
    j["reward_recall"] = opt(m.reward_recall);
    j["wasserstein_estimate"] = opt(m.wasserstein_estimate);
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_wilcoxon(const std::string& x, const std::string& y, std::optional<double> missing) {
  const std::string column = "real_steps_to_convergence";
  const auto [xf, xc] = split_column(x, column);
  const auto [yf, yc] = split_column(y, column);
  const auto pairs = experiment::read_paired_columns(xf, xc, yf, yc, missing);
  std::cout << eval::to_json(eval::wilcoxon_signed_rank(pairs), pairs) << '\n';
  return 0;
}

int cmd_plot_data(const std::vector<std::string>& files, const std::string& metric, std::size_t points,
                  const std::string& x_column, const std::string& phase, const std::string& out) {
  const auto series = experiment::plot_data(files, metric, points, x_column, phase);
  const std::string text = experiment::to_csv(series);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAIRL experiments: imagination-augmented Rainbow on classic control"};
  app.require_subcommand(1);

  CommonOptions train_opts, eval_opts, print_opts;
  auto* train = app.add_subcommand("train", "run every seed of an experiment configuration");
  add_common(train, train_opts);

  auto* eval_im = app.add_subcommand("eval-imagination", "train and evaluate the imagination on a dumped memory");
  add_common(eval_im, eval_opts);
  std::string memory_path;
  std::optional<std::size_t> eval_steps;
  eval_im->add_option("--memory", memory_path, "memory.gmem file written by a training run")->required();
  eval_im->add_option("--steps", eval_steps, "imagination training iterations (default: itp_steps)");

  auto* wilcoxon = app.add_subcommand("wilcoxon", "two-tailed Wilcoxon signed-rank test on paired CSV columns");
  std::string wx, wy;
  std::optional<double> missing;
  wilcoxon->add_option("--x", wx, "FILE[:COLUMN], column defaults to real_steps_to_convergence")->required();
  wilcoxon->add_option("--y", wy, "FILE[:COLUMN]")->required();
  wilcoxon->add_option("--missing-value", missing, "substitute for empty cells (e.g. the step budget)");

  auto* plot = app.add_subcommand("plot-data", "mean and standard deviation of a metric across runs");
  std::vector<std::string> plot_files;
  std::string metric = "mean100", x_column = "real_step", phase, plot_out;
  std::size_t points = 200;
  plot->add_option("files", plot_files, "run.csv files")->required();
  plot->add_option("--metric", metric, "column to aggregate");
  plot->add_option("--x-column", x_column, "step axis column");
  plot->add_option("--phase", phase, "only rows of this phase (MFP, ITP, IBP)");
  plot->add_option("--points", points, "grid length")->check(CLI::PositiveNumber);
  plot->add_option("--out", plot_out, "output CSV (default stdout)");

  auto* print = app.add_subcommand("print-config", "print the fully resolved configuration");
  add_common(print, print_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    if (*train) return cmd_train(train_opts);
    if (*eval_im) return cmd_eval_imagination(eval_opts, memory_path, eval_steps);
    if (*wilcoxon) return cmd_wilcoxon(wx, wy, missing);
    if (*plot) return cmd_plot_data(plot_files, metric, points, x_column, phase, plot_out);
    if (*print) {
      std::cout << experiment::dump_config(print_opts.resolve());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
