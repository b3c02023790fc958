#include "gairl/experiment/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "gairl/experiment/csv.hpp"
#include "json.hpp"

namespace gairl::experiment {

namespace fs = std::filesystem;
using ordered = nlohmann::ordered_json;

namespace {

std::mutex log_mutex;

void log_line(const std::string& s) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << s << '\n';
}

ordered optional_json(const std::optional<double>& v) { return v ? ordered(*v) : ordered(nullptr); }

ordered metrics_json(const imagination::ImaginationMetrics& m) {
  ordered j;
  j["itp_step"] = m.itp_step;
  j["state_mae"] = m.state_mae;
  j["reward_precision"] = optional_json(m.reward_precision);
  j["reward_recall"] = optional_json(m.reward_recall);
  j["wasserstein_estimate"] = optional_json(m.wasserstein_estimate);
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

double parse_cell(const std::string& cell, const std::string& what, std::optional<double> missing) {
  if (cell.empty()) {
    if (missing) return *missing;
    throw std::runtime_error("missing value in " + what + " (use a missing-value substitute)");
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("non-numeric value '" + cell + "' in " + what);
  }
}

}  // namespace

bool ExperimentResult::all_succeeded() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunArtifacts& r) { return !r.error; });
}

std::string report_to_json(const orchestrator::RunReport& r, const ExperimentConfig& c) {
  ordered j;
  j["seed"] = r.seed;
  j["environment"] = env::to_string(c.env);
  j["variant"] = to_string(c.variant);
  j["converged"] = r.converged();
  j["real_steps_to_convergence"] =
      r.real_steps_to_convergence ? ordered(*r.real_steps_to_convergence) : ordered(nullptr);
  j["real_steps"] = r.real_steps;
  j["agent_steps"] = r.agent_steps;
  j["real_episodes"] = r.real_episodes;
  j["final_mean100"] = optional_json(r.final_mean100);
  j["phase_trace"] = r.phase_trace();
  ordered phases = ordered::array();
  for (const auto& p : r.phases) {
    ordered e;
    e["iteration"] = p.iteration;
    e["phase"] = orchestrator::to_string(p.phase);
    e["steps"] = p.steps;
    e["real_step_end"] = p.real_step_end;
    e["agent_step_end"] = p.agent_step_end;
    e["episodes"] = p.episodes;
    if (p.metrics) e["metrics"] = metrics_json(*p.metrics);
    phases.push_back(e);
  }
  j["phases"] = phases;
  return j.dump(2) + "\n";
}

RunArtifacts run_single(const ExperimentConfig& config, std::uint64_t seed, const std::string& directory) {
  RunArtifacts a;
  a.seed = seed;
  a.directory = directory;
  fs::create_directories(directory);
  a.run_csv = (fs::path(directory) / "run.csv").string();
  a.report_json = (fs::path(directory) / "report.json").string();
  a.timing_json = (fs::path(directory) / "timing.json").string();

  std::ofstream run(a.run_csv, std::ios::binary);
  if (!run) throw std::runtime_error("cannot write " + a.run_csv);
  run << "real_step,agent_step,iteration,phase,episode_return,truncated,mean100,"
         "itp_step,state_mae,reward_precision,reward_recall,wasserstein\n";
  std::ofstream itp_steps;
  if (config.log_itp_steps && config.variant != Variant::baseline) {
    a.itp_steps_csv = (fs::path(directory) / "itp_steps.csv").string();
    itp_steps.open(a.itp_steps_csv, std::ios::binary);
    if (!itp_steps) throw std::runtime_error("cannot write " + a.itp_steps_csv);
    itp_steps << "iteration,itp_step,critic_estimate,generator_loss,penalty,state_l1,reward_l1\n";
  }

  orchestrator::GairlLoop* loop_ptr = nullptr;
  orchestrator::LoopCallbacks cb;
  cb.on_episode = [&](const orchestrator::EpisodeRecord& e) {
    run << e.real_step << ',' << e.agent_step << ',' << e.iteration << ',' << orchestrator::to_string(e.phase) << ','
        << format_number(e.episode_return) << ',' << (e.truncated ? 1 : 0) << ',' << format_optional(e.mean100)
        << ",,,,,\n";
  };
  cb.on_itp_metrics = [&](std::size_t iteration, const imagination::ImaginationMetrics& m) {
    run << loop_ptr->real_steps() << ',' << loop_ptr->agent_steps() << ',' << iteration << ",ITP,,,," << m.itp_step
        << ',' << format_number(m.state_mae) << ',' << format_optional(m.reward_precision) << ','
        << format_optional(m.reward_recall) << ',' << format_optional(m.wasserstein_estimate) << '\n';
  };
  if (itp_steps.is_open())
    cb.on_itp_step = [&](std::size_t iteration, const imagination::ItpStepStats& s) {
      itp_steps << iteration << ',' << s.itp_step << ',' << format_number(s.critic_estimate) << ','
                << format_number(s.generator_loss) << ',' << format_number(s.penalty) << ','
                << format_number(s.state_l1) << ',' << format_number(s.reward_l1) << '\n';
    };

  orchestrator::GairlLoop loop(config.loop_config(), seed, cb);
  loop_ptr = &loop;
  a.report = loop.run();
  run.close();
  itp_steps.close();
  write_text(a.report_json, report_to_json(a.report, config));

  ordered timing;
  timing["wall_seconds"] = a.report.wall_seconds;
  ordered phases = ordered::array();
  for (const auto& p : a.report.phases)
    phases.push_back(ordered{{"iteration", p.iteration}, {"phase", orchestrator::to_string(p.phase)}, {"seconds", p.seconds}});
  timing["phases"] = phases;
  write_text(a.timing_json, timing.dump(2) + "\n");

  if (config.dump_memory) loop.memory().dump((fs::path(directory) / "memory.gmem").string());
  return a;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  fs::create_directories(config.output_dir);
  result.config_snapshot = (fs::path(config.output_dir) / "config.json").string();
  write_text(result.config_snapshot, dump_config(config));

  result.runs.resize(config.seeds.size());
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min(config.workers, config.seeds.size());
  auto worker = [&] {
    if (workers > 1) omp_set_num_threads(1);
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      const std::uint64_t seed = config.seeds[i];
      const std::string dir = (fs::path(config.output_dir) / ("seed_" + std::to_string(seed))).string();
      log_line("run seed " + std::to_string(seed) + " started");
      try {
        result.runs[i] = run_single(config, seed, dir);
        const auto& r = result.runs[i].report;
        log_line("run seed " + std::to_string(seed) + " finished: " +
                 (r.converged() ? "converged after " + std::to_string(*r.real_steps_to_convergence) + " real steps"
                                : "not converged after " + std::to_string(r.real_steps) + " real steps"));
      } catch (const std::exception& e) {
        result.runs[i].seed = seed;
        result.runs[i].directory = dir;
        result.runs[i].error = e.what();
        log_line("run seed " + std::to_string(seed) + " failed: " + e.what());
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  result.summary_csv = (fs::path(config.output_dir) / "summary.csv").string();
  result.summary_json = (fs::path(config.output_dir) / "summary.json").string();
  std::string csv = "seed,status,real_steps_to_convergence,real_steps,real_episodes,final_mean100\n";
  ordered runs = ordered::array();
  ordered steps = ordered::array();
  for (const auto& r : result.runs) {
    const auto& rep = r.report;
    const bool ok = !r.error;
    const std::string status = !ok ? "failed" : (rep.converged() ? "converged" : "not_converged");
    csv += std::to_string(r.seed) + ',' + status + ',' +
           (ok && rep.converged() ? std::to_string(*rep.real_steps_to_convergence) : std::string()) + ',' +
           (ok ? std::to_string(rep.real_steps) : std::string()) + ',' +
           (ok ? std::to_string(rep.real_episodes) : std::string()) + ',' +
           (ok ? format_optional(rep.final_mean100) : std::string()) + '\n';
    ordered e;
    e["seed"] = r.seed;
    e["status"] = status;
    if (r.error) e["error"] = *r.error;
    e["real_steps_to_convergence"] =
        ok && rep.converged() ? ordered(*rep.real_steps_to_convergence) : ordered(nullptr);
    e["directory"] = r.directory;
    runs.push_back(e);
    steps.push_back(e["real_steps_to_convergence"]);
  }
  write_text(result.summary_csv, csv);
  ordered summary;
  summary["environment"] = env::to_string(config.env);
  summary["variant"] = to_string(config.variant);
  summary["seeds"] = config.seeds;
  summary["real_steps_to_convergence"] = steps;
  summary["runs"] = runs;
  write_text(result.summary_json, summary.dump(2) + "\n");
  return result;
}

eval::PairedSamples read_paired_columns(const std::string& x_path, const std::string& x_column,
                                        const std::string& y_path, const std::string& y_column,
                                        std::optional<double> missing_value) {
  const CsvTable x = read_csv(x_path);
  const CsvTable y = read_csv(y_path);
  const std::size_t xc = x.column(x_column), yc = y.column(y_column);
  eval::PairedSamples p;
  p.x_label = x_path + ":" + x_column;
  p.y_label = y_path + ":" + y_column;
  const auto xs = x.find("seed"), ys = y.find("seed");
  if (xs && ys) {
    std::map<std::string, const std::vector<std::string>*> by_seed;
    for (const auto& row : y.rows) by_seed[row[*ys]] = &row;
    for (const auto& row : x.rows) {
      const auto it = by_seed.find(row[*xs]);
      if (it == by_seed.end()) throw std::runtime_error("seed " + row[*xs] + " of " + x_path + " missing in " + y_path);
      p.x.push_back(parse_cell(row[xc], p.x_label, missing_value));
      p.y.push_back(parse_cell((*it->second)[yc], p.y_label, missing_value));
    }
    if (x.rows.size() != y.rows.size()) throw std::runtime_error("seed sets of the two files differ");
  } else {
    if (x.rows.size() != y.rows.size()) throw std::runtime_error("the two columns differ in length");
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
      p.x.push_back(parse_cell(x.rows[i][xc], p.x_label, missing_value));
      p.y.push_back(parse_cell(y.rows[i][yc], p.y_label, missing_value));
    }
  }
  return p;
}

}  // namespace gairl::experiment
