#include "gairl/experiment/config.hpp"

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <type_traits>

#include "json.hpp"

namespace gairl::experiment {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

// Reads the keys of one JSON object into typed fields and rejects keys that
// nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config value '" + where() + "' must be an object");
  }

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    out = convert<T>(*it, full(key));
  }

  void read(const std::string& key, std::optional<double>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    out = convert<double>(*it, full(key));
  }

  template <class Parse, class T>
  void read_enum(const std::string& key, T& out, Parse parse) {
    std::string text;
    read(key, text);
    if (!j_.contains(key)) return;
    try {
      out = parse(text);
    } catch (const std::exception& e) {
      throw ConfigError("config key '" + full(key) + "': " + e.what());
    }
  }

  template <class F>
  void object(const std::string& key, F&& f) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    Reader child(*it, full(key));
    f(child);
    child.finish();
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError("unknown config key '" + full(item.key()) + "'");
  }

 private:
  template <class T>
  static T convert(const json& v, const std::string& name) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("config key '" + name + "' must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError("config key '" + name + "' must be a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("config key '" + name + "' must be a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("config key '" + name + "' must be a string");
      return v.get<std::string>();
    } else {
      if (!v.is_array()) throw ConfigError("config key '" + name + "' must be an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(convert<typename T::value_type>(v[i], name + "[" + std::to_string(i) + "]"));
      return out;
    }
  }

  std::string where() const { return path_.empty() ? "<root>" : path_; }
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_adam(Reader& r, nn::AdamSettings& a) {
  r.read("learning_rate", a.learning_rate);
  r.read("beta1", a.beta1);
  r.read("beta2", a.beta2);
  r.read("epsilon", a.epsilon);
}

ordered adam_json(const nn::AdamSettings& a) {
  ordered j;
  j["learning_rate"] = a.learning_rate;
  j["beta1"] = a.beta1;
  j["beta2"] = a.beta2;
  j["epsilon"] = a.epsilon;
  return j;
}

void read_regressor(Reader& r, generative::RegressorConfig& c) {
  r.read("hidden", c.hidden);
  r.read("leaky_alpha", c.leaky_alpha);
  r.read("dropout", c.dropout);
  r.read("init_stddev", c.init_stddev);
  r.object("optimizer", [&](Reader& o) { read_adam(o, c.optimizer); });
}

ordered regressor_json(const generative::RegressorConfig& c) {
  ordered j;
  j["hidden"] = c.hidden;
  j["leaky_alpha"] = c.leaky_alpha;
  j["dropout"] = c.dropout;
  j["init_stddev"] = c.init_stddev;
  j["optimizer"] = adam_json(c.optimizer);
  return j;
}

void read_agent(Reader& r, rainbow::AgentConfig& a) {
  r.read("hidden_layers", a.hidden_layers);
  r.read("leaky_alpha", a.leaky_alpha);
  r.read("init_stddev", a.init_stddev);
  r.read("learning_rate", a.learning_rate);
  r.read("gradient_clip", a.gradient_clip);
  r.read("gamma", a.gamma);
  r.read("epsilon_greedy", a.epsilon_greedy);
  r.read("epsilon_start", a.epsilon_start);
  r.read("epsilon_end", a.epsilon_end);
  r.read("epsilon_decay_start", a.epsilon_decay_start);
  r.read("epsilon_decay_length", a.epsilon_decay_length);
  r.read("buffer_capacity", a.buffer_capacity);
  r.read("batch_size", a.batch_size);
  r.read("priority_epsilon", a.priority_epsilon);
  r.read("priority_alpha", a.priority_alpha);
  r.read("priority_beta_start", a.priority_beta_start);
  r.read("priority_beta_end", a.priority_beta_end);
  r.read("priority_beta_steps", a.priority_beta_steps);
  r.read("noisy_nets", a.noisy_nets);
  r.read("noisy_sigma0", a.noisy_sigma0);
  r.read("n_step", a.n_step);
  r.read("update_period", a.update_period);
  r.read("target_sync_period", a.target_sync_period);
  r.read("atoms", a.atoms);
  r.read("v_min", a.v_min);
  r.read("v_max", a.v_max);
}

ordered agent_json(const rainbow::AgentConfig& a) {
  ordered j;
  j["hidden_layers"] = a.hidden_layers;
  j["leaky_alpha"] = a.leaky_alpha;
  j["init_stddev"] = a.init_stddev;
  j["learning_rate"] = a.learning_rate;
  j["gradient_clip"] = a.gradient_clip;
  j["gamma"] = a.gamma;
  j["epsilon_greedy"] = a.epsilon_greedy;
  j["epsilon_start"] = a.epsilon_start;
  j["epsilon_end"] = a.epsilon_end;
  j["epsilon_decay_start"] = a.epsilon_decay_start;
  j["epsilon_decay_length"] = a.epsilon_decay_length;
  j["buffer_capacity"] = a.buffer_capacity;
  j["batch_size"] = a.batch_size;
  j["priority_epsilon"] = a.priority_epsilon;
  j["priority_alpha"] = a.priority_alpha;
  j["priority_beta_start"] = a.priority_beta_start;
  j["priority_beta_end"] = a.priority_beta_end;
  j["priority_beta_steps"] = a.priority_beta_steps;
  j["noisy_nets"] = a.noisy_nets;
  j["noisy_sigma0"] = a.noisy_sigma0;
  j["n_step"] = a.n_step;
  j["update_period"] = a.update_period;
  j["target_sync_period"] = a.target_sync_period;
  j["atoms"] = a.atoms;
  j["v_min"] = a.v_min;
  j["v_max"] = a.v_max;
  return j;
}

void read_imagination(Reader& r, imagination::ImaginationConfig& c) {
  r.read("batch_size", c.batch_size);
  r.read("metrics_period", c.metrics_period);
  r.read("rollout_step_cap", c.rollout_step_cap);
  r.object("state_wgangp", [&](Reader& g) {
    g.read("noise_dim", c.gan.noise_dim);
    g.read("generator_hidden", c.gan.generator_hidden);
    g.read("critic_hidden", c.gan.critic_hidden);
    g.read("leaky_alpha", c.gan.leaky_alpha);
    g.read("init_stddev", c.gan.init_stddev);
    g.read("critic_steps", c.gan.critic_steps);
    g.read("penalty_coefficient", c.gan.penalty_coefficient);
    g.object("generator_optimizer", [&](Reader& o) { read_adam(o, c.gan.generator_optimizer); });
    g.object("critic_optimizer", [&](Reader& o) { read_adam(o, c.gan.critic_optimizer); });
  });
  r.object("state_mlp", [&](Reader& m) { read_regressor(m, c.state_regressor); });
  r.object("reward_mlp", [&](Reader& m) { read_regressor(m, c.reward_model); });
}

ordered imagination_json(const imagination::ImaginationConfig& c) {
  ordered j;
  j["batch_size"] = c.batch_size;
  j["metrics_period"] = c.metrics_period;
  j["rollout_step_cap"] = c.rollout_step_cap;
  ordered g;
  g["noise_dim"] = c.gan.noise_dim;
  g["generator_hidden"] = c.gan.generator_hidden;
  g["critic_hidden"] = c.gan.critic_hidden;
  g["leaky_alpha"] = c.gan.leaky_alpha;
  g["init_stddev"] = c.gan.init_stddev;
  g["critic_steps"] = c.gan.critic_steps;
  g["penalty_coefficient"] = c.gan.penalty_coefficient;
  g["generator_optimizer"] = adam_json(c.gan.generator_optimizer);
  g["critic_optimizer"] = adam_json(c.gan.critic_optimizer);
  j["state_wgangp"] = g;
  j["state_mlp"] = regressor_json(c.state_regressor);
  j["reward_mlp"] = regressor_json(c.reward_model);
  return j;
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::gairl_mlp: return "gairl_mlp";
    case Variant::gairl_wgangp: return "gairl_wgangp";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "gairl_mlp") return Variant::gairl_mlp;
  if (name == "gairl_wgangp") return Variant::gairl_wgangp;
  throw std::invalid_argument("unknown variant '" + name + "' (expected baseline, gairl_mlp or gairl_wgangp)");
}

std::vector<std::uint64_t> ExperimentConfig::default_seeds() {
  std::vector<std::uint64_t> s(15);
  std::iota(s.begin(), s.end(), 1);
  return s;
}

orchestrator::LoopConfig ExperimentConfig::loop_config() const {
  orchestrator::LoopConfig c;
  c.env = env;
  c.max_episode_steps = max_episode_steps;
  c.schedule = schedule;
  c.convergence = convergence;
  c.agent = agent;
  c.imagination = imagination;
  c.memory = memory;
  if (variant == Variant::baseline) {
    c.schedule.itp_steps = 0;
    c.schedule.ibp_steps = 0;
    c.memory_writes = false;
  } else {
    c.imagination.state_model =
        variant == Variant::gairl_mlp ? imagination::StateModelKind::mlp : imagination::StateModelKind::wgangp;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("config key 'seeds' must list at least one seed");
  if (workers == 0) throw ConfigError("config key 'workers' must be >= 1");
  if (output_dir.empty()) throw ConfigError("config key 'output_dir' must not be empty");
  if (variant != Variant::baseline && (schedule.itp_steps == 0 || schedule.ibp_steps == 0))
    throw ConfigError("schedule: GAIRL variants need positive itp_steps and ibp_steps");
  const auto loop = loop_config();
  try {
    loop.validate();
    if (variant == Variant::gairl_wgangp) {
      auto g = loop.imagination.gan;
      g.condition_dim = env::state_size(env) + env::action_count(env);
      g.payload_dim = env::state_size(env);
      g.validate();
    }
    auto reward = loop.imagination.reward_model;
    reward.input_dim = env::state_size(env) + env::action_count(env);
    reward.validate();
    auto state = loop.imagination.state_regressor;
    state.input_dim = reward.input_dim;
    state.output_dim = env::state_size(env);
    state.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j = json::object();
  try {
    if (json_text.find_first_not_of(" \t\r\n") != std::string::npos) j = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  ExperimentConfig c;
  Reader r(j, "");
  r.read_enum("environment", c.env, env::env_kind_from_string);
  r.read_enum("variant", c.variant, variant_from_string);
  r.read("max_episode_steps", c.max_episode_steps);
  r.read("seeds", c.seeds);
  r.read("output_dir", c.output_dir);
  r.read("workers", c.workers);
  r.read("log_itp_steps", c.log_itp_steps);
  r.read("dump_memory", c.dump_memory);
  r.object("schedule", [&](Reader& s) {
    s.read("mfp_steps", c.schedule.mfp_steps);
    s.read("itp_steps", c.schedule.itp_steps);
    s.read("ibp_steps", c.schedule.ibp_steps);
    s.read("max_iterations", c.schedule.max_iterations);
  });
  r.object("convergence", [&](Reader& s) {
    s.read("window", c.convergence.window);
    s.read("min_episodes", c.convergence.min_episodes);
    s.read("threshold", c.convergence.threshold);
  });
  r.object("agent", [&](Reader& a) { read_agent(a, c.agent); });
  r.object("imagination", [&](Reader& m) { read_imagination(m, c.imagination); });
  r.object("memory", [&](Reader& m) {
    m.read("capacity", c.memory.capacity);
    m.read("train_fraction", c.memory.train_fraction);
    m.read("oversample_terminals", c.memory.oversample_terminals);
  });
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  ordered j;
  j["environment"] = env::to_string(c.env);
  j["variant"] = to_string(c.variant);
  j["max_episode_steps"] = c.max_episode_steps;
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  j["log_itp_steps"] = c.log_itp_steps;
  j["dump_memory"] = c.dump_memory;
  j["schedule"] = ordered{{"mfp_steps", c.schedule.mfp_steps},
                          {"itp_steps", c.schedule.itp_steps},
                          {"ibp_steps", c.schedule.ibp_steps},
                          {"max_iterations", c.schedule.max_iterations}};
  ordered conv;
  conv["window"] = c.convergence.window;
  conv["min_episodes"] = c.convergence.min_episodes;
  conv["threshold"] = c.convergence.threshold ? ordered(*c.convergence.threshold) : ordered(nullptr);
  j["convergence"] = conv;
  j["agent"] = agent_json(c.agent);
  j["imagination"] = imagination_json(c.imagination);
  j["memory"] = ordered{{"capacity", c.memory.capacity},
                        {"train_fraction", c.memory.train_fraction},
                        {"oversample_terminals", c.memory.oversample_terminals}};
  return j.dump(2) + "\n";
}

}  // namespace gairl::experiment
