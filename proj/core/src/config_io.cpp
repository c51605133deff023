#include "coopinit/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace coopinit {

using nlohmann::json;

namespace {

// Strict object reader: typed access with ConfigError messages that name
// the offending field, plus unknown-key rejection.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigError("config field '" + path_ + "' must be an object");
    }
  }

  template <typename T>
  T get(const char* key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return read<T>(key);
  }

  template <typename T>
  T require(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      throw ConfigError("missing config field '" + field(key) + "'");
    }
    return read<T>(key);
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      throw ConfigError("missing config field '" + field(key) + "'");
    }
    return j_.at(key);
  }

  std::string field(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  // Call after all reads; rejects misspelled or unsupported keys.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw ConfigError("unknown config field '" + field(it.key().c_str()) +
                          "'");
      }
    }
  }

 private:
  template <typename T>
  T read(const char* key) {
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config field '" + field(key) + "' has the wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::kGaussianRing:
      return "gaussian_ring";
    case DatasetKind::kGaussianGrid:
      return "gaussian_grid";
    case DatasetKind::kGaussianLine1d:
      return "gaussian_line_1d";
  }
  return "?";
}

DatasetSpec dataset_from_json(const json& j) {
  StrictObject o(j, "dataset");
  const std::string kind = o.require<std::string>("kind");
  DatasetSpec spec;
  if (kind == "gaussian_ring") {
    spec.kind = DatasetKind::kGaussianRing;
    spec.modes = o.get<int>("modes", 8);
    spec.radius = o.get<double>("radius", 2.0);
  } else if (kind == "gaussian_grid") {
    spec.kind = DatasetKind::kGaussianGrid;
    spec.rows = o.require<int>("rows");
    spec.cols = o.require<int>("cols");
    spec.spacing = o.require<double>("spacing");
    spec.modes = spec.rows * spec.cols;
  } else if (kind == "gaussian_line_1d") {
    spec.kind = DatasetKind::kGaussianLine1d;
    spec.modes = o.get<int>("modes", 3);
    spec.spacing = o.get<double>("spacing", 2.0);
  } else {
    throw ConfigError("config field 'dataset.kind' has unknown value '" +
                      kind + "'");
  }
  spec.sigma = o.get<double>("sigma", 0.05);
  spec.seed = o.get<std::uint64_t>("seed", 0);
  o.finish();
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("dataset: ") + e.what());
  }
  return spec;
}

json dataset_to_json(const DatasetSpec& spec) {
  json j;
  j["kind"] = dataset_kind_name(spec.kind);
  j["sigma"] = spec.sigma;
  j["seed"] = spec.seed;
  switch (spec.kind) {
    case DatasetKind::kGaussianRing:
      j["modes"] = spec.modes;
      j["radius"] = spec.radius;
      break;
    case DatasetKind::kGaussianGrid:
      j["rows"] = spec.rows;
      j["cols"] = spec.cols;
      j["spacing"] = spec.spacing;
      break;
    case DatasetKind::kGaussianLine1d:
      j["modes"] = spec.modes;
      j["spacing"] = spec.spacing;
      break;
  }
  return j;
}

LangevinConfig langevin_from_json(const json& j) {
  StrictObject o(j, "train.langevin");
  LangevinConfig cfg;
  cfg.eta = o.get<double>("eta", cfg.eta);
  cfg.steps = o.get<int>("steps", cfg.steps);
  cfg.noise_enabled = o.get<bool>("noise_enabled", cfg.noise_enabled);
  cfg.rng_seed = o.get<std::uint64_t>("rng_seed", cfg.rng_seed);
  cfg.clip_enabled = o.get<bool>("clip_enabled", cfg.clip_enabled);
  cfg.clip_norm = o.get<double>("clip_norm", cfg.clip_norm);
  o.finish();
  return cfg;
}

json langevin_to_json(const LangevinConfig& cfg) {
  json j;
  j["eta"] = cfg.eta;
  j["steps"] = cfg.steps;
  j["noise_enabled"] = cfg.noise_enabled;
  j["rng_seed"] = cfg.rng_seed;
  j["clip_enabled"] = cfg.clip_enabled;
  j["clip_norm"] = cfg.clip_norm;
  return j;
}

AdversarialConfig adversarial_from_json(const json& j) {
  StrictObject o(j, "train.adv");
  AdversarialConfig cfg;
  if (o.has("loss")) {
    try {
      cfg.loss_kind = adv_loss_kind_from_name(o.get<std::string>("loss", "ns"));
    } catch (const ConfigError&) {
      throw ConfigError("config field 'train.adv.loss' has an unknown value");
    }
  }
  cfg.gamma = o.get<double>("gamma", cfg.gamma);
  cfg.lambda_gp = o.get<double>("lambda_gp", cfg.lambda_gp);
  cfg.lr_d = o.get<double>("lr_d", cfg.lr_d);
  cfg.lr_g = o.get<double>("lr_g", cfg.lr_g);
  o.finish();
  return cfg;
}

json adversarial_to_json(const AdversarialConfig& cfg) {
  json j;
  j["loss"] = adv_loss_kind_name(cfg.loss_kind);
  j["gamma"] = cfg.gamma;
  j["lambda_gp"] = cfg.lambda_gp;
  j["lr_d"] = cfg.lr_d;
  j["lr_g"] = cfg.lr_g;
  return j;
}

TrainConfig train_from_json(const json& j) {
  StrictObject o(j, "train");
  TrainConfig cfg;
  cfg.n = o.get<int>("n", cfg.n);
  cfg.n_coop = o.get<std::uint64_t>("n_coop", cfg.n_coop);
  cfg.n_adv = o.get<std::uint64_t>("n_adv", cfg.n_adv);
  if (o.has("langevin")) cfg.langevin = langevin_from_json(o.raw("langevin"));
  if (o.has("adv")) cfg.adv = adversarial_from_json(o.raw("adv"));
  cfg.coop_lr_d = o.get<double>("coop_lr_d", cfg.coop_lr_d);
  cfg.coop_lr_g = o.get<double>("coop_lr_g", cfg.coop_lr_g);
  cfg.seed = o.get<std::uint64_t>("seed", cfg.seed);
  cfg.eval_every = o.get<std::uint64_t>("eval_every", cfg.eval_every);
  cfg.eval_samples = o.get<int>("eval_samples", cfg.eval_samples);
  cfg.checkpoint_every =
      o.get<std::uint64_t>("checkpoint_every", cfg.checkpoint_every);
  cfg.carry_adam = o.get<bool>("carry_adam", cfg.carry_adam);
  cfg.latent_dim = o.get<int>("latent_dim", cfg.latent_dim);
  cfg.d_hidden = o.get<std::vector<int>>("d_hidden", cfg.d_hidden);
  cfg.g_hidden = o.get<std::vector<int>>("g_hidden", cfg.g_hidden);
  cfg.d_leaky_slope = o.get<double>("d_leaky_slope", cfg.d_leaky_slope);
  cfg.adam_beta1 = o.get<double>("adam_beta1", cfg.adam_beta1);
  cfg.adam_beta2 = o.get<double>("adam_beta2", cfg.adam_beta2);
  cfg.adam_eps = o.get<double>("adam_eps", cfg.adam_eps);
  o.finish();
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  return cfg;
}

json train_to_json(const TrainConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["n_coop"] = cfg.n_coop;
  j["n_adv"] = cfg.n_adv;
  j["langevin"] = langevin_to_json(cfg.langevin);
  j["adv"] = adversarial_to_json(cfg.adv);
  j["coop_lr_d"] = cfg.coop_lr_d;
  j["coop_lr_g"] = cfg.coop_lr_g;
  j["seed"] = cfg.seed;
  j["eval_every"] = cfg.eval_every;
  j["eval_samples"] = cfg.eval_samples;
  j["checkpoint_every"] = cfg.checkpoint_every;
  j["carry_adam"] = cfg.carry_adam;
  j["latent_dim"] = cfg.latent_dim;
  j["d_hidden"] = cfg.d_hidden;
  j["g_hidden"] = cfg.g_hidden;
  j["d_leaky_slope"] = cfg.d_leaky_slope;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  return j;
}

json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["format_version"] = kRunConfigFormatVersion;
  j["dataset"] = dataset_to_json(cfg.dataset);
  j["train"] = train_to_json(cfg.train);
  return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  StrictObject o(j, "");
  const int version = o.require<int>("format_version");
  if (version != kRunConfigFormatVersion) {
    throw ConfigError("config field 'format_version' must be " +
                      std::to_string(kRunConfigFormatVersion) + ", got " +
                      std::to_string(version));
  }
  RunConfig cfg;
  cfg.dataset = dataset_from_json(o.raw("dataset"));
  cfg.train = train_from_json(o.raw("train"));
  o.finish();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string canonical_config_text(const RunConfig& cfg) {
  return run_config_to_json(cfg).dump();
}

std::string canonical_dataset_text(const DatasetSpec& spec) {
  return dataset_to_json(spec).dump();
}

std::string config_group_text(const RunConfig& cfg) {
  RunConfig copy = cfg;
  copy.train.seed = 0;
  return canonical_config_text(copy);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_group_id(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_group_text(cfg))));
  return buf;
}

}  // namespace coopinit
