#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gclab/contrastive.hpp"

namespace gclab {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Method { grace, grace_i, grace_s, grace_is };
Method parse_method(const std::string& s);
const char* to_string(Method m);
inline bool uses_info(Method m) { return m == Method::grace_i || m == Method::grace_is; }
inline bool uses_spectral(Method m) { return m == Method::grace_s || m == Method::grace_is; }

struct RunConfig {
  // Dataset: "sbm" builds a synthetic graph from the sbm_* keys, anything else
  // is a directory in the text format.
  std::string dataset = "sbm";
  std::vector<std::size_t> sbm_blocks = {50, 50, 50, 50};
  double sbm_p_in = 0.15;
  double sbm_p_out = 0.03;
  std::size_t sbm_feat_dim = 32;
  double sbm_feat_shift = 1.0;
  std::uint64_t sbm_seed = 0;

  std::string preset;  // informational once applied
  Method method = Method::grace;
  double lr = 5e-4;
  double weight_decay = 1e-6;
  std::size_t layers = 2;
  double tau = 0.4;
  int epochs = 200;
  std::size_t hidden_dim = 128;
  std::size_t out_dim = 128;
  NegativeMode negative_mode = NegativeMode::inter_and_intra;

  double p_edge1 = 0.2;
  double p_feat1 = 0.3;
  double p_edge2 = 0.4;
  double p_feat2 = 0.4;

  double xi = 0.1;
  int warmup_epoch = 20;
  double alpha = 0.01;
  double epsilon = 0.01;
  int spectral_period = 10;
  std::size_t max_spectral_nodes = 10000;
  // "degree": the rebuilt adjacency is mapped back to the raw weight scale
  // with D^{1/2}·D^{1/2} before masking; "normalized": used as rebuilt.
  std::string spectral_scale = "degree";

  std::vector<std::uint64_t> seeds = {0};
  int log_every = 10;
  int probe_every = 0;  // 0: probe only after the last epoch
  double train_frac = 0.1;
  double probe_l2 = 1.0;
  int probe_iters = 500;
  double probe_tol = 1e-6;
  std::string out_dir = "runs";

  // Short dataset label used in file headers and reports.
  std::string dataset_label() const;
};

// Table-5 style defaults for a named dataset: cora, citeseer, pubmed, dblp,
// photo, computers.
void apply_preset(RunConfig& cfg, const std::string& name);

// Sets one field from its textual value; unknown keys throw ConfigError.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// All addressable keys with their current values as text.
std::map<std::string, std::string> config_to_map(const RunConfig& cfg);

// Parses "key=value" lines ('#' comments allowed) or a JSON object. A
// "preset" key is applied before every other key regardless of position.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Throws ConfigError when values are out of range.
void validate(const RunConfig& cfg);

}  // namespace gclab
