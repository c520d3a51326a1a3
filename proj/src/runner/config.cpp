#include "gclab/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "gclab/text.hpp"

namespace gclab {

namespace {

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_exact(trim_view(v), out)) throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  return out;
}

template <typename T>
T to_integer(const std::string& key, const std::string& v) {
  T out{};
  if (!parse_exact(trim_view(v), out)) throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  return out;
}

template <typename T>
std::vector<T> to_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  std::string_view s = trim_view(v);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string_view tok = trim_view(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!tok.empty()) out.push_back(to_integer<T>(key, std::string(tok)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define GCLAB_DOUBLE(name) \
  {#name, {[](RunConfig& c, const std::string& v) { c.name = to_double(#name, v); }, \
           [](const RunConfig& c) { return format_double(c.name); }}}
#define GCLAB_INT(name, type) \
  {#name, {[](RunConfig& c, const std::string& v) { c.name = to_integer<type>(#name, v); }, \
           [](const RunConfig& c) { return std::to_string(c.name); }}}
#define GCLAB_STRING(name) \
  {#name, {[](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name; }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      GCLAB_STRING(dataset),
      {"sbm_blocks", {[](RunConfig& c, const std::string& v) { c.sbm_blocks = to_list<std::size_t>("sbm_blocks", v); },
                      [](const RunConfig& c) { return join(c.sbm_blocks); }}},
      GCLAB_DOUBLE(sbm_p_in),
      GCLAB_DOUBLE(sbm_p_out),
      GCLAB_INT(sbm_feat_dim, std::size_t),
      GCLAB_DOUBLE(sbm_feat_shift),
      GCLAB_INT(sbm_seed, std::uint64_t),
      {"preset", {[](RunConfig& c, const std::string& v) {
                    if (!v.empty()) apply_preset(c, v);
                  },
                  [](const RunConfig& c) { return c.preset; }}},
      {"method", {[](RunConfig& c, const std::string& v) { c.method = parse_method(v); },
                  [](const RunConfig& c) { return std::string(to_string(c.method)); }}},
      GCLAB_DOUBLE(lr),
      GCLAB_DOUBLE(weight_decay),
      GCLAB_INT(layers, std::size_t),
      GCLAB_DOUBLE(tau),
      GCLAB_INT(epochs, int),
      GCLAB_INT(hidden_dim, std::size_t),
      GCLAB_INT(out_dim, std::size_t),
      {"negative_mode",
       {[](RunConfig& c, const std::string& v) {
          try {
            c.negative_mode = parse_negative_mode(v);
          } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
          }
        },
        [](const RunConfig& c) { return std::string(to_string(c.negative_mode)); }}},
      GCLAB_DOUBLE(p_edge1),
      GCLAB_DOUBLE(p_feat1),
      GCLAB_DOUBLE(p_edge2),
      GCLAB_DOUBLE(p_feat2),
      GCLAB_DOUBLE(xi),
      GCLAB_INT(warmup_epoch, int),
      GCLAB_DOUBLE(alpha),
      GCLAB_DOUBLE(epsilon),
      GCLAB_INT(spectral_period, int),
      GCLAB_INT(max_spectral_nodes, std::size_t),
      GCLAB_STRING(spectral_scale),
      {"seeds", {[](RunConfig& c, const std::string& v) { c.seeds = to_list<std::uint64_t>("seeds", v); },
                 [](const RunConfig& c) { return join(c.seeds); }}},
      GCLAB_INT(log_every, int),
      GCLAB_INT(probe_every, int),
      GCLAB_DOUBLE(train_frac),
      GCLAB_DOUBLE(probe_l2),
      GCLAB_INT(probe_iters, int),
      GCLAB_DOUBLE(probe_tol),
      GCLAB_STRING(out_dir),
  };
  return table;
}

#undef GCLAB_DOUBLE
#undef GCLAB_INT
#undef GCLAB_STRING

std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + json_scalar_text(v[i]);
    return out;
  }
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  throw ConfigError("unsupported JSON value: " + v.dump());
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "grace") return Method::grace;
  if (s == "grace_i") return Method::grace_i;
  if (s == "grace_s") return Method::grace_s;
  if (s == "grace_is") return Method::grace_is;
  throw ConfigError("unknown method '" + s + "' (expected grace, grace_i, grace_s or grace_is)");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::grace: return "grace";
    case Method::grace_i: return "grace_i";
    case Method::grace_s: return "grace_s";
    case Method::grace_is: return "grace_is";
  }
  return "?";
}

std::string RunConfig::dataset_label() const {
  if (dataset == "sbm") {
    std::string s = "sbm";
    for (std::size_t b : sbm_blocks) s += "-" + std::to_string(b);
    return s + "-s" + std::to_string(sbm_seed);
  }
  const std::filesystem::path p(dataset);
  const std::string name = p.filename().string();
  return name.empty() ? p.parent_path().filename().string() : name;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  struct Row {
    double lr;
    double tau;
    std::size_t hidden;
  };
  static const std::map<std::string, Row> rows = {
      {"cora", {5e-4, 0.4, 128}},     {"citeseer", {1e-4, 0.9, 256}}, {"pubmed", {1e-4, 0.7, 256}},
      {"dblp", {1e-4, 0.7, 256}},     {"photo", {1e-4, 0.3, 256}},    {"computers", {1e-4, 0.2, 128}},
  };
  const auto it = rows.find(name);
  if (it == rows.end()) throw ConfigError("unknown preset '" + name + "'");
  cfg.preset = name;
  cfg.lr = it->second.lr;
  cfg.weight_decay = 1e-6;
  cfg.layers = 2;
  cfg.tau = it->second.tau;
  cfg.epochs = 200;
  cfg.hidden_dim = it->second.hidden;
  cfg.out_dim = it->second.hidden;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, value);
}

std::map<std::string, std::string> config_to_map(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [k, f] : fields()) out[k] = f.get(cfg);
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  const std::string_view body = trim_view(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
    for (const auto& [k, v] : j.items()) entries.emplace_back(k, json_scalar_text(v));
  } else {
    std::istringstream in{std::string(body)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string_view t = trim_view(line);
      if (t.empty() || t.front() == '#') continue;
      const std::size_t eq = t.find('=');
      if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
      entries.emplace_back(std::string(trim_view(t.substr(0, eq))), std::string(trim_view(t.substr(eq + 1))));
    }
  }

  RunConfig cfg;
  for (const auto& [k, v] : entries)
    if (k == "preset") set_config_value(cfg, k, v);
  for (const auto& [k, v] : entries)
    if (k != "preset") set_config_value(cfg, k, v);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const RunConfig& cfg) {
  auto prob = [](const char* name, double p) {
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1)");
  };
  prob("p_edge1", cfg.p_edge1);
  prob("p_feat1", cfg.p_feat1);
  prob("p_edge2", cfg.p_edge2);
  prob("p_feat2", cfg.p_feat2);
  if (!(cfg.tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(cfg.lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(cfg.weight_decay >= 0.0)) throw ConfigError("weight_decay must be nonnegative");
  if (cfg.layers < 1) throw ConfigError("layers must be at least 1");
  if (cfg.epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (cfg.hidden_dim < 1 || cfg.out_dim < 1) throw ConfigError("hidden_dim and out_dim must be positive");
  if (!(cfg.xi >= 0.0 && cfg.xi <= 1.0 / 3.0 + 1e-12)) throw ConfigError("xi must lie in [0, 1/3]");
  if (cfg.warmup_epoch < 0) throw ConfigError("warmup_epoch must be nonnegative");
  if (cfg.spectral_period < 1) throw ConfigError("spectral_period must be at least 1");
  if (cfg.spectral_scale != "degree" && cfg.spectral_scale != "normalized")
    throw ConfigError("spectral_scale must be 'degree' or 'normalized'");
  if (!(cfg.epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  if (cfg.log_every < 1) throw ConfigError("log_every must be at least 1");
  if (cfg.probe_every < 0) throw ConfigError("probe_every must be nonnegative");
  if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0)) throw ConfigError("train_frac must lie in (0, 1)");
  if (cfg.seeds.empty()) throw ConfigError("seeds must not be empty");
  if (cfg.dataset == "sbm") {
    if (cfg.sbm_blocks.empty()) throw ConfigError("sbm_blocks must not be empty");
    if (!(cfg.sbm_p_in >= 0.0 && cfg.sbm_p_in <= 1.0) || !(cfg.sbm_p_out >= 0.0 && cfg.sbm_p_out <= 1.0))
      throw ConfigError("sbm probabilities must lie in [0, 1]");
  }
}

}  // namespace gclab
