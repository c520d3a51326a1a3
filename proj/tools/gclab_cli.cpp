// gclab command line: training, sweeps, reports and self tests.
#include <cmath>
#include <fstream>
#include <sstream>
#include <iostream>

#include "CLI11.hpp"

#include "gclab/runner.hpp"
#include "gclab/text.hpp"

namespace {

using namespace gclab;

RunConfig resolve_config(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, std::string(trim_view(kv.substr(0, eq))), std::string(trim_view(kv.substr(eq + 1))));
  }
  validate(cfg);
  return cfg;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    double v = 0.0;
    if (!parse_exact(trim_view(tok), v)) throw ConfigError("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gclab: graph contrastive learning laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> sets;
  std::vector<std::uint64_t> seed_override;
  int jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (key=value or JSON)");
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--set", sets, "override one config key, key=value")->take_all();
    sub->add_option("--jobs", jobs, "parallel worker threads")->check(CLI::PositiveNumber);
  };

  auto* train_cmd = app.add_subcommand("train", "train one method over the configured seeds");
  add_common(train_cmd);
  train_cmd->add_option("--seed", seed_override, "seed(s) to run instead of the config's list");

  std::string rates_text = "0.05,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  auto* sweep_rate_cmd = app.add_subcommand("sweep-droprate", "accuracy and center distances per drop rate");
  add_common(sweep_rate_cmd);
  sweep_rate_cmd->add_option("--rates", rates_text, "comma-separated drop rates");

  std::string layers_text = "2,4,8";
  auto* sweep_depth_cmd = app.add_subcommand("sweep-depth", "grace vs grace_s accuracy per layer count");
  add_common(sweep_depth_cmd);
  sweep_depth_cmd->add_option("--layers", layers_text, "comma-separated layer counts");

  std::string report_dir;
  double bound_constant = 1.0;
  auto* report_cmd = app.add_subcommand("report", "aggregate metrics CSVs into summary.json");
  report_cmd->add_option("--dir", report_dir, "directory to scan")->required();
  report_cmd->add_option("--bound-constant", bound_constant, "constant on the M^{-1/2} slack");

  auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in property checks");

  std::string sbm_out;
  auto* make_sbm_cmd = app.add_subcommand("make-sbm", "write the configured SBM graph in the text format");
  add_common(make_sbm_cmd);
  make_sbm_cmd->add_option("--dir", sbm_out, "destination directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*selftest_cmd) return selftest(std::cout) == 0 ? 0 : 1;
    if (*report_cmd) {
      std::cout << report(report_dir, bound_constant);
      return 0;
    }

    RunConfig cfg = resolve_config(config_path, sets);
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (*make_sbm_cmd) {
      save_dataset(build_dataset(cfg), sbm_out);
      return 0;
    }
    if (*train_cmd) {
      if (!seed_override.empty()) cfg.seeds = seed_override;
      std::vector<Job> list;
      for (std::uint64_t s : cfg.seeds) list.push_back({cfg, s, cfg.out_dir});
      const auto results = run_jobs(list, jobs);
      for (std::size_t i = 0; i < results.size(); ++i) {
        std::cout << to_string(cfg.method) << " seed=" << list[i].seed;
        if (results[i].final_accuracy) std::cout << " acc=" << format_double(*results[i].final_accuracy);
        if (results[i].aborted) std::cout << " aborted: " << results[i].error;
        std::cout << '\n';
      }
      return 0;
    }
    if (*sweep_rate_cmd) {
      const auto rows = sweep_droprate(cfg, parse_doubles(rates_text), jobs, std::filesystem::path(cfg.out_dir));
      const std::string csv = render_sweep_csv("rate", rows);
      write_text(std::filesystem::path(cfg.out_dir) / "sweep_droprate.csv", csv);
      std::cout << csv;
      return 0;
    }
    if (*sweep_depth_cmd) {
      std::vector<std::size_t> layers;
      for (double v : parse_doubles(layers_text)) {
        if (v < 1 || v != std::floor(v)) throw ConfigError("layer counts must be positive integers");
        layers.push_back(static_cast<std::size_t>(v));
      }
      const auto rows = sweep_depth(cfg, layers, jobs, std::filesystem::path(cfg.out_dir));
      const std::string csv = render_sweep_csv("layers", rows);
      write_text(std::filesystem::path(cfg.out_dir) / "sweep_depth.csv", csv);
      std::cout << csv;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
