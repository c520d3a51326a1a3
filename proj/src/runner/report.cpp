#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "gclab/runner.hpp"
#include "gclab/text.hpp"

namespace gclab {

namespace fs = std::filesystem;

namespace {

struct RunFile {
  std::string group_dir;
  std::string dataset;
  std::string method;
  std::uint64_t seed = 0;
  std::vector<std::map<std::string, std::string>> rows;
};

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Returns false (with a reason) when the file is not a readable metrics CSV.
bool read_run(const fs::path& path, const fs::path& root, RunFile& run, std::string& why) {
  std::ifstream in(path);
  std::string header, columns;
  if (!std::getline(in, header) || header.rfind("# gclab metrics v", 0) != 0) {
    why = "missing metrics header";
    return false;
  }
  std::istringstream hs(header.substr(2));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
    if (k == "dataset") run.dataset = v;
    else if (k == "method") run.method = v;
    else if (k == "seed" && !parse_exact(v, run.seed)) {
      why = "bad seed in header";
      return false;
    }
  }
  if (!std::getline(in, columns)) {
    why = "missing column line";
    return false;
  }
  const auto names = split_commas(columns);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != names.size()) {
      why = "ragged row";
      return false;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < names.size(); ++i) row[names[i]] = cells[i];
    run.rows.push_back(std::move(row));
  }
  run.group_dir = fs::relative(path.parent_path(), root).generic_string();
  return true;
}

double cell(const std::map<std::string, std::string>& row, const std::string& key) {
  const auto it = row.find(key);
  double v = 0.0;
  if (it == row.end() || !parse_exact(it->second, v)) throw std::runtime_error("missing value for " + key);
  return v;
}

}  // namespace

std::string report(const fs::path& dir, double bound_constant) {
  nlohmann::ordered_json summary;
  summary["schema_version"] = kMetricsSchemaVersion;
  summary["bound_constant"] = bound_constant;
  nlohmann::ordered_json warnings = nlohmann::json::array();
  nlohmann::ordered_json incomplete = nlohmann::json::array();

  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      const std::string name = e.path().filename().string();
      if (e.is_regular_file() && name.rfind("metrics_", 0) == 0 && e.path().extension() == ".csv")
        files.push_back(e.path());
    }
  } else {
    warnings.push_back("not a directory: " + dir.string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) warnings.push_back("no metrics files found");

  std::map<std::tuple<std::string, std::string, std::string>, std::vector<RunFile>> groups;
  for (const fs::path& f : files) {
    RunFile run;
    std::string why;
    if (!read_run(f, dir, run, why)) {
      incomplete.push_back({{"file", fs::relative(f, dir).generic_string()}, {"reason", why}});
      continue;
    }
    if (run.rows.empty() || run.rows.back()["probe_acc"].empty()) {
      incomplete.push_back({{"file", fs::relative(f, dir).generic_string()}, {"reason", "no final probe row"}});
      continue;
    }
    groups[{run.group_dir, run.dataset, run.method}].push_back(std::move(run));
  }

  nlohmann::ordered_json out_groups = nlohmann::json::array();
  for (auto& [key, runs] : groups) {
    std::sort(runs.begin(), runs.end(), [](const RunFile& a, const RunFile& b) { return a.seed < b.seed; });
    std::vector<double> acc, pcd, ncd;
    std::size_t bound_pass = 0, bound_total = 0, center_pass = 0, center_total = 0;
    double max_align_gap = 0.0;
    nlohmann::ordered_json seeds = nlohmann::json::array();
    nlohmann::ordered_json margins = nlohmann::json::array();
    for (const RunFile& r : runs) {
      seeds.push_back(r.seed);
      const auto& last = r.rows.back();
      acc.push_back(cell(last, "probe_acc"));
      pcd.push_back(cell(last, "pcd"));
      ncd.push_back(cell(last, "ncd"));
      nlohmann::ordered_json run_margins = nlohmann::json::array();
      for (const auto& row : r.rows) {
        const double margin = cell(row, "bound_margin");
        run_margins.push_back(margin);
        ++bound_total;
        if (margin + bound_constant * cell(row, "bound_slack") >= 0.0) ++bound_pass;
        ++center_total;
        if (cell(row, "slack_pos") >= -1e-9 && cell(row, "slack_neg") >= -1e-9) ++center_pass;
        max_align_gap = std::max(max_align_gap, cell(row, "align_gap"));
      }
      margins.push_back({{"seed", r.seed}, {"margins", run_margins}});
    }
    nlohmann::ordered_json g;
    g["dir"] = std::get<0>(key);
    g["dataset"] = std::get<1>(key);
    g["method"] = std::get<2>(key);
    g["runs"] = runs.size();
    g["seeds"] = seeds;
    g["acc_mean"] = mean_of(acc);
    g["acc_std"] = pstdev_of(acc);
    g["pcd_mean"] = mean_of(pcd);
    g["ncd_mean"] = mean_of(ncd);
    g["bound_checks"] = {{"passed", bound_pass}, {"total", bound_total}};
    g["center_bound_checks"] = {{"passed", center_pass}, {"total", center_total}};
    g["max_align_gap"] = max_align_gap;
    g["raw_margins"] = margins;
    out_groups.push_back(std::move(g));
  }
  summary["groups"] = out_groups;
  summary["incomplete_runs"] = incomplete;
  summary["warnings"] = warnings;

  const std::string text = summary.dump(2) + '\n';
  if (fs::is_directory(dir)) {
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << text;
  }
  return text;
}

}  // namespace gclab
