// Command-line front end. All computation flows through the shared-library
// C API (mminv.h); JSON is used locally only to format output tables.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mminv/mminv.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct OwnedString {
  char* value = nullptr;
  ~OwnedString() { mminv_string_free(value); }
  std::string str() const { return value == nullptr ? std::string() : std::string(value); }
};

struct OwnedSpace {
  mminv_space* value = nullptr;
  ~OwnedSpace() { mminv_space_free(value); }
};

int fail(mminv_status status) {
  std::cerr << "error: " << mminv_last_error() << "\n";
  return status == MMINV_ERR_PARSE || status == MMINV_ERR_INVALID_ARGUMENT ? kExitUsage
                                                                           : kExitDomain;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << content;
}

int load_space(const std::string& path, OwnedSpace* space) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const mminv_status status = mminv_space_from_json(text.c_str(), &space->value);
  if (status != MMINV_OK) return fail(status);
  return kExitOk;
}

// Minimal TOML subset for experiment configs: top-level and [table] sections,
// key = value with strings, numbers, booleans, and flat arrays.
json toml_value(const std::string& raw) {
  std::string s = raw;
  const auto comment = s.find('#');
  if (comment != std::string::npos) s = s.substr(0, comment);
  auto trim = [](std::string t) {
    const auto b = t.find_first_not_of(" \t\r");
    const auto e = t.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
  };
  s = trim(s);
  if (s.empty()) throw std::runtime_error("empty TOML value");
  if (s.front() == '"' && s.back() == '"' && s.size() >= 2)
    return json(s.substr(1, s.size() - 2));
  if (s == "true") return json(true);
  if (s == "false") return json(false);
  if (s.front() == '[') {
    if (s.back() != ']') throw std::runtime_error("unterminated TOML array");
    json arr = json::array();
    std::string body = s.substr(1, s.size() - 2);
    std::string item;
    int depth = 0;
    for (char c : body) {
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == ',' && depth == 0) {
        if (!trim(item).empty()) arr.push_back(toml_value(item));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!trim(item).empty()) arr.push_back(toml_value(item));
    return arr;
  }
  try {
    std::size_t pos = 0;
    const double d = std::stod(s, &pos);
    if (pos == s.size()) {
      if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
          s.find('E') == std::string::npos)
        return json(static_cast<long long>(d));
      return json(d);
    }
  } catch (...) {
  }
  throw std::runtime_error("cannot parse TOML value: " + s);
}

json toml_to_json(const std::string& text) {
  json root = json::object();
  json* current = &root;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    if (line[first] == '[') {
      const auto close = line.find(']', first);
      if (close == std::string::npos) throw std::runtime_error("unterminated TOML table");
      const std::string name = line.substr(first + 1, close - first - 1);
      root[name] = json::object();
      current = &root[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("TOML line without '=': " + line);
    std::string key = line.substr(0, eq);
    const auto kb = key.find_first_not_of(" \t");
    const auto ke = key.find_last_not_of(" \t");
    key = key.substr(kb, ke - kb + 1);
    (*current)[key] = toml_value(line.substr(eq + 1));
  }
  return root;
}

std::string profile_json_to_csv(const json& profile, const std::string& family, int n) {
  std::ostringstream csv;
  csv << "family,n,kappa,obs_diam,sep_symmetric,mode\n";
  const std::string mode = profile.value("mode", std::string());
  for (const auto& entry : profile.at("obs_diam")) {
    const double kappa = entry.at("kappa").get<double>();
    csv << family << "," << n << "," << kappa << ",";
    if (!entry.at("obs_diam").is_null()) csv << entry.at("obs_diam").get<double>();
    csv << ",";
    for (const auto& sep : profile.at("sep")) {
      const auto& ks = sep.at("kappas");
      if (ks.size() == 2 && std::fabs(ks[0].get<double>() - kappa) <= 1e-12 &&
          std::fabs(ks[1].get<double>() - kappa) <= 1e-12 && !sep.at("sep").is_null()) {
        csv << sep.at("sep").get<double>();
        break;
      }
    }
    csv << "," << mode << "\n";
  }
  return csv.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric measure invariants toolkit"};
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::string mode = "exact";
  std::vector<double> grid;
  std::uint64_t budget = 0;
  double resolution = 0.0;

  app.add_option("--out", out_path, "output file (default: stdout)")->envname("MMINV_OUT");
  app.add_option("--format", format, "output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("MMINV_FORMAT");
  app.add_option("--seed", seed, "root seed for all derived randomness")->envname("MMINV_SEED");
  app.add_option("--mode", mode, "solver mode: exact|grid|heuristic")
      ->check(CLI::IsMember({"exact", "grid", "heuristic"}))
      ->envname("MMINV_MODE");
  app.add_option("--grid", grid, "kappa grid values in (0,1)")->envname("MMINV_GRID");
  app.add_option("--budget", budget, "search node budget")->envname("MMINV_BUDGET");
  app.add_option("--resolution", resolution, "observable-diameter grid step (0 = auto)")
      ->envname("MMINV_RESOLUTION");

  auto* cmd_validate = app.add_subcommand("validate", "check the space axioms");
  std::string validate_path;
  cmd_validate->add_option("path", validate_path, "space JSON file")->required();

  auto* cmd_invariants =
      app.add_subcommand("invariants", "observable diameter / separation profile");
  std::string invariants_path;
  cmd_invariants->add_option("path", invariants_path, "space JSON file")->required();

  auto* cmd_compare = app.add_subcommand("compare", "distances and order between two spaces");
  std::string compare_x, compare_y;
  int compare_count = 12;
  cmd_compare->add_option("x", compare_x, "first space JSON file")->required();
  cmd_compare->add_option("y", compare_y, "second space JSON file")->required();
  cmd_compare->add_option("--count", compare_count, "measurement sample size");

  auto* cmd_family = app.add_subcommand("family", "parametrized family experiment");
  std::string family_config;
  std::string family_csv_out;
  cmd_family->add_option("config", family_config, "family config file (.json or .toml)")
      ->required();
  cmd_family->add_option("--csv-out", family_csv_out, "CSV table output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_validate) {
      OwnedSpace space;
      if (const int rc = load_space(validate_path, &space); rc != kExitOk) return rc;
      int valid = 0;
      OwnedString report;
      const mminv_status status = mminv_space_validate(space.value, &valid, &report.value);
      if (status != MMINV_OK) return fail(status);
      write_output(out_path, report.str());
      return valid == 1 ? kExitOk : kExitDomain;
    }

    if (*cmd_invariants) {
      OwnedSpace space;
      if (const int rc = load_space(invariants_path, &space); rc != kExitOk) return rc;
      json options{{"mode", mode}, {"seed", seed}};
      if (!grid.empty()) options["grid"] = grid;
      if (budget > 0) options["budget"] = budget;
      if (resolution > 0) options["resolution"] = resolution;
      OwnedString report;
      const mminv_status status =
          mminv_profile(space.value, options.dump().c_str(), &report.value);
      if (status != MMINV_OK) return fail(status);
      if (format == "csv") {
        write_output(out_path, profile_json_to_csv(json::parse(report.str()), "space",
                                                   mminv_space_size(space.value)));
      } else {
        write_output(out_path, report.str());
      }
      return kExitOk;
    }

    if (*cmd_compare) {
      OwnedSpace x, y;
      if (const int rc = load_space(compare_x, &x); rc != kExitOk) return rc;
      if (const int rc = load_space(compare_y, &y); rc != kExitOk) return rc;
      const json options{{"seed", seed}, {"count", compare_count}};
      OwnedString report;
      const mminv_status status =
          mminv_compare(x.value, y.value, options.dump().c_str(), &report.value);
      if (status != MMINV_OK) return fail(status);
      write_output(out_path, report.str());
      return kExitOk;
    }

    if (*cmd_family) {
      std::string text = read_file(family_config);
      json config;
      if (family_config.size() >= 5 &&
          family_config.substr(family_config.size() - 5) == ".toml") {
        config = toml_to_json(text);
      } else {
        config = json::parse(text);
      }
      // Command-line scalars override the config file.
      if (app.count("--seed") > 0) config["seed"] = seed;
      if (app.count("--mode") > 0) config["mode"] = mode;
      if (!grid.empty()) config["grid"] = grid;
      if (budget > 0) config["budget"] = budget;
      if (resolution > 0) config["resolution"] = resolution;

      OwnedString report, csv;
      const mminv_status status =
          mminv_family_run(config.dump().c_str(), &report.value, &csv.value);
      if (status != MMINV_OK) return fail(status);
      write_output(out_path, format == "csv" ? csv.str() : report.str());
      if (!family_csv_out.empty()) write_output(family_csv_out, csv.str());
      return kExitOk;
    }
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
