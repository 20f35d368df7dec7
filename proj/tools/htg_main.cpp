// htg-cli: thin command-line front end over the C API (htg/htg.h).
// Everything substantive happens behind htg_run_command; this file only
// parses arguments, loads the config file, and relays the JSON report.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "htg/htg.h"

namespace {

int read_file(const std::string& path, std::string& into) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    std::fprintf(stderr, "error: cannot read config file '%s'\n", path.c_str());
    return 2;
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  into = ss.str();
  return 0;
}

// Run one command through the C API and print its report.
int dispatch(const std::string& command, const std::string& config_path,
             const std::string& out_dir, const std::string& config_override) {
  std::string config = config_override;
  if (config.empty() && !config_path.empty()) {
    if (int rc = read_file(config_path, config)) return rc;
  }
  char* report = nullptr;
  const int rc = htg_run_command(command.c_str(), config.c_str(), out_dir.c_str(), &report);
  if (report) {
    std::printf("%s\n", report);
    htg_string_free(report);
  }
  if (rc != 0 && htg_last_error()[0] != '\0')
    std::fprintf(stderr, "error: %s\n", htg_last_error());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical Fourier analysis on H-type groups"};
  app.set_version_flag("--version", std::string(htg_version()));
  app.require_subcommand(1);
  app.failure_message(
      [](const CLI::App* a, const CLI::Error& e) { return CLI::FailureMessage::help(a, e); });

  std::string config_path, out_dir = ".";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory for artifacts");
  };

  add_common(app.add_subcommand("verify", "run the full property suite"));
  add_common(app.add_subcommand("evolve", "propagate initial data and dump a slice CSV"));
  add_common(app.add_subcommand("kernel", "tabulate a fan kernel and check its sup bound"));
  add_common(app.add_subcommand("projector-norms",
                                "scan spectral-projector operator norms against the bound"));

  auto* scan = app.add_subcommand("strichartz-scan", "dilation scan of the Strichartz ratio");
  add_common(scan);
  std::string p = "4", q = "4", r = "inf", equation = "schrodinger", data = "gaussian";
  std::vector<double> dilations;
  scan->add_option("--p", p, "horizontal exponent (number or inf)");
  scan->add_option("--q", q, "time exponent (number or inf)");
  scan->add_option("--r", r, "vertical exponent (number or inf)");
  scan->add_option("--equation", equation, "schrodinger | wave");
  scan->add_option("--data", data, "initial-data family");
  scan->add_option("--dilations", dilations, "dilation parameters (positive)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  std::string override_json;
  if (name == "strichartz-scan" &&
      (scan->count("--p") || scan->count("--q") || scan->count("--r") ||
       scan->count("--equation") || scan->count("--data") || scan->count("--dilations"))) {
    // merge the flags into the config as the strichartz block; flags win
    std::string base;
    if (!config_path.empty()) {
      if (int rc = read_file(config_path, base)) return rc;
    }
    nlohmann::json cfg = nlohmann::json::object();
    if (!base.empty()) {
      cfg = nlohmann::json::parse(base, nullptr, /*allow_exceptions=*/false);
      if (cfg.is_discarded() || !cfg.is_object()) {
        std::fprintf(stderr, "error: config file is not a JSON object\n");
        return 2;
      }
    }
    auto jnum = [](const std::string& v) -> nlohmann::json {
      if (v == "inf") return "inf";
      try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size()) return x;
      } catch (...) {
      }
      return v;  // let the config validator report it
    };
    auto& block = cfg["strichartz"];
    if (!block.is_object()) block = nlohmann::json::object();
    if (scan->count("--p") || !block.contains("p")) block["p"] = jnum(p);
    if (scan->count("--q") || !block.contains("q")) block["q"] = jnum(q);
    if (scan->count("--r") || !block.contains("r")) block["r"] = jnum(r);
    if (scan->count("--equation") || !block.contains("equation")) block["equation"] = equation;
    if (scan->count("--data") || !block.contains("data")) block["data"] = data;
    if (!dilations.empty()) block["dilations"] = dilations;
    override_json = cfg.dump();
  }

  return dispatch(name, config_path, out_dir, override_json);
}
