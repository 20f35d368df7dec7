#include "run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>

#include "evolve.hpp"
#include "fan.hpp"
#include "norms.hpp"
#include "util/parallel.hpp"
#include "verify.hpp"

namespace htg {

namespace {

using nlohmann::json;

constexpr const char* kUsage =
    "usage: htg-cli <verify|evolve|kernel|projector-norms|strichartz-scan> "
    "[--config file.json] [--out dir]";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- config

double num_or_inf(const json& v, const std::string& at) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError(at + ": expected a number or \"inf\"");
  }
  if (!v.is_number()) throw ConfigError(at + ": expected a number");
  return v.get<double>();
}

struct RunConfig {
  HTypeStructure s = heisenberg_structure(1);
  // grid block
  int n_x = 16, n_z = 48, n_t = 64;
  double L_x = 6.0, L_z = 9.0, T = 4.0;
  // spectral block
  int N_max = 8, K_max = 8, n_rad = 24;
  double lam_min = 0.3, lam_max = 2.1;
  // psi block
  double psi_a = 1.0, psi_b = 2.0;
  json extra;  // command-specific blocks, kept verbatim

  SpaceGrid grid() const { return SpaceGrid{s.d, s.m, Axis{n_x, L_x}, Axis{n_z, L_z}}; }
  SpectralGrid spectral() const { return make_spectral_grid(s.d, s.m, N_max, lam_min, lam_max, n_rad); }
  CutoffSpec psi() const { return CutoffSpec{psi_a, psi_b}; }
};

void read_int(const json& block, const char* key, int& into, const std::string& path) {
  if (!block.contains(key)) return;
  if (!block[key].is_number_integer() || block[key].get<long>() <= 0)
    throw ConfigError(path + "/" + key + ": expected a positive integer");
  into = block[key].get<int>();
}

void read_pos(const json& block, const char* key, double& into, const std::string& path) {
  if (!block.contains(key)) return;
  if (!block[key].is_number() || !(block[key].get<double>() > 0.0))
    throw ConfigError(path + "/" + key + ": expected a positive number");
  into = block[key].get<double>();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  if (text.empty()) return cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("/: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("/: config must be a JSON object");

  if (j.contains("structure")) {
    try {
      cfg.s = structure_from_json(j["structure"].dump());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("/structure: ") + e.what());
    }
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    read_int(g, "n_x", cfg.n_x, "/grid");
    read_int(g, "n_z", cfg.n_z, "/grid");
    read_int(g, "n_t", cfg.n_t, "/grid");
    read_pos(g, "L_x", cfg.L_x, "/grid");
    read_pos(g, "L_z", cfg.L_z, "/grid");
    read_pos(g, "T", cfg.T, "/grid");
  }
  if (j.contains("spectral")) {
    const auto& sp = j["spectral"];
    read_int(sp, "N_max", cfg.N_max, "/spectral");
    read_int(sp, "K_max", cfg.K_max, "/spectral");
    read_int(sp, "n_rad", cfg.n_rad, "/spectral");
    read_pos(sp, "lam_min", cfg.lam_min, "/spectral");
    read_pos(sp, "lam_max", cfg.lam_max, "/spectral");
    if (!(cfg.lam_min < cfg.lam_max))
      throw ConfigError("/spectral: need lam_min < lam_max");
  }
  if (j.contains("psi")) {
    read_pos(j["psi"], "a", cfg.psi_a, "/psi");
    read_pos(j["psi"], "b", cfg.psi_b, "/psi");
    if (!(cfg.psi_a < cfg.psi_b)) throw ConfigError("/psi: need a < b");
  }
  cfg.extra = j;
  return cfg;
}

// ------------------------------------------------------- initial data families

// "gaussian", "coherent(x0,xi0)", "hermite_mode(lambda,k)", "bgx-transport"
SpaceField make_data(const std::string& family, const RunConfig& cfg) {
  const SpaceGrid g = cfg.grid();
  const double lam0 = 0.5 * (cfg.lam_min + cfg.lam_max);
  auto envelope = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    return std::exp(-0.5 * x.squaredNorm() - z.squaredNorm() / 6.0);
  };

  auto args = [&](const std::string& text, std::size_t want) {
    const auto open = text.find('('), close = text.rfind(')');
    std::vector<double> out;
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw ConfigError("/data: expected " + text.substr(0, open) + "(...)");
    std::string body = text.substr(open + 1, close - open - 1);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t used = 0;
      out.push_back(std::stod(body.substr(pos), &used));
      pos += used;
      if (pos < body.size() && body[pos] == ',') ++pos;
    }
    if (out.size() != want) throw ConfigError("/data: wrong argument count in " + text);
    return out;
  };

  if (family == "gaussian")
    return SpaceField::from_function(g, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
      return envelope(x, z) * std::polar(1.0, lam0 * z.sum());
    });
  if (family.rfind("coherent", 0) == 0) {
    const auto a = args(family, 2);  // center x0 and momentum xi0 on the x_1 axis
    return SpaceField::from_function(g, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
      Eigen::VectorXd xs = x;
      xs(0) -= a[0];
      return std::exp(-0.5 * xs.squaredNorm() - z.squaredNorm() / 6.0) *
             std::polar(1.0, a[1] * x(0) + lam0 * z.sum());
    });
  }
  if (family.rfind("hermite_mode", 0) == 0) {
    const auto a = args(family, 2);  // (lambda, k): e^{i lam z} Phi_k envelope
    const double lam = a[0];
    MultiIndex alpha(g.d, 0);
    alpha[0] = int(a[1]);
    if (!(lam >= cfg.lam_min && lam <= cfg.lam_max))
      throw ConfigError("/data: hermite_mode lambda outside the spectral band");
    return SpaceField::from_function(g, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
      return multi_hermite(alpha, std::abs(lam), x.head(g.d)) *
             multi_hermite(MultiIndex(g.d, 0), std::abs(lam), x.tail(g.d)) *
             std::exp(-z.squaredNorm() / 6.0) * std::polar(1.0, lam * z.sum());
    });
  }
  if (family == "bgx-transport")  // transport-type profile, qualitative runs only
    return SpaceField::from_function(g, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
      return envelope(x, z) * std::polar(1.0, 2.0 * x(0) + lam0 * z.sum());
    });
  throw ConfigError("/data: unknown family '" + family + "'");
}

// -------------------------------------------------------------- artifacts

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path);
  os << text;
}

// (t, x, z) slice CSV along the x_1 and z_1 axes, other coordinates at 0
std::string slice_csv(const SpaceTimeField& u) {
  const SpaceGrid& g = u.grid;
  std::string csv = "t,x,z,re,im\n";
  std::vector<std::size_t> xstrides(2 * g.d);
  for (int a = 0; a < 2 * g.d; ++a) {
    std::size_t s = 1;
    for (int b = a + 1; b < 2 * g.d; ++b) s *= g.xaxis.n;
    xstrides[a] = s;
  }
  std::vector<std::size_t> zstrides(g.m);
  for (int a = 0; a < g.m; ++a) {
    std::size_t s = 1;
    for (int b = a + 1; b < g.m; ++b) s *= g.zaxis.n;
    zstrides[a] = s;
  }
  // flat offset with all axes but x_1 / z_1 pinned to the origin index n/2
  std::size_t xoff = 0, zoff = 0;
  for (int a = 1; a < 2 * g.d; ++a) xoff += std::size_t(g.xaxis.n / 2) * xstrides[a];
  for (int a = 1; a < g.m; ++a) zoff += std::size_t(g.zaxis.n / 2) * zstrides[a];
  for (int t = 0; t < u.nt; ++t)
    for (int ix = 0; ix < g.xaxis.n; ++ix)
      for (int iz = 0; iz < g.zaxis.n; ++iz) {
        const std::size_t flat =
            std::size_t(t) * g.size() + (xoff + ix * xstrides[0]) * g.n_z() + zoff +
            iz * zstrides[0];
        const cplx v = u.samples[flat];
        csv += fmt12(u.time(t)) + "," + fmt12(g.xaxis.point(ix)) + "," +
               fmt12(g.zaxis.point(iz)) + "," + fmt12(v.real()) + "," + fmt12(v.imag()) + "\n";
      }
  return csv;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_text, json tolerances, json extras) {
  json m;
  m["command"] = command;
  m["version"] = version_string();
  m["config"] = config_text.empty() ? json::object() : json::parse(config_text);
  m["config_hash"] = std::to_string(std::hash<std::string>{}(config_text));
  m["threads"] = thread_count();
  m["tolerances"] = std::move(tolerances);
  if (!extras.is_null()) m["outputs"] = std::move(extras);
  write_file(out_dir + "/manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------- commands

int cmd_verify(const RunConfig&, const std::string& config_text, const std::string& out_dir,
               std::string* report_json) {
  const VerifyReport rep = run_verify();
  json checks = json::array();
  json tolerances = json::object();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
    tolerances[c.name] = c.tolerance;
  }
  json rep_j = {{"command", "verify"}, {"pass", rep.all_pass()}, {"checks", checks}};
  write_file(out_dir + "/report.json", rep_j.dump(2) + "\n");
  write_manifest(out_dir, "verify", config_text, tolerances, nullptr);
  if (report_json) *report_json = rep_j.dump(2);
  return rep.all_pass() ? 0 : 1;
}

int cmd_evolve(const RunConfig& cfg, const std::string& config_text, const std::string& out_dir,
               std::string* report_json) {
  const json block = cfg.extra.value("evolve", json::object());
  const std::string family = block.value("data", "gaussian");
  const std::string equation = block.value("equation", "schrodinger");
  const auto u0 = make_data(family, cfg);
  const auto sg = cfg.spectral();

  SpaceTimeField u;
  if (equation == "schrodinger") {
    u = schrodinger_propagate(u0, cfg.T, cfg.n_t, cfg.s, sg);
  } else if (equation == "wave") {
    WaveData wd;
    wd.u0 = u0;
    u = wave_propagate(wd, cfg.T, cfg.n_t, cfg.s, sg).field;
  } else {
    throw ConfigError("/evolve/equation: expected schrodinger or wave");
  }
  write_file(out_dir + "/evolve.csv", slice_csv(u));
  json rep = {{"command", "evolve"}, {"equation", equation}, {"data", family},
              {"csv", out_dir + "/evolve.csv"}};
  write_manifest(out_dir, "evolve", config_text, json::object(), rep);
  if (report_json) *report_json = rep.dump(2);
  return 0;
}

int cmd_kernel(const RunConfig& cfg, const std::string& config_text, const std::string& out_dir,
               std::string* report_json) {
  const json block = cfg.extra.value("kernel", json::object());
  const std::string type = block.value("type", "schrodinger");
  const int n_quad = block.value("n_quad", 48);
  KernelField kf;
  if (type == "schrodinger")
    kf = kappa_sigma(cfg.psi(), cfg.grid(), cfg.T, cfg.n_t, cfg.s, cfg.K_max, n_quad);
  else if (type == "wave+" || type == "wave-")
    kf = wave_kernel(cfg.psi(), type == "wave+" ? 1 : -1, cfg.grid(), cfg.T, cfg.n_t, cfg.s,
                     cfg.K_max, n_quad);
  else
    throw ConfigError("/kernel/type: expected schrodinger, wave+ or wave-");

  write_file(out_dir + "/kernel.csv", slice_csv(kf.field));
  double sup = 0;
  for (const cplx& v : kf.field.samples) sup = std::max(sup, std::abs(v));
  json rep = {{"command", "kernel"},
              {"type", type},
              {"sup", sup},
              {"sup_bound", kf.sup_bound},
              {"tail_bound", kf.tail_bound},
              {"truncation_warning", kf.truncation_warning},
              {"path_discrepancy", kf.path_discrepancy},
              {"csv", out_dir + "/kernel.csv"}};
  write_manifest(out_dir, "kernel", config_text, {{"path_discrepancy", 1e-4}}, rep);
  if (report_json) *report_json = rep.dump(2);
  return sup <= kf.sup_bound ? 0 : 1;
}

int cmd_projector_norms(const RunConfig& cfg, const std::string& config_text,
                        const std::string& out_dir, std::string* report_json) {
  const json block = cfg.extra.value("projector_norms", json::object());
  const double r = num_or_inf(block.value("r", json(6.0)), "/projector_norms/r");
  const int k_min = block.value("k_min", 1), k_max = block.value("k_max", 12);
  const double lam = block.value("lambda", 1.0);
  if (k_min < 0 || k_max < k_min) throw ConfigError("/projector_norms: need 0 <= k_min <= k_max");

  const double rho = rho_exponent(r, cfg.s.d);
  std::string csv = "k,norm,bound,ratio\n";
  json rows = json::array();
  for (int k = k_min; k <= k_max; ++k) {
    const auto est = projector_norm_estimate(k, 2.0, r, 200, lam);
    const double bound = std::pow(2.0 * k + cfg.s.d, 0.5 * rho);
    csv += std::to_string(k) + "," + fmt12(est.value) + "," + fmt12(bound) + "," +
           fmt12(est.value / bound) + "\n";
    rows.push_back({{"k", k}, {"norm", est.value}, {"ratio", est.value / bound}});
  }
  write_file(out_dir + "/projector_norms.csv", csv);
  json rep = {{"command", "projector-norms"},
              {"r", std::isinf(r) ? json("inf") : json(r)},
              {"rho", rho}, {"rows", rows},
              {"csv", out_dir + "/projector_norms.csv"}};
  write_manifest(out_dir, "projector-norms", config_text, json::object(), rep);
  if (report_json) *report_json = rep.dump(2);
  return 0;
}

int cmd_strichartz(const RunConfig& cfg, const std::string& config_text,
                   const std::string& out_dir, std::string* report_json) {
  const json block = cfg.extra.value("strichartz", json::object());
  const double p = num_or_inf(block.value("p", json(4.0)), "/strichartz/p");
  const double q = num_or_inf(block.value("q", json(4.0)), "/strichartz/q");
  const double r = num_or_inf(block.value("r", json("inf")), "/strichartz/r");
  const std::string eq_name = block.value("equation", "schrodinger");
  const std::string family = block.value("data", "gaussian");
  if (!(p >= 1.0) || !(q >= 1.0) || !(r >= 1.0))
    throw ConfigError("/strichartz: exponents p, q, r must be >= 1");
  if (eq_name != "schrodinger" && eq_name != "wave")
    throw ConfigError("/strichartz/equation: expected schrodinger or wave");
  const Equation eq = eq_name == "wave" ? Equation::wave : Equation::schrodinger;

  const auto adm = admissible_check(p, q, r, cfg.s.d, cfg.s.m, eq);
  const double sigma = block.contains("sigma")
                           ? num_or_inf(block["sigma"], "/strichartz/sigma")
                           : adm.sigma;
  std::vector<double> lams{1.0, 2.0, 4.0, 8.0};
  if (block.contains("dilations")) {
    lams.clear();
    for (const auto& v : block["dilations"]) lams.push_back(num_or_inf(v, "/strichartz/dilations"));
  }
  if (lams.empty()) throw ConfigError("/strichartz/dilations: must be non-empty");
  for (double l : lams)
    if (!(l > 0.0) || std::isinf(l)) throw ConfigError("/strichartz/dilations: must be positive and finite");

  const auto u0 = make_data(family, cfg);
  const auto table =
      dilation_scan(u0, lams, MixedNormSpec{r, q, p}, eq, sigma, cfg.T, cfg.n_t, cfg.s,
                    cfg.spectral());
  std::string csv = "Lam,mixed,l2,hsigma,ratio\n";
  for (const auto& row : table)
    csv += fmt12(row.Lam) + "," + fmt12(row.mixed) + "," + fmt12(row.l2) + "," +
           fmt12(row.hsigma) + "," + fmt12(row.ratio) + "\n";
  write_file(out_dir + "/strichartz.csv", csv);
  json rep = {{"command", "strichartz-scan"},
              {"p", p == INFINITY ? json("inf") : json(p)},
              {"q", q == INFINITY ? json("inf") : json(q)},
              {"r", r == INFINITY ? json("inf") : json(r)},
              {"sigma", sigma},
              {"equation", eq_name},
              {"admissible", adm.admissible},
              {"diagnostics", adm.diagnostics},  // exploratory runs are flagged, not rejected
              {"csv", out_dir + "/strichartz.csv"}};
  write_manifest(out_dir, "strichartz-scan", config_text, json::object(), rep);
  if (report_json) *report_json = rep.dump(2);
  return 0;
}

}  // namespace

SpaceField sample_data_family(const HTypeStructure& s, const std::string& family, int n_x,
                              double L_x, int n_z, double L_z) {
  RunConfig cfg;
  cfg.s = s;
  cfg.n_x = n_x;
  cfg.L_x = L_x;
  cfg.n_z = n_z;
  cfg.L_z = L_z;
  return make_data(family, cfg);
}

const char* version_string() { return "0.1.0"; }

int run_command(const std::string& command, const std::string& config_json,
                const std::string& out_dir, std::string* report_json) {
  try {
    std::error_code ec;
    std::filesystem::create_directories(out_dir.empty() ? "." : out_dir, ec);
    const std::string dir = out_dir.empty() ? "." : out_dir;
    const RunConfig cfg = parse_config(config_json);
    if (command == "verify") return cmd_verify(cfg, config_json, dir, report_json);
    if (command == "evolve") return cmd_evolve(cfg, config_json, dir, report_json);
    if (command == "kernel") return cmd_kernel(cfg, config_json, dir, report_json);
    if (command == "projector-norms")
      return cmd_projector_norms(cfg, config_json, dir, report_json);
    if (command == "strichartz-scan") return cmd_strichartz(cfg, config_json, dir, report_json);
    if (report_json) *report_json = json{{"error", "unknown command '" + command + "'"},
                                         {"usage", kUsage}}.dump(2);
    return 2;
  } catch (const ConfigError& e) {
    if (report_json) *report_json = json{{"error", e.what()}, {"usage", kUsage}}.dump(2);
    return 2;
  } catch (const std::exception& e) {
    if (report_json) *report_json = json{{"error", e.what()}}.dump(2);
    return 1;
  }
}

}  // namespace htg
