// C ABI wrapper over the C++ core: opaque handles, thread-local error
// strings, caller-owned strings.  No C++ types or exceptions cross the
// boundary.

#include "htg/htg.h"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "norms.hpp"
#include "run.hpp"
#include "structure.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
auto guarded(Fn&& fn, decltype(fn()) on_error) -> decltype(fn()) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::exception& e) {
    set_error(e.what());
    return on_error;
  } catch (...) {
    set_error("unknown error");
    return on_error;
  }
}

}  // namespace

struct htg_structure {
  htg::HTypeStructure s;
};

struct htg_field {
  htg::SpaceField f;
};

extern "C" {

const char* htg_last_error(void) { return g_last_error.c_str(); }

const char* htg_version(void) { return htg::version_string(); }

void htg_string_free(char* s) { std::free(s); }

int htg_run_command(const char* command, const char* config_json, const char* out_dir,
                    char** report_json) {
  if (!command) {
    set_error("command is NULL");
    return 2;
  }
  return guarded(
      [&]() -> int {
        std::string report;
        const int rc = htg::run_command(command, config_json ? config_json : "",
                                        out_dir ? out_dir : ".", &report);
        if (report_json) *report_json = dup_string(report);
        return rc;
      },
      2);
}

htg_structure* htg_structure_heisenberg(int d) {
  return guarded([&]() -> htg_structure* { return new htg_structure{htg::heisenberg_structure(d)}; },
                 nullptr);
}

htg_structure* htg_structure_quaternionic(int d) {
  return guarded(
      [&]() -> htg_structure* { return new htg_structure{htg::quaternionic_structure(d)}; },
      nullptr);
}

htg_structure* htg_structure_from_json(const char* json_text) {
  if (!json_text) {
    set_error("json_text is NULL");
    return nullptr;
  }
  return guarded(
      [&]() -> htg_structure* {
        auto s = htg::structure_from_json(json_text);
        const auto rep = htg::validate_htype(s);
        if (!rep.ok) throw std::runtime_error("not an H-type structure: " + rep.message);
        return new htg_structure{std::move(s)};
      },
      nullptr);
}

char* htg_structure_to_json(const htg_structure* s) {
  if (!s) {
    set_error("structure is NULL");
    return nullptr;
  }
  return guarded([&]() -> char* { return dup_string(htg::structure_to_json(s->s)); }, nullptr);
}

int htg_structure_d(const htg_structure* s) { return s ? s->s.d : -1; }
int htg_structure_m(const htg_structure* s) { return s ? s->s.m : -1; }

void htg_structure_destroy(htg_structure* s) { delete s; }

htg_field* htg_field_create(const htg_structure* s, const char* family, int n_x, double L_x,
                            int n_z, double L_z) {
  if (!s || !family) {
    set_error(!s ? "structure is NULL" : "family is NULL");
    return nullptr;
  }
  if (n_x <= 0 || n_z <= 0 || !(L_x > 0) || !(L_z > 0)) {
    set_error("grid parameters must be positive");
    return nullptr;
  }
  return guarded(
      [&]() -> htg_field* {
        return new htg_field{htg::sample_data_family(s->s, family, n_x, L_x, n_z, L_z)};
      },
      nullptr);
}

double htg_field_l2(const htg_field* f) {
  if (!f) {
    set_error("field is NULL");
    return -1.0;
  }
  return guarded([&]() -> double { return f->f.l2_norm(); }, -1.0);
}

void htg_field_destroy(htg_field* f) { delete f; }

int htg_admissible_check(double p, double q, double r, int d, int m, const char* equation,
                         double* sigma) {
  if (!equation) {
    set_error("equation is NULL");
    return -1;
  }
  htg::Equation eq;
  if (std::strcmp(equation, "schrodinger") == 0)
    eq = htg::Equation::schrodinger;
  else if (std::strcmp(equation, "wave") == 0)
    eq = htg::Equation::wave;
  else {
    set_error("equation must be \"schrodinger\" or \"wave\"");
    return -1;
  }
  if (d < 1 || m < 1 || !(p >= 1) || !(q >= 1) || !(r >= 1)) {
    set_error("need d, m >= 1 and p, q, r >= 1");
    return -1;
  }
  return guarded(
      [&]() -> int {
        const auto res = htg::admissible_check(p, q, r, d, m, eq);
        if (sigma) *sigma = res.sigma;
        if (!res.admissible && !res.diagnostics.empty()) set_error(res.diagnostics.front());
        return res.admissible ? 1 : 0;
      },
      -1);
}

}  // extern "C"
