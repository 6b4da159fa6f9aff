#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include "cclab/error.hpp"
#include "cclab/families.hpp"
#include "cclab/fixtures.hpp"
#include "cclab/io.hpp"

// The CLI commands as plain functions. Exit codes: 0 success, 1 domain or
// invariant failure, 2 I/O or parse failure.

namespace cclab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitParse = 2;

struct CommandResult {
  int code = kExitOk;
  std::string out;
  std::string err;
};

/// CCLAB_TOL if set, else the library default.
inline double tolerance_from_env() {
  const char* v = std::getenv("CCLAB_TOL");
  if (!v || !*v) return kDefaultTol;
  try {
    std::size_t used = 0;
    const double t = std::stod(v, &used);
    if (used != std::string(v).size() || !(t > 0.0)) throw std::invalid_argument("tol");
    return t;
  } catch (const std::logic_error&) {
    throw ParseError(std::string("CCLAB_TOL must be a positive number, got '") + v + "'");
  }
}

namespace detail {

template <class F>
CommandResult run_guarded(F&& body) {
  CommandResult r;
  try {
    body(r);
  } catch (const ParseError& e) {
    r.code = kExitParse;
    r.err += std::string("error: ") + e.what() + "\n";
  } catch (const Error& e) {
    r.code = kExitDomain;
    r.err += std::string("error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    r.code = kExitDomain;
    r.err += std::string("error: ") + e.what() + "\n";
  }
  return r;
}

inline std::string g12(double v) { return format_g12(v); }

}  // namespace detail

inline CommandResult cmd_validate(const std::string& path, double tol) {
  return detail::run_guarded([&](CommandResult& r) {
    const Fixture fx = read_fixture(path);
    const FixtureReport rep = validate_fixture(fx, tol);
    r.out += "fixture: " + (fx.name.empty() ? path : fx.name) + " (" + to_string(fx.kind()) + ")\n";
    for (const auto& c : rep.checks)
      r.out += std::string(c.pass ? "  ok    " : "  FAIL  ") + c.name + "  residual " + detail::g12(c.residual) + "\n";
    if (const auto* bad = rep.first_failure()) {
      r.code = kExitDomain;
      r.err += "invalid: " + bad->name + " (residual " + detail::g12(bad->residual) + ", tol " + detail::g12(tol) + ")\n";
    } else {
      r.out += "valid\n";
    }
  });
}

inline CommandResult cmd_curvature(const std::string& path, double eps, bool spectrum, double tol) {
  return detail::run_guarded([&](CommandResult& r) {
    const Fixture fx = read_fixture(path);
    const FixtureReport rep = validate_fixture(fx, tol);
    if (const auto* bad = rep.first_failure())
      throw InvalidTensor(bad->name, bad->residual);
    const CurvatureTensor t = fixture_curvature(fx, eps, tol);
    const SweepRow row = sweep_row(t, eps, tol);
    const TensorReport tr = validate_tensor(t, tol);
    r.out += "fixture: " + (fx.name.empty() ? path : fx.name) + " (" + to_string(fx.kind()) + ")\n";
    r.out += "dimension: " + std::to_string(t.n()) + "\n";
    r.out += "eps: " + detail::g12(eps) + "\n";
    r.out += "min_eig: " + detail::g12(row.min_eig) + "\n";
    r.out += "max_eig: " + detail::g12(row.max_eig) + "\n";
    r.out += "min_sec: " + detail::g12(row.min_sec) + "\n";
    r.out += "max_sec: " + detail::g12(row.max_sec) + "\n";
    r.out += "bianchi_residual: " + detail::g12(tr.residual(kBianchi)) + "\n";
    if (spectrum) {
      r.out += "spectrum:";
      if (t.n() >= 2)
        for (double v : curvature_spectrum(t, tol).eigenvalues) r.out += " " + detail::g12(v);
      r.out += "\n";
    }
  });
}

/// Without out_path the CSV goes to stdout; with it, stdout gets the
/// classification line only.
inline CommandResult cmd_sweep(const std::string& path, const std::optional<std::string>& grid,
                               const std::optional<std::string>& out_path, double tol) {
  return detail::run_guarded([&](CommandResult& r) {
    const std::vector<double> g = grid ? parse_grid(*grid) : default_grid();
    const Fixture fx = read_fixture(path);
    if (fx.kind() != FixtureKind::family_spec)
      throw DomainError(std::string("sweep needs a family_spec fixture, got ") + to_string(fx.kind()));
    const SweepResult res = sweep(std::get<FamilySpec>(fx.payload), g, {}, tol);
    const std::string csv = write_sweep_csv(res);
    if (out_path) {
      write_text_file(*out_path, csv);
      r.out += std::string("classified: ") + to_string(res.summary.classified) +
               " (inf_min_eig=" + detail::g12(res.summary.inf_min_eig) + ")\n";
    } else {
      r.out += csv;
    }
  });
}

inline CommandResult cmd_examples_list() {
  return detail::run_guarded([&](CommandResult& r) {
    for (const auto& n : bundled_names()) {
      const Fixture fx = bundled_fixture(n);
      r.out += n + "  " + to_string(fx.kind()) + "  " + fx.description + "\n";
    }
  });
}

inline CommandResult cmd_examples_emit(const std::string& name, const std::string& dir) {
  return detail::run_guarded([&](CommandResult& r) {
    const Fixture fx = bundled_fixture(name);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ParseError("cannot create directory '" + dir + "': " + ec.message());
    const std::string path = (std::filesystem::path(dir) / (name + ".json")).string();
    write_text_file(path, write_fixture(fx));
    r.out += path + "\n";
  });
}

}  // namespace cclab
