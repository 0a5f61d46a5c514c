#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "opcond/error.hpp"
#include "opcond/experiment.hpp"

namespace opcond {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& v, int line, const std::string& key) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ParseError(line, key + ": not a number: '" + v + "'");
  return out;
}

long long parse_int(const std::string& v, int line, const std::string& key) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ParseError(line, key + ": not an integer: '" + v + "'");
  return out;
}

void range(bool ok, int line, const std::string& what) {
  if (!ok) throw ParseError(line, what);
}

void set_variants(ExperimentConfig& c, const std::string& value, int line) {
  c.pwc = c.cpl = c.jacobi = false;
  std::stringstream in(value);
  std::string item;
  bool any = false;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item == "pwc") {
      c.pwc = true;
    } else if (item == "cpl") {
      c.cpl = true;
    } else if (item == "both") {
      c.pwc = c.cpl = true;
    } else if (item == "diag_jacobi") {
      c.jacobi = true;
    } else {
      throw ParseError(line, "variant: unknown value '" + item + "' (pwc, cpl, both, diag_jacobi)");
    }
    any = true;
  }
  range(any, line, "variant: empty list");
}

}  // namespace

const char* to_string(Problem p) noexcept {
  switch (p) {
    case Problem::cube_hypersingular: return "cube_hypersingular";
    case Problem::interval_hypersingular: return "interval_hypersingular";
    case Problem::interval_laplace_s1: return "interval_laplace_s1";
  }
  return "?";
}

const char* to_string(Refinement r) noexcept { return r == Refinement::uniform ? "uniform" : "corner_local"; }

QuadratureSettings ExperimentConfig::quadrature_settings() const {
  return quadrature == QuadratureProfile::high ? QuadratureSettings::high() : QuadratureSettings::standard();
}

LanczosOptions ExperimentConfig::lanczos_options() const {
  LanczosOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  o.seed = seed;
  return o;
}

void ExperimentConfig::validate() const {
  range(levels >= 1, 0, "levels must be at least 1");
  range(pwc || cpl || jacobi, 0, "no variant selected");
  range(ell >= 1 && ell <= 3, 0, "ell must be 1, 2 or 3");
  range(alpha >= 0.0, 0, "alpha must be nonnegative");
  range(beta1_pwc > 0.0 && beta1_cpl > 0.0, 0, "beta1 must be positive");
  range(beta2 > 0.0, 0, "beta2 must be positive");
  const double sv = effective_s();
  range(sv >= 0.0 && sv <= 1.0, 0, "s must lie in [0, 1]");
  range(sweeps_per_level >= 1, 0, "sweeps_per_level must be at least 1");
  range(effective_initial_bisections() >= 0 && bisections_per_level >= 1, 0, "bisection counts out of range");
  range(elements >= 2, 0, "elements must be at least 2");
  range(tol > 0.0, 0, "tol must be positive");
  range(max_iter >= 0, 0, "max_iter must be nonnegative");
  if (problem != Problem::cube_hypersingular) {
    range(refinement == Refinement::uniform, 0, "corner_local refinement needs the cube problem");
    range(ell == 1 || problem == Problem::interval_laplace_s1, 0, "interval_hypersingular supports ell = 1 only");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  bool have_problem = false;
  std::optional<double> beta1;
  std::optional<double> beta1_pwc, beta1_cpl;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(std::string_view(raw).substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(line, "expected 'key = value'");
    if (seen.contains(key)) throw ParseError(line, "duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
    seen[key] = line;

    if (key == "problem") {
      if (value == "cube_hypersingular") c.problem = Problem::cube_hypersingular;
      else if (value == "interval_hypersingular") c.problem = Problem::interval_hypersingular;
      else if (value == "interval_laplace_s1") c.problem = Problem::interval_laplace_s1;
      else throw ParseError(line, "problem: unknown value '" + value + "'");
      have_problem = true;
    } else if (key == "refinement") {
      if (value == "uniform") c.refinement = Refinement::uniform;
      else if (value == "corner_local") c.refinement = Refinement::corner_local;
      else throw ParseError(line, "refinement: unknown value '" + value + "'");
    } else if (key == "levels") {
      const auto v = parse_int(value, line, key);
      range(v >= 1 && v <= 64, line, "levels must lie in [1, 64]");
      c.levels = static_cast<int>(v);
    } else if (key == "variant") {
      set_variants(c, value, line);
    } else if (key == "ell") {
      const auto v = parse_int(value, line, key);
      range(v >= 1 && v <= 3, line, "ell must be 1, 2 or 3");
      c.ell = static_cast<int>(v);
    } else if (key == "alpha") {
      c.alpha = parse_double(value, line, key);
      range(c.alpha >= 0.0, line, "alpha must be nonnegative");
    } else if (key == "beta1" || key == "beta1_pwc" || key == "beta1_cpl") {
      const double v = parse_double(value, line, key);
      range(v > 0.0, line, key + " must be positive");
      (key == "beta1" ? beta1 : key == "beta1_pwc" ? beta1_pwc : beta1_cpl) = v;
    } else if (key == "beta2") {
      c.beta2 = parse_double(value, line, key);
      range(c.beta2 > 0.0, line, "beta2 must be positive");
    } else if (key == "s") {
      const double v = parse_double(value, line, key);
      range(v >= 0.0 && v <= 1.0, line, "s must lie in [0, 1]");
      c.s = v;
    } else if (key == "quadrature") {
      if (value == "standard") c.quadrature = QuadratureProfile::standard;
      else if (value == "high") c.quadrature = QuadratureProfile::high;
      else throw ParseError(line, "quadrature: unknown value '" + value + "' (standard, high)");
    } else if (key == "seed") {
      const auto v = parse_int(value, line, key);
      range(v >= 0, line, "seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(v);
    } else if (key == "output") {
      c.output = value;
    } else if (key == "sweeps_per_level") {
      const auto v = parse_int(value, line, key);
      range(v >= 1 && v <= 1000, line, "sweeps_per_level must lie in [1, 1000]");
      c.sweeps_per_level = static_cast<int>(v);
    } else if (key == "initial_bisections") {
      const auto v = parse_int(value, line, key);
      range(v >= 0 && v <= 40, line, "initial_bisections must lie in [0, 40]");
      c.initial_bisections = static_cast<int>(v);
    } else if (key == "bisections_per_level") {
      const auto v = parse_int(value, line, key);
      range(v >= 1 && v <= 40, line, "bisections_per_level must lie in [1, 40]");
      c.bisections_per_level = static_cast<int>(v);
    } else if (key == "elements") {
      const auto v = parse_int(value, line, key);
      range(v >= 2 && v <= (1 << 20), line, "elements must lie in [2, 2^20]");
      c.elements = static_cast<int>(v);
    } else if (key == "tol") {
      c.tol = parse_double(value, line, key);
      range(c.tol > 0.0 && c.tol < 1.0, line, "tol must lie in (0, 1)");
    } else if (key == "max_iter") {
      const auto v = parse_int(value, line, key);
      range(v >= 0, line, "max_iter must be nonnegative");
      c.max_iter = static_cast<int>(v);
    } else {
      throw ParseError(line, "unknown key '" + key + "'");
    }
  }
  if (!have_problem) throw ParseError(0, "problem required");
  if (beta1) c.beta1_pwc = c.beta1_cpl = *beta1;
  if (beta1_pwc) c.beta1_pwc = *beta1_pwc;
  if (beta1_cpl) c.beta1_cpl = *beta1_cpl;
  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace opcond
