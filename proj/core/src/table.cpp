#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "opcond/error.hpp"
#include "opcond/experiment.hpp"

namespace opcond {

std::string format_kappa(double kappa) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", kappa);
  return buf;
}

std::string format_h(double h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1e", h);
  return buf;
}

namespace {

std::string format_seconds(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", t);
  return buf;
}

std::string variant_list(const ExperimentConfig& c) {
  std::string out;
  auto add = [&](const char* name) { out += out.empty() ? name : std::string(",") + name; };
  if (c.pwc) add("pwc");
  if (c.cpl) add("cpl");
  if (c.jacobi) add("diag_jacobi");
  return out;
}

void metadata(std::ostream& out, const ExperimentConfig& c) {
  out << "# problem = " << to_string(c.problem) << "\n";
  out << "# refinement = " << to_string(c.refinement) << "\n";
  out << "# levels = " << c.levels << "\n";
  out << "# variant = " << variant_list(c) << "\n";
  out << "# ell = " << c.ell << "\n";
  out << "# alpha = " << c.alpha << "\n";
  out << "# beta1_pwc = " << c.beta1_pwc << "\n";
  out << "# beta1_cpl = " << c.beta1_cpl << "\n";
  if (c.ell > 1) out << "# beta2 = " << c.beta2 << "\n";
  out << "# s = " << c.effective_s() << "\n";
  out << "# quadrature = " << (c.quadrature == QuadratureProfile::high ? "high" : "standard") << "\n";
  out << "# seed = " << c.seed << "\n";
  out << "# tol = " << c.tol << "\n";
  if (c.problem == Problem::cube_hypersingular) {
    if (c.refinement == Refinement::corner_local)
      out << "# sweeps_per_level = " << c.sweeps_per_level << "\n";
    else
      out << "# initial_bisections = " << c.effective_initial_bisections()
          << "\n# bisections_per_level = " << c.bisections_per_level << "\n";
  } else {
    out << "# elements = " << c.elements << "\n";
  }
}

}  // namespace

void emit_table(std::ostream& out, const ExperimentConfig& config, const std::vector<TableRow>& rows,
                TableFormat format) {
  const bool with_h = config.refinement == Refinement::corner_local;
  std::vector<std::string> header = {"dofs"};
  if (with_h) header.push_back("h_min");
  header.push_back("kappa_A");
  if (config.jacobi) header.push_back("kappa_jacobi");
  if (config.pwc) header.push_back("kappa_G_pwc");
  if (config.cpl) header.push_back("kappa_G_cpl");

  std::vector<std::vector<std::string>> cells;
  for (const TableRow& r : rows) {
    std::vector<std::string> line = {std::to_string(r.dofs)};
    if (with_h) line.push_back(format_h(r.h_min));
    line.push_back(format_kappa(r.kappa_A));
    if (config.jacobi) line.push_back(r.kappa_jacobi ? format_kappa(*r.kappa_jacobi) : "");
    if (config.pwc) line.push_back(r.kappa_pwc ? format_kappa(*r.kappa_pwc) : "");
    if (config.cpl) line.push_back(r.kappa_cpl ? format_kappa(*r.kappa_cpl) : "");
    cells.push_back(std::move(line));
  }

  metadata(out, config);
  for (const TableRow& r : rows)
    out << "# timing level=" << r.level << " assembly=" << format_seconds(r.assembly_seconds)
        << "s precond=" << format_seconds(r.precond_seconds) << "s lanczos=" << format_seconds(r.lanczos_seconds)
        << "s\n";
  for (const TableRow& r : rows)
    for (const std::string& column : r.unconverged)
      out << "# level " << r.level << ": Lanczos stopped at the iteration cap for " << column << "\n";

  if (format == TableFormat::csv) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << "\n";
    for (const auto& line : cells) {
      for (std::size_t j = 0; j < line.size(); ++j) out << (j ? "," : "") << line[j];
      out << "\n";
    }
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    width[j] = header[j].size();
    for (const auto& line : cells) width[j] = std::max(width[j], line[j].size());
  }
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t j = 0; j < line.size(); ++j) {
      if (j) out << "  ";
      out << std::string(width[j] - line[j].size(), ' ') << line[j];
    }
    out << "\n";
  };
  emit(header);
  for (const auto& line : cells) emit(line);
}

void emit_table(const std::filesystem::path& path, const ExperimentConfig& config, const std::vector<TableRow>& rows,
                TableFormat format) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  emit_table(out, config, rows, format);
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

}  // namespace opcond
