#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opcond/assembly.hpp"
#include "opcond/linear_operator.hpp"
#include "opcond/mesh.hpp"
#include "opcond/spectral.hpp"

namespace opcond {

enum class Problem { cube_hypersingular, interval_hypersingular, interval_laplace_s1 };
enum class Refinement { uniform, corner_local };
enum class QuadratureProfile { standard, high };
enum class TableFormat { csv, text };

struct ExperimentConfig {
  Problem problem = Problem::cube_hypersingular;
  Refinement refinement = Refinement::uniform;
  int levels = 4;
  bool pwc = true;
  bool cpl = true;
  bool jacobi = false;
  int ell = 1;
  double alpha = 0.05;
  double beta1_pwc = 0.65;
  double beta1_cpl = 0.34;
  double beta2 = 0.065;
  /// Unset: 1 for interval_laplace_s1, 1/2 otherwise.
  std::optional<double> s;
  QuadratureProfile quadrature = QuadratureProfile::standard;
  std::uint64_t seed = 42;
  std::string output;
  /// Corner-local refinement: marking sweeps between consecutive levels.
  int sweeps_per_level = 5;
  /// Cube uniform refinement: bisections before level 1 (unset: 1 for ell = 1, 0 otherwise)
  /// and between consecutive levels.
  std::optional<int> initial_bisections;
  int bisections_per_level = 2;
  /// Interval problems: elements of the level-1 mesh; each level halves every element.
  int elements = 2;
  double tol = 1e-6;
  int max_iter = 0;

  double effective_s() const { return s.value_or(problem == Problem::interval_laplace_s1 ? 1.0 : 0.5); }
  int effective_initial_bisections() const { return initial_bisections.value_or(ell == 1 ? 1 : 0); }
  QuadratureSettings quadrature_settings() const;
  LanczosOptions lanczos_options() const;
  /// @throws ParseError(line 0) for out-of-range or unsupported combinations.
  void validate() const;
};

/// Line-oriented `key = value` format; `#` starts a comment.
/// @throws ParseError with the offending line number, Error(io) if the file cannot be read.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

const char* to_string(Problem p) noexcept;
const char* to_string(Refinement r) noexcept;

/// Meshes of every level, in order.
std::vector<SimplicialMesh> build_mesh_sequence(const ExperimentConfig& config);

/// Operators of one level.
struct LevelSystem {
  std::size_t dofs = 0;
  /// min_T |T|^{1/d}.
  double h_min = 0.0;
  LinearOperator A;
  std::optional<LinearOperator> G_pwc;
  std::optional<LinearOperator> G_cpl;
  std::optional<LinearOperator> jacobi;
  double assembly_seconds = 0.0;
  double precond_seconds = 0.0;
};

/// Assembles A and the requested preconditioners on one mesh.
LevelSystem build_level_system(const SimplicialMesh& mesh, const ExperimentConfig& config);

struct TableRow {
  int level = 0;
  std::size_t dofs = 0;
  double h_min = 0.0;
  double kappa_A = 0.0;
  std::optional<double> kappa_jacobi;
  std::optional<double> kappa_pwc;
  std::optional<double> kappa_cpl;
  double assembly_seconds = 0.0;
  double precond_seconds = 0.0;
  double lanczos_seconds = 0.0;
  /// Columns whose Lanczos run stopped at the iteration cap.
  std::vector<std::string> unconverged;
};

/// Lanczos estimates for every operator pair present in sys.
TableRow evaluate_level(const LevelSystem& sys, const ExperimentConfig& config, int level);

/// Runs every level; each finished row is passed to on_row before the next level starts.
/// @throws Error with the failing level in the message; rows already passed to on_row stay valid.
std::vector<TableRow> run_experiment(const ExperimentConfig& config,
                                     const std::function<void(const TableRow&)>& on_row = {});

/// Writes `#` metadata lines, a header and the rows. Timing comment lines start with "# timing".
void emit_table(std::ostream& out, const ExperimentConfig& config, const std::vector<TableRow>& rows,
                TableFormat format);
/// @throws Error(io) if the path cannot be written.
void emit_table(const std::filesystem::path& path, const ExperimentConfig& config, const std::vector<TableRow>& rows,
                TableFormat format);

/// "%.4g" for kappa values, "%.1e" for h_min.
std::string format_kappa(double kappa);
std::string format_h(double h);

}  // namespace opcond
