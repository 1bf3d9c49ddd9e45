#pragma once

#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace greensr::lp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class RowSense { le, eq, ge };
enum class ObjSense { minimize, maximize };

enum class SolveStatus {
  optimal,
  infeasible,
  unbounded,
  time_limit,   // best-found solution returned when one exists
  node_limit,   // branch & bound node budget exhausted
  iteration_limit,
  error,  // solver produced values that failed re-substitution
};

const char* to_string(SolveStatus s);

struct Limits {
  double time_limit_sec = 3600.0;
  long max_iterations = 0;  // 0 = scale with model size
  long max_nodes = 20000;   // branch & bound
};

struct SolveStats {
  long iterations = 0;
  long phase1_iterations = 0;
  long refactorizations = 0;
  long nodes = 0;
  double seconds = 0.0;
  double max_residual = 0.0;
  double infeasibility = 0.0;  // leftover phase-1 objective
};

struct Solution {
  SolveStatus status = SolveStatus::error;
  bool feasible = false;          // values[] holds a usable point
  std::vector<double> values;     // per model variable
  double objective = 0.0;
  std::vector<double> duals;      // per row, minimize convention
  SolveStats stats;
};

/// Linear/integer program container. Variables may be added column-wise
/// (coefficients into existing rows), which is how the optimizer grows its
/// models during pricing.
class Model {
 public:
  int add_variable(const std::string& name, double lo, double hi,
                   VarKind kind = VarKind::continuous, double obj = 0.0);
  int add_column(const std::string& name, double lo, double hi, VarKind kind,
                 double obj,
                 const std::vector<std::pair<int, double>>& row_terms);
  int add_constraint(const std::string& name,
                     const std::vector<std::pair<int, double>>& terms,
                     RowSense sense, double rhs);

  void set_objective_sense(ObjSense s) { sense_ = s; }
  ObjSense objective_sense() const { return sense_; }
  void set_objective_coef(int var, double c);
  void set_bounds(int var, double lo, double hi);

  int var_count() const { return static_cast<int>(vars_.size()); }
  int row_count() const { return static_cast<int>(rows_.size()); }

  struct VarInfo {
    std::string name;
    double lo, hi, obj;
    VarKind kind;
    std::vector<std::pair<int, double>> entries;  // (row, coef)
  };
  struct RowInfo {
    std::string name;
    RowSense sense;
    double rhs;
  };
  const VarInfo& variable(int j) const { return vars_.at(j); }
  const RowInfo& row(int i) const { return rows_.at(i); }
  bool has_binaries() const;

  /// Standard LP text format, for cross-checking with external solvers.
  void write_lp(std::ostream& out) const;

 private:
  ObjSense sense_ = ObjSense::minimize;
  std::vector<VarInfo> vars_;
  std::vector<RowInfo> rows_;
};

/// Re-substitutes values into every constraint and bound; empty result
/// means the point is feasible within tol. Independent of the solve path.
std::vector<std::string> verify_solution(const Model& model,
                                         const std::vector<double>& values,
                                         double tol = 1e-6);

/// Solves the model: primal simplex for continuous models, branch & bound
/// over the binaries otherwise. Every returned point is re-verified; a
/// point failing verification is reported as SolveStatus::error.
Solution solve(const Model& model, const Limits& limits = {});

/// Incremental simplex session bound to one model. Each solve() pulls new
/// columns, bounds and objective coefficients from the model; column
/// additions keep the basis warm, bound changes may force a cold restart.
/// Rows may not be added once the session exists.
class SimplexSolver {
 public:
  explicit SimplexSolver(const Model& model);
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  Solution solve(const Limits& limits = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace greensr::lp
