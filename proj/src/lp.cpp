#include "greensr/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace greensr::lp {

namespace {

constexpr double kRcTol = 1e-9;      // reduced-cost optimality
constexpr double kPivTol = 1e-9;     // smallest acceptable ratio-test pivot
constexpr double kSnapTol = 1e-7;    // basic bound-violation snap
constexpr double kPhase1Tol = 1e-7;  // residual infeasibility accepted as 0
constexpr double kIntTol = 1e-6;
constexpr int kRefactorEvery = 1000;
constexpr int kBlandAfter = 400;  // consecutive degenerate steps

using Clock = std::chrono::steady_clock;

double elapsed_sec(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string sanitize(const std::string& name) {
  std::string out = name.empty() ? std::string("v") : name;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') {
      c = '_';
    }
  }
  if (std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(0, "v");
  return out;
}

void write_number(std::ostream& out, double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  out << ss.str();
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::time_limit: return "time-limit";
    case SolveStatus::node_limit: return "node-limit";
    case SolveStatus::iteration_limit: return "iteration-limit";
    case SolveStatus::error: return "error";
  }
  return "unknown";
}

int Model::add_variable(const std::string& name, double lo, double hi,
                        VarKind kind, double obj) {
  return add_column(name, lo, hi, kind, obj, {});
}

int Model::add_column(const std::string& name, double lo, double hi,
                      VarKind kind, double obj,
                      const std::vector<std::pair<int, double>>& row_terms) {
  if (lo > hi) throw std::invalid_argument("variable bounds cross: " + name);
  for (const auto& [row, coef] : row_terms) {
    if (row < 0 || row >= row_count()) {
      throw std::invalid_argument("column term references unknown row");
    }
    (void)coef;
  }
  vars_.push_back({name, lo, hi, obj, kind, row_terms});
  return var_count() - 1;
}

int Model::add_constraint(const std::string& name,
                          const std::vector<std::pair<int, double>>& terms,
                          RowSense sense, double rhs) {
  const int row = row_count();
  for (const auto& [var, coef] : terms) {
    if (var < 0 || var >= var_count()) {
      throw std::invalid_argument("constraint references unknown variable");
    }
    vars_[var].entries.push_back({row, coef});
  }
  rows_.push_back({name, sense, rhs});
  return row;
}

void Model::set_objective_coef(int var, double c) { vars_.at(var).obj = c; }

void Model::set_bounds(int var, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("variable bounds cross");
  vars_.at(var).lo = lo;
  vars_.at(var).hi = hi;
}

bool Model::has_binaries() const {
  return std::any_of(vars_.begin(), vars_.end(), [](const VarInfo& v) {
    return v.kind == VarKind::binary;
  });
}

void Model::write_lp(std::ostream& out) const {
  out << (sense_ == ObjSense::minimize ? "Minimize\n" : "Maximize\n");
  out << " obj:";
  bool any = false;
  for (const VarInfo& v : vars_) {
    if (v.obj == 0.0) continue;
    out << (v.obj < 0 ? " - " : " + ");
    write_number(out, std::abs(v.obj));
    out << ' ' << sanitize(v.name);
    any = true;
  }
  if (!any) out << " 0 " << sanitize(vars_.empty() ? "x" : vars_[0].name);
  out << "\nSubject To\n";
  // Gather rows from the column-wise storage.
  std::vector<std::vector<std::pair<int, double>>> rows(rows_.size());
  for (int j = 0; j < var_count(); ++j) {
    for (const auto& [row, coef] : vars_[j].entries) {
      rows[row].push_back({j, coef});
    }
  }
  for (int i = 0; i < row_count(); ++i) {
    out << ' ' << sanitize(rows_[i].name) << ':';
    if (rows[i].empty()) out << " 0 " << sanitize(vars_.at(0).name);
    for (const auto& [var, coef] : rows[i]) {
      out << (coef < 0 ? " - " : " + ");
      write_number(out, std::abs(coef));
      out << ' ' << sanitize(vars_[var].name);
    }
    switch (rows_[i].sense) {
      case RowSense::le: out << " <= "; break;
      case RowSense::eq: out << " = "; break;
      case RowSense::ge: out << " >= "; break;
    }
    write_number(out, rows_[i].rhs);
    out << '\n';
  }
  out << "Bounds\n";
  for (const VarInfo& v : vars_) {
    out << ' ';
    if (v.lo == v.hi) {
      out << sanitize(v.name) << " = ";
      write_number(out, v.lo);
    } else {
      if (v.lo == -kInfinity) {
        out << "-inf <= ";
      } else {
        write_number(out, v.lo);
        out << " <= ";
      }
      out << sanitize(v.name);
      if (v.hi != kInfinity) {
        out << " <= ";
        write_number(out, v.hi);
      }
    }
    out << '\n';
  }
  if (has_binaries()) {
    out << "Binaries\n";
    for (const VarInfo& v : vars_) {
      if (v.kind == VarKind::binary) out << ' ' << sanitize(v.name);
    }
    out << '\n';
  }
  out << "End\n";
}

std::vector<std::string> verify_solution(const Model& model,
                                         const std::vector<double>& values,
                                         double tol) {
  std::vector<std::string> out;
  if (values.size() != static_cast<size_t>(model.var_count())) {
    out.push_back("value vector does not match variable count");
    return out;
  }
  for (int j = 0; j < model.var_count(); ++j) {
    const auto& v = model.variable(j);
    if (values[j] < v.lo - tol || values[j] > v.hi + tol) {
      out.push_back("variable " + v.name + " = " + std::to_string(values[j]) +
                    " outside [" + std::to_string(v.lo) + ", " +
                    std::to_string(v.hi) + "]");
    }
    if (v.kind == VarKind::binary &&
        std::abs(values[j] - std::round(values[j])) > kIntTol) {
      out.push_back("binary " + v.name + " fractional: " +
                    std::to_string(values[j]));
    }
  }
  std::vector<double> activity(model.row_count(), 0.0);
  for (int j = 0; j < model.var_count(); ++j) {
    for (const auto& [row, coef] : model.variable(j).entries) {
      activity[row] += coef * values[j];
    }
  }
  for (int i = 0; i < model.row_count(); ++i) {
    const auto& r = model.row(i);
    const double slack = activity[i] - r.rhs;
    const double rtol = tol * std::max(1.0, std::abs(r.rhs));
    const bool bad = (r.sense == RowSense::le && slack > rtol) ||
                     (r.sense == RowSense::ge && slack < -rtol) ||
                     (r.sense == RowSense::eq && std::abs(slack) > rtol);
    if (bad) {
      out.push_back("row " + r.name + " violated by " + std::to_string(slack));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bounded-variable primal simplex with a dense basis inverse, product-form
// updates and periodic refactorization. Rows become equalities via one slack
// column each; per-row artificial columns carry phase-1 infeasibility.

struct SimplexSolver::Impl {
  enum : std::uint8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2 };
  enum class PhaseEnd { optimal, unbounded, iteration_limit, time_limit, error };

  struct Col {
    double lo = 0.0, hi = 0.0, cost = 0.0;
    std::vector<std::pair<int, double>> a;
    int model_var = -1;  // -1: slack or artificial
  };

  const Model* model = nullptr;
  int m = 0;
  bool flip_obj = false;
  std::vector<double> rhs;
  std::vector<Col> cols;
  int slack0 = 0, art0 = 0;
  int synced_vars = 0;

  std::vector<std::uint8_t> state;
  std::vector<double> xval;
  std::vector<int> basis;
  std::vector<double> binv;  // m*m, row-major
  bool has_basis = false;

  std::vector<double> phase_cost;
  std::vector<double> y, d, workvec;
  int pivots_since_refactor = 0;
  int degenerate_streak = 0;
  bool bland = false;
  int price_cursor = 0;

  SolveStats stats;
  Clock::time_point t0;
  double deadline = 0.0;
  long iteration_cap = 0;

  explicit Impl(const Model& mod) : model(&mod) {
    m = mod.row_count();
    if (m > 8000) {
      throw std::invalid_argument(
          "model too large for the in-repo simplex (rows > 8000)");
    }
    flip_obj = mod.objective_sense() == ObjSense::maximize;
    rhs.resize(m);
    // Model variables first, then one slack and one artificial per row.
    for (int j = 0; j < mod.var_count(); ++j) append_model_var(j);
    synced_vars = mod.var_count();
    slack0 = static_cast<int>(cols.size());
    for (int i = 0; i < m; ++i) {
      const auto& row = mod.row(i);
      rhs[i] = row.rhs;
      Col s;
      s.a = {{i, 1.0}};
      switch (row.sense) {
        case RowSense::le: s.lo = 0.0; s.hi = kInfinity; break;
        case RowSense::ge: s.lo = -kInfinity; s.hi = 0.0; break;
        case RowSense::eq: s.lo = 0.0; s.hi = 0.0; break;
      }
      cols.push_back(std::move(s));
    }
    art0 = static_cast<int>(cols.size());
    for (int i = 0; i < m; ++i) {
      Col a;
      a.a = {{i, 1.0}};
      a.lo = a.hi = 0.0;
      cols.push_back(std::move(a));
    }
    state.assign(cols.size(), kAtLower);
    xval.assign(cols.size(), 0.0);
  }

  void append_model_var(int j) {
    const auto& v = model->variable(j);
    Col c;
    c.lo = v.lo;
    c.hi = v.hi;
    c.cost = flip_obj ? -v.obj : v.obj;
    c.a = v.entries;
    c.model_var = j;
    if (c.lo == -kInfinity && c.hi == kInfinity) {
      throw std::invalid_argument("free variables are not supported: " +
                                  v.name);
    }
    cols.push_back(std::move(c));
  }

  // Pulls new columns, bounds and objective coefficients from the model.
  void sync() {
    if (model->row_count() != m) {
      throw std::logic_error("rows may not be added once a solver exists");
    }
    for (int j = synced_vars; j < model->var_count(); ++j) {
      append_model_var(j);
      Col& c = cols.back();
      state.push_back(c.lo > -kInfinity ? kAtLower : kAtUpper);
      xval.push_back(c.lo > -kInfinity ? c.lo : c.hi);
    }
    synced_vars = model->var_count();
    for (size_t k = 0; k < cols.size(); ++k) {
      Col& c = cols[k];
      if (c.model_var < 0) continue;
      const auto& v = model->variable(c.model_var);
      c.cost = flip_obj ? -v.obj : v.obj;
      if (c.lo != v.lo || c.hi != v.hi) {
        c.lo = v.lo;
        c.hi = v.hi;
        if (state[k] != kBasic) {
          if (state[k] == kAtLower && c.lo == -kInfinity) state[k] = kAtUpper;
          if (state[k] == kAtUpper && c.hi == kInfinity) state[k] = kAtLower;
          xval[k] = state[k] == kAtLower ? c.lo : c.hi;
        }
      }
    }
  }

  double col_bound_value(size_t k) const {
    return state[k] == kAtLower ? cols[k].lo : cols[k].hi;
  }

  // x_B = B^-1 (rhs - sum over nonbasic columns), using current binv.
  void recompute_basics() {
    workvec.assign(m, 0.0);
    for (size_t k = 0; k < cols.size(); ++k) {
      if (state[k] == kBasic) continue;
      xval[k] = col_bound_value(k);
      if (xval[k] == 0.0) continue;
      for (const auto& [row, coef] : cols[k].a) {
        workvec[row] += coef * xval[k];
      }
    }
    for (int i = 0; i < m; ++i) workvec[i] = rhs[i] - workvec[i];
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      const double* row = binv.data() + static_cast<size_t>(i) * m;
      for (int k = 0; k < m; ++k) v += row[k] * workvec[k];
      xval[basis[i]] = v;
    }
  }

  bool refactor() {
    ++stats.refactorizations;
    pivots_since_refactor = 0;
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    std::vector<double> mat(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
      for (const auto& [row, coef] : cols[basis[i]].a) {
        mat[static_cast<size_t>(row) * m + i] = coef;
      }
    }
    binv.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) binv[static_cast<size_t>(i) * m + i] = 1.0;
    for (int col = 0; col < m; ++col) {
      int piv = col;
      double best = std::abs(mat[static_cast<size_t>(col) * m + col]);
      for (int r = col + 1; r < m; ++r) {
        const double v = std::abs(mat[static_cast<size_t>(r) * m + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < 1e-11) return false;  // singular basis
      if (piv != col) {
        for (int k = 0; k < m; ++k) {
          std::swap(mat[static_cast<size_t>(piv) * m + k],
                    mat[static_cast<size_t>(col) * m + k]);
          std::swap(binv[static_cast<size_t>(piv) * m + k],
                    binv[static_cast<size_t>(col) * m + k]);
        }
      }
      const double inv = 1.0 / mat[static_cast<size_t>(col) * m + col];
      for (int k = 0; k < m; ++k) {
        mat[static_cast<size_t>(col) * m + k] *= inv;
        binv[static_cast<size_t>(col) * m + k] *= inv;
      }
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = mat[static_cast<size_t>(r) * m + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          mat[static_cast<size_t>(r) * m + k] -=
              f * mat[static_cast<size_t>(col) * m + k];
          binv[static_cast<size_t>(r) * m + k] -=
              f * binv[static_cast<size_t>(col) * m + k];
        }
      }
    }
    recompute_basics();
    return true;
  }

  void cold_start() {
    basis.resize(m);
    for (size_t k = 0; k < cols.size(); ++k) {
      if (is_artificial(static_cast<int>(k))) {
        cols[k].lo = cols[k].hi = 0.0;  // artificials reset
      }
      state[k] = cols[k].lo > -kInfinity ? kAtLower : kAtUpper;
      xval[k] = col_bound_value(k);
    }
    // Row activity of the nonbasic point decides between a feasible slack
    // basis and an artificial carrying the residual.
    std::vector<double> act(m, 0.0);
    for (size_t k = 0; k < cols.size(); ++k) {
      if (xval[k] == 0.0) continue;
      for (const auto& [row, coef] : cols[k].a) act[row] += coef * xval[k];
    }
    for (int i = 0; i < m; ++i) {
      const int s = slack0 + i;
      const int a = art0 + i;
      const double v = rhs[i] - (act[i] - xval[s]);  // slack value if basic
      if (v >= cols[s].lo && v <= cols[s].hi) {
        basis[i] = s;
        state[s] = kBasic;
        xval[s] = v;
      } else {
        const double clamped = std::clamp(v, cols[s].lo, cols[s].hi);
        state[s] = clamped == cols[s].lo ? kAtLower : kAtUpper;
        xval[s] = clamped;
        const double r = v - clamped;
        if (r > 0) {
          cols[a].lo = 0.0;
          cols[a].hi = kInfinity;
        } else {
          cols[a].lo = -kInfinity;
          cols[a].hi = 0.0;
        }
        basis[i] = a;
        state[a] = kBasic;
        xval[a] = r;
      }
    }
    binv.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) binv[static_cast<size_t>(i) * m + i] = 1.0;
    has_basis = true;
    pivots_since_refactor = 0;
    degenerate_streak = 0;
    bland = false;
    price_cursor = 0;
  }

  bool is_artificial(int k) const { return k >= art0 && k < art0 + m; }

  bool needs_phase1() const {
    for (int i = 0; i < m; ++i) {
      if (is_artificial(basis[i]) && std::abs(xval[basis[i]]) > kPhase1Tol) {
        return true;
      }
    }
    return false;
  }

  void load_phase_cost(bool phase1) {
    phase_cost.assign(cols.size(), 0.0);
    if (phase1) {
      for (int i = 0; i < m; ++i) {
        const int a = art0 + i;
        if (cols[a].hi == kInfinity) phase_cost[a] = 1.0;
        else if (cols[a].lo == -kInfinity) phase_cost[a] = -1.0;
      }
    } else {
      for (size_t k = 0; k < cols.size(); ++k) phase_cost[k] = cols[k].cost;
    }
  }

  void compute_duals() {
    y.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      const double cb = phase_cost[basis[i]];
      if (cb == 0.0) continue;
      const double* row = binv.data() + static_cast<size_t>(i) * m;
      for (int k = 0; k < m; ++k) y[k] += cb * row[k];
    }
  }

  double reduced_cost(size_t k) const {
    double rc = phase_cost[k];
    for (const auto& [row, coef] : cols[k].a) rc -= y[row] * coef;
    return rc;
  }

  // Entering candidate under Dantzig (or Bland) pricing; -1 when optimal.
  int price() {
    const size_t n = cols.size();
    if (bland) {
      for (size_t k = 0; k < n; ++k) {
        if (state[k] == kBasic || cols[k].lo == cols[k].hi) continue;
        const double rc = reduced_cost(k);
        if ((state[k] == kAtLower && rc < -kRcTol) ||
            (state[k] == kAtUpper && rc > kRcTol)) {
          return static_cast<int>(k);
        }
      }
      return -1;
    }
    const bool partial = n > 25000;
    const size_t block = partial ? 8192 : n;
    size_t examined = 0;
    size_t cursor = partial ? static_cast<size_t>(price_cursor) % n : 0;
    while (examined < n) {
      int best = -1;
      double best_viol = kRcTol;
      const size_t stop = std::min(block, n - examined);
      for (size_t step = 0; step < stop; ++step) {
        const size_t k = (cursor + step) % n;
        if (state[k] == kBasic || cols[k].lo == cols[k].hi) continue;
        const double rc = reduced_cost(k);
        const double viol = state[k] == kAtLower ? -rc : rc;
        if (viol > best_viol) {
          best_viol = viol;
          best = static_cast<int>(k);
        }
      }
      examined += stop;
      cursor = (cursor + stop) % n;
      if (best >= 0) {
        price_cursor = static_cast<int>(cursor);
        return best;
      }
    }
    return -1;
  }

  void ftran(const Col& c) {
    d.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      const double* row = binv.data() + static_cast<size_t>(i) * m;
      double v = 0.0;
      for (const auto& [r, coef] : c.a) v += row[r] * coef;
      d[i] = v;
    }
  }

  PhaseEnd run_phase(bool phase1, const Limits& limits) {
    load_phase_cost(phase1);
    while (true) {
      if (stats.iterations >= iteration_cap) return PhaseEnd::iteration_limit;
      if ((stats.iterations & 63) == 0 && elapsed_sec(t0) > deadline) {
        return PhaseEnd::time_limit;
      }
      ++stats.iterations;
      if (phase1) ++stats.phase1_iterations;
      if (pivots_since_refactor >= kRefactorEvery) {
        if (!refactor()) return PhaseEnd::error;
      }
      compute_duals();
      const int e = price();
      if (e < 0) return PhaseEnd::optimal;
      const Col& ce = cols[e];
      const int dir = state[e] == kAtLower ? +1 : -1;
      ftran(ce);

      // Ratio test: first blocking basic bound, the entering variable's own
      // span, or unbounded.
      double t_best = kInfinity;
      int leave = -1;          // row index
      bool leave_to_upper = false;
      const double span = ce.hi - ce.lo;  // may be infinite
      if (span < t_best) t_best = span;
      for (int i = 0; i < m; ++i) {
        const double delta = -dir * d[i];  // rate of x_basis[i] per unit t
        const Col& cb = cols[basis[i]];
        double ti;
        bool to_upper;
        if (delta > kPivTol) {
          if (cb.hi == kInfinity) continue;
          ti = (cb.hi - xval[basis[i]]) / delta;
          to_upper = true;
        } else if (delta < -kPivTol) {
          if (cb.lo == -kInfinity) continue;
          ti = (xval[basis[i]] - cb.lo) / (-delta);
          to_upper = false;
        } else {
          continue;
        }
        if (ti < 0.0) ti = 0.0;  // drift guard
        const bool better =
            ti < t_best - 1e-12 ||
            (ti < t_best + 1e-12 && leave >= 0 &&
             (bland ? basis[i] < basis[leave]
                    : std::abs(d[i]) > std::abs(d[leave])));
        if (better || (leave < 0 && ti <= t_best + 1e-12 && ti < span)) {
          t_best = std::min(t_best, ti);
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (t_best == kInfinity) {
        return phase1 ? PhaseEnd::error : PhaseEnd::unbounded;
      }

      if (t_best <= 1e-10) {
        ++degenerate_streak;
        if (degenerate_streak > kBlandAfter) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }

      if (leave < 0 || (span < kInfinity && span <= t_best)) {
        // Bound flip, no basis change.
        const double t = span;
        for (int i = 0; i < m; ++i) {
          if (d[i] != 0.0) xval[basis[i]] += -dir * d[i] * t;
        }
        state[e] = state[e] == kAtLower ? kAtUpper : kAtLower;
        xval[e] = col_bound_value(e);
        continue;
      }

      const double t = t_best;
      for (int i = 0; i < m; ++i) {
        if (d[i] != 0.0) xval[basis[i]] += -dir * d[i] * t;
      }
      const int lv = basis[leave];
      state[lv] = leave_to_upper ? kAtUpper : kAtLower;
      xval[lv] = leave_to_upper ? cols[lv].hi : cols[lv].lo;
      xval[e] = (dir > 0 ? ce.lo : ce.hi) + dir * t;
      basis[leave] = e;
      state[e] = kBasic;

      // Product-form update of the dense inverse.
      const double alpha = d[leave];
      double* prow = binv.data() + static_cast<size_t>(leave) * m;
      const double inv = 1.0 / alpha;
      for (int k = 0; k < m; ++k) prow[k] *= inv;
      for (int i = 0; i < m; ++i) {
        if (i == leave || d[i] == 0.0) continue;
        double* row = binv.data() + static_cast<size_t>(i) * m;
        const double f = d[i];
        for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
      }
      ++pivots_since_refactor;
    }
  }

  double phase1_residual() const {
    double r = 0.0;
    for (int i = 0; i < m; ++i) {
      if (is_artificial(basis[i])) r += std::abs(xval[basis[i]]);
    }
    for (int k = art0; k < art0 + m; ++k) {
      if (state[k] != kBasic) r += std::abs(xval[k]);
    }
    return r;
  }

  void fix_artificials() {
    for (int i = 0; i < m; ++i) {
      const int a = art0 + i;
      cols[a].lo = cols[a].hi = 0.0;
      if (state[a] != kBasic) {
        state[a] = kAtLower;
        xval[a] = 0.0;
      } else if (std::abs(xval[a]) <= kPhase1Tol) {
        xval[a] = 0.0;
      }
    }
  }

  Solution extract(SolveStatus status, bool feasible) {
    Solution sol;
    sol.status = status;
    sol.feasible = feasible;
    sol.stats = stats;
    sol.stats.seconds = elapsed_sec(t0);
    if (!feasible) return sol;
    sol.values.assign(model->var_count(), 0.0);
    for (size_t k = 0; k < cols.size(); ++k) {
      if (cols[k].model_var >= 0) sol.values[cols[k].model_var] = xval[k];
    }
    double obj = 0.0;
    for (int j = 0; j < model->var_count(); ++j) {
      obj += model->variable(j).obj * sol.values[j];
    }
    sol.objective = obj;
    load_phase_cost(false);
    compute_duals();
    sol.duals = y;

    // Internal re-substitution: rows are equalities over all columns.
    std::vector<double> act(m, 0.0);
    double max_resid = 0.0;
    for (size_t k = 0; k < cols.size(); ++k) {
      if (xval[k] == 0.0) continue;
      for (const auto& [row, coef] : cols[k].a) act[row] += coef * xval[k];
    }
    for (int i = 0; i < m; ++i) {
      max_resid = std::max(
          max_resid, std::abs(act[i] - rhs[i]) / std::max(1.0, std::abs(rhs[i])));
    }
    for (size_t k = 0; k < cols.size(); ++k) {
      const double lo = cols[k].lo, hi = cols[k].hi;
      if (xval[k] < lo - kSnapTol || xval[k] > hi + kSnapTol) {
        max_resid = std::max(max_resid, 1.0);
      }
    }
    sol.stats.max_residual = max_resid;
    if (max_resid > 1e-6) {
      sol.status = SolveStatus::error;
      sol.feasible = false;
    }
    return sol;
  }

  Solution solve(const Limits& limits) {
    t0 = Clock::now();
    stats = SolveStats{};
    deadline = limits.time_limit_sec > 0 ? limits.time_limit_sec : 3600.0;
    sync();
    iteration_cap = limits.max_iterations > 0
                        ? limits.max_iterations
                        : 50000 + 200L * m + 5L * static_cast<long>(cols.size());

    bool warm_ok = false;
    if (has_basis) {
      recompute_basics();
      warm_ok = true;
      for (int i = 0; i < m && warm_ok; ++i) {
        const Col& c = cols[basis[i]];
        const double v = xval[basis[i]];
        if (v < c.lo - kSnapTol || v > c.hi + kSnapTol) warm_ok = false;
      }
      if (warm_ok) {
        for (int i = 0; i < m; ++i) {
          const Col& c = cols[basis[i]];
          xval[basis[i]] = std::clamp(xval[basis[i]], c.lo, c.hi);
        }
      }
    }
    if (!warm_ok) cold_start();

    if (needs_phase1()) {
      const PhaseEnd end = run_phase(true, limits);
      switch (end) {
        case PhaseEnd::optimal: break;
        case PhaseEnd::time_limit: return extract(SolveStatus::time_limit, false);
        case PhaseEnd::iteration_limit:
          return extract(SolveStatus::iteration_limit, false);
        default: return extract(SolveStatus::error, false);
      }
      if (phase1_residual() > kPhase1Tol) {
        stats.infeasibility = phase1_residual();
        return extract(SolveStatus::infeasible, false);
      }
    }
    fix_artificials();

    const PhaseEnd end = run_phase(false, limits);
    switch (end) {
      case PhaseEnd::optimal: return extract(SolveStatus::optimal, true);
      case PhaseEnd::unbounded: return extract(SolveStatus::unbounded, false);
      case PhaseEnd::time_limit: return extract(SolveStatus::time_limit, false);
      case PhaseEnd::iteration_limit:
        return extract(SolveStatus::iteration_limit, false);
      default: return extract(SolveStatus::error, false);
    }
  }
};

SimplexSolver::SimplexSolver(const Model& model)
    : impl_(std::make_unique<Impl>(model)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

Solution SimplexSolver::solve(const Limits& limits) {
  return impl_->solve(limits);
}

// ---------------------------------------------------------------------------
// Depth-first branch & bound over the binaries; dives toward 1 first, prunes
// on the incumbent objective.

namespace {

Solution branch_and_bound(const Model& model, const Limits& limits) {
  const auto t0 = Clock::now();
  const bool maximize = model.objective_sense() == ObjSense::maximize;
  std::vector<int> binaries;
  for (int j = 0; j < model.var_count(); ++j) {
    if (model.variable(j).kind == VarKind::binary) binaries.push_back(j);
  }

  Model relaxed = model;
  std::vector<std::pair<double, double>> root_bounds;
  for (int b : binaries) {
    const auto& v = model.variable(b);
    const double lo = std::max(0.0, v.lo);
    const double hi = std::min(1.0, v.hi);
    relaxed.set_bounds(b, lo, hi);
    root_bounds.push_back({lo, hi});
  }

  struct Node {
    std::vector<std::pair<int, double>> fixings;  // (binary var, value)
  };
  std::vector<Node> stack;
  stack.push_back({});

  Solution best;
  best.status = SolveStatus::infeasible;
  bool have_incumbent = false;
  bool complete = true;
  bool saw_unbounded = false;
  long nodes = 0;
  SimplexSolver solver(relaxed);

  while (!stack.empty()) {
    if (nodes >= limits.max_nodes || elapsed_sec(t0) > limits.time_limit_sec) {
      complete = false;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++nodes;

    for (size_t k = 0; k < binaries.size(); ++k) {
      relaxed.set_bounds(binaries[k], root_bounds[k].first,
                         root_bounds[k].second);
    }
    for (const auto& [var, val] : node.fixings) {
      relaxed.set_bounds(var, val, val);
    }

    Limits node_limits = limits;
    node_limits.time_limit_sec =
        std::max(1e-3, limits.time_limit_sec - elapsed_sec(t0));
    Solution sol = solver.solve(node_limits);
    if (sol.status == SolveStatus::infeasible) continue;
    if (sol.status == SolveStatus::unbounded) {
      saw_unbounded = true;
      continue;
    }
    if (sol.status != SolveStatus::optimal) {
      complete = false;  // bound unknown; cannot explore this subtree safely
      continue;
    }
    const double internal_obj = maximize ? -sol.objective : sol.objective;
    const double incumbent_obj =
        maximize ? -best.objective : best.objective;
    if (have_incumbent && internal_obj >= incumbent_obj - 1e-9) continue;

    int branch_var = -1;
    double branch_frac = kIntTol;
    for (int b : binaries) {
      const double v = sol.values[b];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > branch_frac) {
        branch_frac = frac;
        branch_var = b;
      }
    }
    if (branch_var < 0) {
      best = sol;
      best.stats.nodes = nodes;
      have_incumbent = true;
      continue;
    }
    Node zero = node;
    zero.fixings.push_back({branch_var, 0.0});
    Node one = std::move(node);
    one.fixings.push_back({branch_var, 1.0});
    stack.push_back(std::move(zero));
    stack.push_back(std::move(one));  // popped first: dive toward 1
  }

  best.stats.nodes = nodes;
  best.stats.seconds = elapsed_sec(t0);
  if (have_incumbent) {
    best.status = complete ? SolveStatus::optimal
                  : (nodes >= limits.max_nodes ? SolveStatus::node_limit
                                               : SolveStatus::time_limit);
    best.feasible = true;
  } else if (!complete) {
    best.status = nodes >= limits.max_nodes ? SolveStatus::node_limit
                                            : SolveStatus::time_limit;
    best.feasible = false;
  } else if (saw_unbounded) {
    best.status = SolveStatus::unbounded;
  } else {
    best.status = SolveStatus::infeasible;
  }
  return best;
}

}  // namespace

Solution solve(const Model& model, const Limits& limits) {
  Solution sol;
  if (model.has_binaries()) {
    sol = branch_and_bound(model, limits);
  } else {
    SimplexSolver solver(model);
    sol = solver.solve(limits);
  }
  if (sol.feasible) {
    const auto violations = verify_solution(model, sol.values, 1e-6);
    double dot = 0.0;
    for (int j = 0; j < model.var_count(); ++j) {
      dot += model.variable(j).obj * sol.values[j];
    }
    const bool obj_ok =
        std::abs(dot - sol.objective) <= 1e-6 * std::max(1.0, std::abs(dot));
    if (!violations.empty() || !obj_ok) {
      sol.status = SolveStatus::error;
      sol.feasible = false;
    }
  }
  return sol;
}

}  // namespace greensr::lp
