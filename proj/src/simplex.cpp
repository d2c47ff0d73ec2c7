#include "modt/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "modt/common.hpp"

namespace modt {

namespace {

// Columns are the model's structural variables followed by one logical column
// per row (coefficient +1), turning every row into an equality:
//   LE row r: logical in [0, inf)    GE row r: logical in (-inf, 0]
//   EQ row r: logical fixed at 0
struct Tableau {
  int n = 0;  // structural columns
  int m = 0;  // rows
  std::vector<std::vector<std::pair<int, double>>> cols;  // per column: (row, coef)
  std::vector<double> lob, hib, cost;
  std::vector<double> b;

  explicit Tableau(const SolverModel& mm) {
    n = mm.num_cols();
    m = mm.num_rows();
    cols.resize(n + m);
    lob.resize(n + m);
    hib.resize(n + m);
    cost.assign(n + m, 0.0);
    b.resize(m);
    for (int j = 0; j < n; ++j) {
      lob[j] = mm.lo[j];
      hib[j] = mm.hi[j];
      cost[j] = mm.obj[j];
    }
    for (int r = 0; r < m; ++r) {
      const auto& row = mm.rows[r];
      b[r] = row.rhs;
      for (const auto& [col, coef] : row.terms) cols[col].emplace_back(r, coef);
      int s = n + r;
      cols[s].emplace_back(r, 1.0);
      switch (row.sense) {
        case RowSense::LE: lob[s] = 0.0; hib[s] = kInf; break;
        case RowSense::GE: lob[s] = -kInf; hib[s] = 0.0; break;
        case RowSense::EQ: lob[s] = 0.0; hib[s] = 0.0; break;
      }
    }
  }
};

enum class NbStatus : unsigned char { AtLower, AtUpper, Free, Basic };

class Simplex {
 public:
  Simplex(const Tableau& t, const SimplexOptions& opt) : t_(t), opt_(opt) {
    N_ = t.n + t.m;
    status_.assign(N_, NbStatus::AtLower);
    x_.assign(N_, 0.0);
    basis_.resize(t.m);
    for (int j = 0; j < t_.n; ++j) {
      if (std::isfinite(t_.lob[j])) {
        status_[j] = NbStatus::AtLower;
        x_[j] = t_.lob[j];
      } else if (std::isfinite(t_.hib[j])) {
        status_[j] = NbStatus::AtUpper;
        x_[j] = t_.hib[j];
      } else {
        status_[j] = NbStatus::Free;
        x_[j] = 0.0;
      }
    }
    for (int r = 0; r < t_.m; ++r) {
      int s = t_.n + r;
      basis_[r] = s;
      status_[s] = NbStatus::Basic;
    }
    binv_ = Eigen::MatrixXd::Identity(t_.m, t_.m);
    compute_basics();
  }

  SolveStatus run(long* iterations) {
    SolveStatus st = phase1();
    if (st != SolveStatus::Optimal) {
      *iterations = iter_;
      return st;
    }
    st = phase2();
    *iterations = iter_;
    return st;
  }

  double value(int j) const { return x_[j]; }

  // y = cB' * Binv, using the phase-2 (true) costs.
  std::vector<double> row_duals() const {
    Eigen::VectorXd cb(t_.m);
    for (int i = 0; i < t_.m; ++i) cb[i] = t_.cost[basis_[i]];
    Eigen::VectorXd y = binv_.transpose() * cb;
    return {y.data(), y.data() + t_.m};
  }

 private:
  const Tableau& t_;
  SimplexOptions opt_;
  int N_ = 0;
  std::vector<NbStatus> status_;
  std::vector<double> x_;
  std::vector<int> basis_;
  Eigen::MatrixXd binv_;
  long iter_ = 0;
  int degen_run_ = 0;
  bool bland_ = false;
  int pivots_since_refactor_ = 0;

  static double bound_tol(double bound) { return 1.0 + std::fabs(bound); }

  double below(int j) const {
    return std::isfinite(t_.lob[j]) ? t_.lob[j] - x_[j] : -kInf;
  }
  double above(int j) const {
    return std::isfinite(t_.hib[j]) ? x_[j] - t_.hib[j] : -kInf;
  }
  bool is_feasible(int j) const {
    return below(j) <= opt_.feas_tol * bound_tol(t_.lob[j]) &&
           above(j) <= opt_.feas_tol * bound_tol(t_.hib[j]);
  }

  void compute_basics() {
    Eigen::VectorXd rhs(t_.m);
    for (int r = 0; r < t_.m; ++r) rhs[r] = t_.b[r];
    for (int j = 0; j < N_; ++j) {
      if (status_[j] == NbStatus::Basic || x_[j] == 0.0) continue;
      for (const auto& [r, a] : t_.cols[j]) rhs[r] -= a * x_[j];
    }
    Eigen::VectorXd xb = binv_ * rhs;
    for (int i = 0; i < t_.m; ++i) x_[basis_[i]] = xb[i];
  }

  void refactor() {
    Eigen::MatrixXd B(t_.m, t_.m);
    B.setZero();
    for (int i = 0; i < t_.m; ++i)
      for (const auto& [r, a] : t_.cols[basis_[i]]) B(r, i) = a;
    binv_ = Eigen::PartialPivLU<Eigen::MatrixXd>(B).inverse();
    pivots_since_refactor_ = 0;
    compute_basics();
  }

  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(t_.m);
    for (const auto& [r, a] : t_.cols[j]) w += a * binv_.col(r);
    return w;
  }

  double sparse_dot(const Eigen::VectorXd& y, int j) const {
    double s = 0.0;
    for (const auto& [r, a] : t_.cols[j]) s += a * y[r];
    return s;
  }

  // Entering-variable selection shared by both phases.  `red` maps a column
  // to its reduced cost under the phase objective.  Returns (column, dir) or
  // (-1, 0) at optimality of that phase.
  template <class RedCost>
  std::pair<int, int> price(RedCost red) {
    int best = -1, best_dir = 0;
    double best_score = opt_.dual_tol;
    for (int j = 0; j < N_; ++j) {
      if (status_[j] == NbStatus::Basic) continue;
      if (t_.lob[j] == t_.hib[j]) continue;  // fixed column never enters
      double z = red(j);
      int dir = 0;
      if (status_[j] == NbStatus::AtLower && z < -opt_.dual_tol) dir = 1;
      else if (status_[j] == NbStatus::AtUpper && z > opt_.dual_tol) dir = -1;
      else if (status_[j] == NbStatus::Free) {
        if (z < -opt_.dual_tol) dir = 1;
        else if (z > opt_.dual_tol) dir = -1;
      }
      if (dir == 0) continue;
      if (bland_) return {j, dir};  // smallest index with any violation
      double score = std::fabs(z);
      if (score > best_score + 1e-15) {
        best = j;
        best_dir = dir;
        best_score = score;
      }
    }
    return {best, best_dir};
  }

  struct Ratio {
    double t = kInf;
    int leave_pos = -1;     // basis position, or -1 for a bound flip
    double leave_to = 0.0;  // bound the leaving variable settles at
    bool flip = false;
  };

  // Moving x[q] by t*dir changes basic i at rate -dir*w[i].  In phase 1 an
  // out-of-bounds basic blocks when it reaches the bound it violates; a basic
  // inside its bounds blocks at whichever bound the move approaches.
  Ratio ratio_test(int q, int dir, const Eigen::VectorXd& w) {
    Ratio res;
    if (std::isfinite(t_.lob[q]) && std::isfinite(t_.hib[q])) {
      res.t = t_.hib[q] - t_.lob[q];
      res.flip = true;
    }
    double best_pivot = 0.0;
    for (int i = 0; i < t_.m; ++i) {
      double wi = w[i];
      if (std::fabs(wi) < opt_.pivot_tol) continue;
      int j = basis_[i];
      double rate = -dir * wi;
      double target;
      double ftol = opt_.feas_tol;
      if (x_[j] > t_.hib[j] + ftol * bound_tol(t_.hib[j])) {
        if (rate >= 0) continue;          // moving further out never blocks
        target = t_.hib[j];
      } else if (x_[j] < t_.lob[j] - ftol * bound_tol(t_.lob[j])) {
        if (rate <= 0) continue;
        target = t_.lob[j];
      } else {
        target = rate > 0 ? t_.hib[j] : t_.lob[j];
        if (!std::isfinite(target)) continue;
      }
      double ti = (target - x_[j]) / rate;
      if (ti < 0) ti = 0;  // degenerate: already at (or past) the blocking bound
      bool better = ti < res.t - 1e-12;
      bool tie = !better && ti <= res.t + 1e-12;
      // A tied bound flip wins (no basis change); tied blockers prefer the
      // largest pivot magnitude, then the smallest column index.
      bool take = better;
      if (tie && !res.flip) {
        if (std::fabs(wi) > best_pivot * (1 + 1e-12))
          take = true;
        else if (std::fabs(wi) >= best_pivot * (1 - 1e-12) && res.leave_pos >= 0 &&
                 j < basis_[res.leave_pos])
          take = true;
      }
      if (take) {
        res.t = ti;
        res.leave_pos = i;
        res.leave_to = target;
        res.flip = false;
        best_pivot = std::fabs(wi);
      }
    }
    return res;
  }

  void apply_step(int q, int dir, const Eigen::VectorXd& w, const Ratio& r) {
    double t = r.t;
    if (t > 0) {
      for (int i = 0; i < t_.m; ++i) x_[basis_[i]] -= t * dir * w[i];
      x_[q] += t * dir;
    }
    if (r.flip) {
      status_[q] = dir > 0 ? NbStatus::AtUpper : NbStatus::AtLower;
      x_[q] = dir > 0 ? t_.hib[q] : t_.lob[q];
      return;
    }
    int pos = r.leave_pos;
    int leaving = basis_[pos];
    x_[leaving] = r.leave_to;
    status_[leaving] = (r.leave_to == t_.hib[leaving] && std::isfinite(t_.hib[leaving]))
                           ? NbStatus::AtUpper
                           : NbStatus::AtLower;
    if (!std::isfinite(t_.lob[leaving]) && !std::isfinite(t_.hib[leaving]))
      status_[leaving] = NbStatus::Free;
    basis_[pos] = q;
    status_[q] = NbStatus::Basic;
    // Explicit inverse update: Binv <- E * Binv with the eta column from w.
    double alpha = w[pos];
    Eigen::RowVectorXd prow = binv_.row(pos) / alpha;
    for (int i = 0; i < t_.m; ++i) {
      if (i == pos) continue;
      double wi = w[i];
      if (wi != 0.0) binv_.row(i) -= wi * prow;
    }
    binv_.row(pos) = prow;
    if (++pivots_since_refactor_ >= opt_.refactor_every) refactor();
  }

  void note_step(double t) {
    if (t <= 1e-12) {
      if (++degen_run_ > opt_.bland_after) bland_ = true;
    } else {
      degen_run_ = 0;
      bland_ = false;
    }
  }

  double total_infeasibility() const {
    double f = 0.0;
    for (int i = 0; i < t_.m; ++i) {
      int j = basis_[i];
      if (double d = below(j); d > 0) f += d;
      if (double d = above(j); d > 0) f += d;
    }
    return f;
  }

  SolveStatus phase1() {
    bool fresh = false;
    int anomalies = 0;
    for (; iter_ < opt_.max_iterations; ++iter_) {
      bool any_infeasible = false;
      Eigen::VectorXd d = Eigen::VectorXd::Zero(t_.m);
      for (int i = 0; i < t_.m; ++i) {
        int j = basis_[i];
        if (above(j) > opt_.feas_tol * bound_tol(t_.hib[j])) {
          d[i] = 1.0;
          any_infeasible = true;
        } else if (below(j) > opt_.feas_tol * bound_tol(t_.lob[j])) {
          d[i] = -1.0;
          any_infeasible = true;
        }
      }
      if (!any_infeasible) return SolveStatus::Optimal;
      Eigen::VectorXd y = binv_.transpose() * d;
      auto [q, dir] = price([&](int j) { return -sparse_dot(y, j); });
      if (q < 0) {
        // A stale factorization can hide improving directions, so conclude
        // infeasibility only from a freshly rebuilt inverse.
        if (fresh) return SolveStatus::Infeasible;
        refactor();
        fresh = true;
        continue;
      }
      Eigen::VectorXd w = ftran(q);
      Ratio r = ratio_test(q, dir, w);
      if (!std::isfinite(r.t)) {
        // Infeasibility is bounded below, so an unbounded phase-1 ray means
        // numerical trouble; refactor and retry a few times before giving up.
        if (++anomalies > 5) return SolveStatus::IterationLimit;
        refactor();
        fresh = true;
        continue;
      }
      fresh = false;
      note_step(r.t);
      apply_step(q, dir, w, r);
    }
    return SolveStatus::IterationLimit;
  }

  SolveStatus phase2() {
    bool fresh = false;
    int repair_rounds = 0;
    for (; iter_ < opt_.max_iterations; ++iter_) {
      Eigen::VectorXd cb(t_.m);
      for (int i = 0; i < t_.m; ++i) cb[i] = t_.cost[basis_[i]];
      Eigen::VectorXd y = binv_.transpose() * cb;
      auto [q, dir] = price([&](int j) { return t_.cost[j] - sparse_dot(y, j); });
      if (q < 0) {
        if (!fresh) {
          refactor();
          fresh = true;
          continue;
        }
        if (total_infeasibility() > opt_.feas_tol) {
          // Declaring optimality at a point that violates the constraints
          // would hand the caller garbage, so give up loudly once the
          // repair attempts run out.
          if (repair_rounds >= 3) return SolveStatus::IterationLimit;
          ++repair_rounds;
          fresh = false;
          SolveStatus st = phase1();
          if (st != SolveStatus::Optimal) return st;
          continue;
        }
        return SolveStatus::Optimal;
      }
      Eigen::VectorXd w = ftran(q);
      Ratio r = ratio_test(q, dir, w);
      if (!std::isfinite(r.t)) return SolveStatus::Unbounded;
      fresh = false;
      note_step(r.t);
      apply_step(q, dir, w, r);
    }
    return SolveStatus::IterationLimit;
  }
};

}  // namespace

LpResult solve_lp(const SolverModel& model, const SimplexOptions& opt) {
  Tableau t(model);
  Simplex s(t, opt);
  LpResult res;
  res.status = s.run(&res.iterations);
  res.x.resize(model.num_cols());
  for (int j = 0; j < model.num_cols(); ++j) res.x[j] = s.value(j);
  if (res.status == SolveStatus::Optimal) {
    res.objective = 0.0;
    for (int j = 0; j < model.num_cols(); ++j)
      res.objective += model.obj[j] * res.x[j];
    res.row_dual = s.row_duals();
    res.reduced_cost.assign(model.num_cols(), 0.0);
    for (int j = 0; j < model.num_cols(); ++j) {
      double z = model.obj[j];
      res.reduced_cost[j] = z;
    }
    for (int r = 0; r < model.num_rows(); ++r)
      for (const auto& [col, coef] : model.rows[r].terms)
        res.reduced_cost[col] -= coef * res.row_dual[r];
  }
  return res;
}

std::string verify_lp_certificate(const SolverModel& model, const LpResult& res,
                                  double feas_tol, double dual_tol) {
  std::ostringstream why;
  if (res.status != SolveStatus::Optimal) {
    why << "status is " << to_string(res.status) << ", not optimal";
    return why.str();
  }
  int n = model.num_cols(), m = model.num_rows();
  for (int j = 0; j < n; ++j) {
    double xj = res.x[j];
    if (xj < model.lo[j] - feas_tol * (1 + std::fabs(model.lo[j])) ||
        xj > model.hi[j] + feas_tol * (1 + std::fabs(model.hi[j]))) {
      why << "column " << model.col_name[j] << " out of bounds: " << xj;
      return why.str();
    }
  }
  for (int r = 0; r < m; ++r) {
    const auto& row = model.rows[r];
    double act = 0.0;
    for (const auto& [col, coef] : row.terms) act += coef * res.x[col];
    double tol = feas_tol * (1 + std::fabs(row.rhs));
    bool ok = row.sense == RowSense::LE   ? act <= row.rhs + tol
              : row.sense == RowSense::GE ? act >= row.rhs - tol
                                          : std::fabs(act - row.rhs) <= tol;
    if (!ok) {
      why << "row " << row.name << " violated: activity " << act << " vs rhs "
          << row.rhs;
      return why.str();
    }
    double y = res.row_dual[r];
    if (row.sense == RowSense::LE && y > dual_tol) {
      why << "row " << row.name << " has positive dual " << y << " on a <= row";
      return why.str();
    }
    if (row.sense == RowSense::GE && y < -dual_tol) {
      why << "row " << row.name << " has negative dual " << y << " on a >= row";
      return why.str();
    }
  }
  // Dual feasibility of reduced costs, then the certified duality gap.
  double dual_obj = 0.0;
  for (int r = 0; r < m; ++r) dual_obj += res.row_dual[r] * model.rows[r].rhs;
  for (int j = 0; j < n; ++j) {
    double z = res.reduced_cost[j];
    double scale = 1 + std::fabs(model.obj[j]);
    double at_lo = std::fabs(res.x[j] - model.lo[j]);
    double at_hi = std::fabs(res.x[j] - model.hi[j]);
    bool interior = at_lo > feas_tol * (1 + std::fabs(model.lo[j])) &&
                    at_hi > feas_tol * (1 + std::fabs(model.hi[j]));
    if (interior && std::fabs(z) > dual_tol * scale) {
      why << "column " << model.col_name[j] << " interior with reduced cost " << z;
      return why.str();
    }
    if (!interior && at_lo <= at_hi && z < -dual_tol * scale && model.lo[j] != model.hi[j]) {
      why << "column " << model.col_name[j] << " at lower bound with reduced cost " << z;
      return why.str();
    }
    if (!interior && at_hi < at_lo && z > dual_tol * scale && model.lo[j] != model.hi[j]) {
      why << "column " << model.col_name[j] << " at upper bound with reduced cost " << z;
      return why.str();
    }
    if (z > 0 && std::isfinite(model.lo[j])) dual_obj += z * model.lo[j];
    if (z < 0 && std::isfinite(model.hi[j])) dual_obj += z * model.hi[j];
  }
  double gap = std::fabs(res.objective - dual_obj);
  if (gap > 1e-6 * (1 + std::fabs(res.objective))) {
    why << "duality gap " << gap << " (primal " << res.objective << ", dual "
        << dual_obj << ")";
    return why.str();
  }
  return {};
}

}  // namespace modt
