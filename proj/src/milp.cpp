#include "modt/milp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "modt/common.hpp"

namespace modt {

namespace {

struct Node {
  std::vector<double> lo, hi;
  double parent_bound;
};

int most_fractional(const SolverModel& model, const std::vector<double>& x,
                    double int_tol) {
  int best = -1;
  double best_closeness = kInf;
  for (int j = 0; j < model.num_cols(); ++j) {
    if (!model.is_integer[j]) continue;
    double frac = x[j] - std::floor(x[j]);
    if (std::min(frac, 1.0 - frac) <= int_tol) continue;
    double closeness = std::fabs(frac - 0.5);
    if (closeness < best_closeness - 1e-15) {
      best = j;
      best_closeness = closeness;
    }
  }
  return best;
}

bool same_point(const std::vector<double>& a, const std::vector<double>& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (std::fabs(a[i] - b[i]) > 1e-6) return false;
  return true;
}

class Pool {
 public:
  Pool(int size, double gap) : size_(size), gap_(gap) {}

  bool enabled() const { return size_ > 1; }

  // Nodes whose bound exceeds this cannot contribute anything worth keeping.
  double cutoff(double best) const {
    if (!enabled()) return best - 1e-9;
    double base = best + gap_ * std::max(1.0, std::fabs(best)) + 1e-9;
    if ((int)entries_.size() >= size_)
      base = std::min(base, entries_.back().second - 1e-9);
    return base;
  }

  bool offer(const std::vector<double>& x, double obj, double best) {
    if (!enabled()) return false;
    if (obj > cutoff(best)) return false;
    for (const auto& p : entries_)
      if (std::fabs(p.second - obj) <= 1e-9 && same_point(p.first, x)) return false;
    entries_.emplace_back(x, obj);
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const auto& a, const auto& b) {
                       if (a.second != b.second) return a.second < b.second;
                       return std::lexicographical_compare(
                           a.first.begin(), a.first.end(), b.first.begin(),
                           b.first.end());
                     });
    if ((int)entries_.size() > size_) entries_.resize(size_);
    return true;
  }

  void rebase(double best) {
    if (!enabled()) return;
    double cut = best + gap_ * std::max(1.0, std::fabs(best)) + 1e-9;
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [&](const auto& p) { return p.second > cut; }),
                   entries_.end());
  }

  void fill(MilpResult& res) const {
    for (const auto& [x, obj] : entries_) {
      res.pool.push_back(x);
      res.pool_obj.push_back(obj);
    }
  }

 private:
  int size_;
  double gap_;
  std::vector<std::pair<std::vector<double>, double>> entries_;
};

}  // namespace

MilpResult solve_milp(const SolverModel& model, const MilpOptions& opt) {
  MilpResult res;
  Pool pool(opt.pool_size, opt.pool_gap);
  bool have_incumbent = false;
  double best = kInf;
  std::vector<double> best_x;

  // With an all-binary integer set the pool can keep searching past an
  // integral optimum: a row excluding exactly the found point is appended and
  // the node is reopened, so tied and near-tied designs are enumerated too.
  bool all_binary = false;
  {
    int ints = 0;
    bool binary = true;
    for (int j = 0; j < model.num_cols(); ++j)
      if (model.is_integer[j]) {
        ++ints;
        if (model.lo[j] != 0.0 || model.hi[j] != 1.0) binary = false;
      }
    all_binary = ints > 0 && binary;
  }

  SolverModel work = model;
  int excluded = 0;
  std::vector<Node> open;
  open.push_back({model.lo, model.hi, -kInf});

  while (!open.empty()) {
    if (res.nodes >= opt.max_nodes) break;
    size_t pick = open.size() - 1;
    if (opt.dive_restart_every > 0 && res.nodes > 0 &&
        res.nodes % opt.dive_restart_every == 0) {
      for (size_t i = 0; i < open.size(); ++i)
        if (open[i].parent_bound < open[pick].parent_bound) pick = i;
    }
    Node node = std::move(open[pick]);
    open.erase(open.begin() + pick);
    ++res.nodes;

    if (have_incumbent && node.parent_bound > pool.cutoff(best)) continue;

    work.lo = node.lo;
    work.hi = node.hi;
    LpResult lp = solve_lp(work, opt.lp);
    res.lp_iterations += lp.iterations;
    if (lp.status == SolveStatus::IterationLimit) {
      // A numerically stuck relaxation gets one slower, steadier attempt:
      // smallest-index pivoting breaks cycles and frequent refactorization
      // keeps the basis accurate.
      SimplexOptions careful = opt.lp;
      careful.bland_after = 0;
      careful.refactor_every = 16;
      lp = solve_lp(work, careful);
      res.lp_iterations += lp.iterations;
    }
    if (lp.status == SolveStatus::Infeasible) continue;
    if (lp.status == SolveStatus::Unbounded) {
      if (res.nodes == 1 && !have_incumbent) {
        res.status = SolveStatus::Unbounded;
        return res;
      }
      throw SolverError("relaxation became unbounded below the root node");
    }
    if (lp.status != SolveStatus::Optimal)
      throw SolverError(std::string("relaxation solve failed: ") +
                        to_string(lp.status));
    if (have_incumbent && lp.objective > pool.cutoff(best)) continue;

    int br = most_fractional(work, lp.x, opt.int_tol);
    if (br < 0) {
      std::vector<double> x = lp.x;
      for (int j = 0; j < work.num_cols(); ++j)
        if (work.is_integer[j]) x[j] = std::round(x[j]);
      // Snapping an in-tolerance fraction to an integer can break a row
      // whose coefficient on that column is large, so the snapped point is
      // certified against every row before it may become an incumbent.  A
      // broken row reopens branching on the column hiding the worst
      // residual fraction, which pins it to an exact integer below.
      int culprit = -1;
      double culprit_frac = 0.0;
      for (const auto& row : work.rows) {
        double lhs = 0.0;
        double scale = std::fabs(row.rhs);
        for (const auto& [j, a] : row.terms) {
          lhs += a * x[j];
          scale = std::max(scale, std::fabs(a) * std::fabs(x[j]));
        }
        const double tol = 1e-7 * (1.0 + scale);
        const bool broken =
            row.sense == RowSense::LE
                ? lhs > row.rhs + tol
                : row.sense == RowSense::GE
                      ? lhs < row.rhs - tol
                      : std::fabs(lhs - row.rhs) > tol;
        if (!broken) continue;
        bool attributable = false;
        for (const auto& [j, a] : row.terms) {
          if (!work.is_integer[j]) continue;
          const double frac = std::fabs(lp.x[j] - x[j]);
          if (frac <= 0.0) continue;
          attributable = true;
          if (frac > culprit_frac) {
            culprit_frac = frac;
            culprit = j;
          }
        }
        if (!attributable) {
          throw SolverError("relaxation returned a point violating row " +
                            row.name + " by " +
                            std::to_string(row.sense == RowSense::GE
                                               ? row.rhs - lhs
                                               : lhs - row.rhs));
        }
      }
      if (culprit >= 0) {
        br = culprit;
      } else {
        double actual = 0.0;
        for (int j = 0; j < work.num_cols(); ++j)
          actual += work.obj[j] * x[j];
        if (actual < best - 1e-9) {
          best = actual;
          best_x = x;
          have_incumbent = true;
          pool.rebase(best);
        }
        bool kept = pool.offer(x, actual, best);
        if (kept && all_binary) {
          int r = work.add_row("exclude" + std::to_string(excluded++),
                               RowSense::GE, 1.0);
          double shift = 0.0;
          for (int j = 0; j < work.num_cols(); ++j) {
            if (!work.is_integer[j]) continue;
            if (x[j] > 0.5) {
              work.add_term(r, j, -1.0);
              shift += 1.0;
            } else {
              work.add_term(r, j, 1.0);
            }
          }
          work.rows[r].rhs = 1.0 - shift;
          open.push_back({std::move(node.lo), std::move(node.hi), lp.objective});
        }
        continue;
      }
    }

    double v = lp.x[br];
    Node up = node;
    up.lo[br] = std::ceil(v);
    up.parent_bound = lp.objective;
    Node down = std::move(node);
    down.hi[br] = std::floor(v);
    down.parent_bound = lp.objective;
    open.push_back(std::move(up));
    open.push_back(std::move(down));  // depth-first explores the floor child
  }

  res.bound = have_incumbent ? best : kInf;
  for (const auto& nd : open) res.bound = std::min(res.bound, nd.parent_bound);
  if (!open.empty() && res.nodes >= opt.max_nodes) {
    res.status = SolveStatus::IterationLimit;
  } else if (have_incumbent) {
    res.status = SolveStatus::Optimal;
    if (open.empty()) res.bound = best;
  } else {
    res.status = SolveStatus::Infeasible;
  }
  if (have_incumbent) {
    res.objective = best;
    res.x = best_x;
    if (pool.enabled()) {
      pool.fill(res);
    } else {
      res.pool.push_back(best_x);
      res.pool_obj.push_back(best);
    }
  }
  return res;
}

}  // namespace modt
