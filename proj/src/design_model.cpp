#include "modt/design_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace modt {

namespace {

std::string num_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void DesignConfig::validate(const MultimodalNetwork& net) const {
  if (theta.empty()) throw DataError("frequency menu is empty");
  if (omega.empty()) throw DataError("fleet menu is empty");
  for (double f : theta)
    if (!(f > 0.0)) throw DataError("frequency menu entries must be positive");
  bool sentinel = false;
  for (double n : omega) {
    if (!(n > 0.0)) throw DataError("fleet menu entries must be positive");
    if (std::fabs(n - 0.01) < 1e-12) sentinel = true;
  }
  if (!sentinel)
    throw DataError(
        "fleet menu must contain the 0.01 sentinel so every zone can be "
        "effectively unserved without losing feasibility");
  if (!(bus_budget >= 0.0)) throw DataError("negative bus budget");
  if (!(fleet_budget >= 0.0)) throw DataError("negative fleet budget");
  if (params.matching_rate.size() != net.zones().size())
    throw DataError("matching rate vector does not match the zone count");
  if (!(params.value_of_time >= 0.0)) throw DataError("negative value of time");
}

std::vector<double> frequencies_per_minute(const DesignConfig& cfg) {
  std::vector<double> out(cfg.theta.size());
  for (std::size_t f = 0; f < cfg.theta.size(); ++f)
    out[f] = cfg.theta[f] / 60.0;
  return out;
}

ServiceDesign to_service_design(const DesignDecision& d,
                                const DesignConfig& cfg) {
  ServiceDesign out;
  out.frequency.resize(d.frequency_choice.size());
  for (std::size_t l = 0; l < d.frequency_choice.size(); ++l) {
    const int c = d.frequency_choice[l];
    if (c < -1 || c >= static_cast<int>(cfg.theta.size()))
      throw DataError("frequency choice out of range for line " +
                      std::to_string(l));
    out.frequency[l] = c < 0 ? 0.0 : cfg.theta[c] / 60.0;
  }
  out.fleet.resize(d.fleet_choice.size());
  for (std::size_t z = 0; z < d.fleet_choice.size(); ++z) {
    const int c = d.fleet_choice[z];
    if (c < 0 || c >= static_cast<int>(cfg.omega.size()))
      throw DataError("fleet choice out of range for zone " +
                      std::to_string(z));
    out.fleet[z] = cfg.omega[c];
  }
  return out;
}

int buses_required(const MultimodalNetwork& net, int line,
                   double freq_per_hour) {
  if (line < 0 || line >= static_cast<int>(net.lines().size()))
    throw DataError("line index out of range");
  if (!(freq_per_hour > 0.0)) throw DataError("non-positive frequency");
  const TransitLine& l = net.lines()[line];
  if (l.links.empty())
    throw DataError("line '" + l.id + "' has no transit links");
  return static_cast<int>(
      std::ceil(freq_per_hour * 2.0 * l.one_way_time / 60.0 - 1e-9));
}

int total_buses(const MultimodalNetwork& net, const DesignDecision& d,
                const DesignConfig& cfg) {
  int total = 0;
  for (std::size_t l = 0; l < d.frequency_choice.size(); ++l)
    if (d.frequency_choice[l] >= 0)
      total += buses_required(net, static_cast<int>(l),
                              cfg.theta[d.frequency_choice[l]]);
  return total;
}

double total_vehicles(const DesignDecision& d, const DesignConfig& cfg) {
  double total = 0.0;
  for (int c : d.fleet_choice) total += cfg.omega[c];
  return total;
}

bool within_budgets(const MultimodalNetwork& net, const DesignDecision& d,
                    const DesignConfig& cfg) {
  return total_buses(net, d, cfg) <= cfg.bus_budget + 1e-9 &&
         total_vehicles(d, cfg) <= cfg.fleet_budget + 1e-9;
}

DesignMilp build_design_milp(
    const MultimodalNetwork& net, const DesignConfig& cfg,
    const std::vector<std::vector<double>>& wait_bound) {
  cfg.validate(net);
  DesignMilp out;
  SolverModel& m = out.model;
  out.destinations = net.destinations();
  const std::size_t nd = out.destinations.size();
  if (wait_bound.size() != nd)
    throw DataError("wait bound table does not cover every destination");

  const std::vector<double> cost = net.costs(cfg.params.value_of_time);
  const std::vector<double> freq_min = frequencies_per_minute(cfg);
  const std::size_t nl = net.lines().size();
  const std::size_t nz = net.zones().size();
  const std::size_t nn = net.nodes().size();
  const std::size_t na = net.links().size();

  // Design binaries.
  out.x_col.resize(nl);
  out.y_col.assign(nl, {});
  for (std::size_t l = 0; l < nl; ++l) {
    out.x_col[l] = m.add_col("x[" + net.lines()[l].id + "]", 0.0, 0.0, 1.0,
                             true);
    out.y_col[l].resize(cfg.theta.size());
    for (std::size_t f = 0; f < cfg.theta.size(); ++f)
      out.y_col[l][f] =
          m.add_col("y[" + net.lines()[l].id + "," + num_tag(cfg.theta[f]) +
                        "]",
                    0.0, 0.0, 1.0, true);
  }
  out.n_col.assign(nz, {});
  for (std::size_t z = 0; z < nz; ++z) {
    out.n_col[z].resize(cfg.omega.size());
    for (std::size_t n = 0; n < cfg.omega.size(); ++n)
      out.n_col[z][n] = m.add_col(
          "N[" + net.zones()[z].id + "," + num_tag(cfg.omega[n]) + "]", 0.0,
          0.0, 1.0, true);
  }

  // One frequency per operating line; exactly one fleet size per zone.
  for (std::size_t l = 0; l < nl; ++l) {
    const int r = m.add_row("line_freq[" + net.lines()[l].id + "]",
                            RowSense::EQ, 0.0);
    for (int col : out.y_col[l]) m.add_term(r, col, 1.0);
    m.add_term(r, out.x_col[l], -1.0);
  }
  for (std::size_t z = 0; z < nz; ++z) {
    const int r =
        m.add_row("fleet_pick[" + net.zones()[z].id + "]", RowSense::EQ, 1.0);
    for (int col : out.n_col[z]) m.add_term(r, col, 1.0);
  }
  if (cfg.bus_budget < kInf) {
    const int r = m.add_row("bus_budget", RowSense::LE, cfg.bus_budget);
    for (std::size_t l = 0; l < nl; ++l)
      for (std::size_t f = 0; f < cfg.theta.size(); ++f)
        m.add_term(r, out.y_col[l][f],
                   buses_required(net, static_cast<int>(l), cfg.theta[f]));
  }
  if (cfg.fleet_budget < kInf) {
    const int r = m.add_row("fleet_budget", RowSense::LE, cfg.fleet_budget);
    for (std::size_t z = 0; z < nz; ++z)
      for (std::size_t n = 0; n < cfg.omega.size(); ++n)
        m.add_term(r, out.n_col[z][n], cfg.omega[n]);
  }

  // Per-destination assignment block.
  out.v_col.assign(na, std::vector<int>(nd, -1));
  out.w_col.assign(nn, std::vector<int>(nd, -1));
  for (std::size_t kk = 0; kk < nd; ++kk) {
    const int dest = out.destinations[kk];
    const std::string kt = net.zones()[net.nodes()[dest].zone].id;
    for (std::size_t a = 0; a < na; ++a)
      out.v_col[a][kk] = m.add_col(
          "v[" + std::to_string(a) + "," + kt + "]", cost[a], 0.0, kInf);
    for (std::size_t i = 0; i < nn; ++i) {
      if (!net.is_waiting(static_cast<int>(i))) continue;
      const double wb = wait_bound[kk][i];
      if (!(wb >= 0.0) || wb >= kInf)
        throw DataError("wait bound missing for node " + net.nodes()[i].id +
                        " toward " + kt);
      out.w_col[i][kk] =
          m.add_col("W[" + net.nodes()[i].id + "," + kt + "]", 1.0, 0.0, kInf);
    }

    const std::vector<double> g = net.g_vector(dest);
    for (std::size_t i = 0; i < nn; ++i) {
      // The destination's own balance row is the negated sum of the others
      // and is omitted to keep the rows independent.
      if (static_cast<int>(i) == dest) continue;
      const int r = m.add_row(
          "balance[" + net.nodes()[i].id + "," + kt + "]", RowSense::EQ, g[i]);
      for (int a : net.fs(static_cast<int>(i)))
        m.add_term(r, out.v_col[a][kk], 1.0);
      for (int a : net.bs(static_cast<int>(i)))
        m.add_term(r, out.v_col[a][kk], -1.0);
    }

    // Boarding limits with surrogate columns t = y * W, one per candidate
    // frequency, tied to their envelopes.
    for (std::size_t i = 0; i < nn; ++i) {
      if (out.w_col[i][kk] < 0) continue;
      const int wcol = out.w_col[i][kk];
      const double wb = wait_bound[kk][i];
      const std::string it = net.nodes()[i].id;
      for (int a : net.fs(static_cast<int>(i))) {
        if (net.links()[a].kind != LinkKind::Transit) continue;
        const int line = net.links()[a].line;
        const int board =
            m.add_row("board[" + std::to_string(a) + "," + kt + "]",
                      RowSense::LE, 0.0);
        m.add_term(board, out.v_col[a][kk], 1.0);
        for (std::size_t f = 0; f < cfg.theta.size(); ++f) {
          const int ycol = out.y_col[line][f];
          const int t = m.add_col("t[" + num_tag(cfg.theta[f]) + "," +
                                      std::to_string(a) + "," + it + "," + kt +
                                      "]",
                                  0.0, 0.0, kInf);
          out.surrogates.push_back({t, ycol, wcol});
          m.add_term(board, t, -freq_min[f]);
          const std::string tag = "[" + num_tag(cfg.theta[f]) + "," +
                                  std::to_string(a) + "," + it + "," + kt +
                                  "]";
          int r = m.add_row("t_hi" + tag, RowSense::GE, -wb);
          m.add_term(r, wcol, -1.0);
          m.add_term(r, t, 1.0);
          m.add_term(r, ycol, -wb);
          r = m.add_row("t_cap" + tag, RowSense::GE, 0.0);
          m.add_term(r, ycol, wb);
          m.add_term(r, t, -1.0);
          r = m.add_row("t_lo" + tag, RowSense::GE, 0.0);
          m.add_term(r, t, 1.0);
          r = m.add_row("t_le_w" + tag, RowSense::GE, 0.0);
          m.add_term(r, wcol, 1.0);
          m.add_term(r, t, -1.0);
        }
      }
    }

    // Vehicle pickup limits with surrogate columns w = N * W shared by all
    // road links leaving the same waiting intersection.
    for (std::size_t i = 0; i < nn; ++i) {
      if (out.w_col[i][kk] < 0) continue;
      if (net.nodes()[i].kind != NodeKind::RoadIntersection) continue;
      const int wcol = out.w_col[i][kk];
      const double wb = wait_bound[kk][i];
      const int zone = net.nodes()[i].zone;
      const double match = cfg.params.matching_rate[zone];
      const std::string it = net.nodes()[i].id;

      std::vector<int> omega_col(cfg.omega.size());
      for (std::size_t n = 0; n < cfg.omega.size(); ++n) {
        const int ncol = out.n_col[zone][n];
        const int w = m.add_col("w[" + it + "," + num_tag(cfg.omega[n]) + "," +
                                    kt + "]",
                                0.0, 0.0, kInf);
        omega_col[n] = w;
        out.surrogates.push_back({w, ncol, wcol});
        const std::string tag =
            "[" + it + "," + num_tag(cfg.omega[n]) + "," + kt + "]";
        int r = m.add_row("w_hi" + tag, RowSense::GE, -wb);
        m.add_term(r, wcol, -1.0);
        m.add_term(r, w, 1.0);
        m.add_term(r, ncol, -wb);
        r = m.add_row("w_cap" + tag, RowSense::GE, 0.0);
        m.add_term(r, ncol, wb);
        m.add_term(r, w, -1.0);
        r = m.add_row("w_lo" + tag, RowSense::GE, 0.0);
        m.add_term(r, w, 1.0);
        r = m.add_row("w_le_w" + tag, RowSense::GE, 0.0);
        m.add_term(r, wcol, 1.0);
        m.add_term(r, w, -1.0);
      }
      for (int a : net.fs(static_cast<int>(i))) {
        if (net.links()[a].kind != LinkKind::Road) continue;
        const int pick =
            m.add_row("pickup[" + std::to_string(a) + "," + kt + "]",
                      RowSense::LE, 0.0);
        m.add_term(pick, out.v_col[a][kk], 1.0);
        for (std::size_t n = 0; n < cfg.omega.size(); ++n)
          m.add_term(pick, omega_col[n], -match * cfg.omega[n]);
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> design_wait_bounds(
    const MultimodalNetwork& net, const DesignConfig& cfg) {
  cfg.validate(net);
  return wait_upper_bounds(net, cfg.params, cfg.omega,
                           frequencies_per_minute(cfg));
}

DesignDecision decode_design(const DesignMilp& milp,
                             const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(milp.model.num_cols()))
    throw DataError("solution vector does not match the model");
  DesignDecision d;
  d.frequency_choice.assign(milp.y_col.size(), -1);
  for (std::size_t l = 0; l < milp.y_col.size(); ++l) {
    for (std::size_t f = 0; f < milp.y_col[l].size(); ++f) {
      if (x[milp.y_col[l][f]] > 0.5) {
        if (d.frequency_choice[l] >= 0)
          throw SolverError("two frequencies selected for one line");
        d.frequency_choice[l] = static_cast<int>(f);
      }
    }
    const bool open = x[milp.x_col[l]] > 0.5;
    if (open != (d.frequency_choice[l] >= 0))
      throw SolverError("line open/closed flag disagrees with its frequency");
  }
  d.fleet_choice.assign(milp.n_col.size(), -1);
  for (std::size_t z = 0; z < milp.n_col.size(); ++z) {
    for (std::size_t n = 0; n < milp.n_col[z].size(); ++n) {
      if (x[milp.n_col[z][n]] > 0.5) {
        if (d.fleet_choice[z] >= 0)
          throw SolverError("two fleet sizes selected for one zone");
        d.fleet_choice[z] = static_cast<int>(n);
      }
    }
    if (d.fleet_choice[z] < 0)
      throw SolverError("no fleet size selected for a zone");
  }
  return d;
}

std::vector<double> encode_design(const DesignMilp& milp,
                                  const DesignDecision& d) {
  std::vector<double> x(milp.model.num_cols(), 0.0);
  if (d.frequency_choice.size() != milp.y_col.size() ||
      d.fleet_choice.size() != milp.n_col.size())
    throw DataError("decision does not match the model dimensions");
  for (std::size_t l = 0; l < milp.y_col.size(); ++l) {
    const int c = d.frequency_choice[l];
    if (c >= static_cast<int>(milp.y_col[l].size()))
      throw DataError("frequency choice out of range");
    if (c >= 0) {
      x[milp.y_col[l][c]] = 1.0;
      x[milp.x_col[l]] = 1.0;
    }
  }
  for (std::size_t z = 0; z < milp.n_col.size(); ++z) {
    const int c = d.fleet_choice[z];
    if (c < 0 || c >= static_cast<int>(milp.n_col[z].size()))
      throw DataError("fleet choice out of range");
    x[milp.n_col[z][c]] = 1.0;
  }
  return x;
}

McCormickReport validate_mccormick_exactness(const DesignMilp& milp,
                                             const std::vector<double>& x,
                                             double tol) {
  McCormickReport report;
  if (x.size() != static_cast<std::size_t>(milp.model.num_cols()))
    throw DataError("solution vector does not match the model");
  for (const DesignMilp::Surrogate& s : milp.surrogates) {
    const double bin = x[s.binary_col];
    if (bin > 1e-6 && bin < 1.0 - 1e-6)
      throw DataError("surrogate audit requires integral binaries");
    const double want = (bin > 0.5 ? 1.0 : 0.0) * x[s.wait_col];
    const double got = x[s.col];
    if (std::fabs(got - want) > tol) {
      report.exact = false;
      report.violations.push_back(
          milp.model.col_name[s.col] + " = " + std::to_string(got) +
          ", expected " + std::to_string(want));
    }
  }
  return report;
}

EnumerationResult solve_by_enumeration(const MultimodalNetwork& net,
                                       const DesignConfig& cfg) {
  cfg.validate(net);
  const std::size_t nl = net.lines().size();
  const std::size_t nz = net.zones().size();
  EnumerationResult out;
  DesignDecision d;
  d.frequency_choice.assign(nl, -1);
  d.fleet_choice.assign(nz, 0);

  while (true) {
    if (within_budgets(net, d, cfg)) {
      ++out.in_budget;
      try {
        const AssignmentSolution sol = solve_assignment(
            net, to_service_design(d, cfg), cfg.params, false);
        ++out.feasible;
        if (sol.objective < out.objective) {
          out.objective = sol.objective;
          out.best = d;
        }
      } catch (const SolverError&) {
        // Design strands part of the demand; skip it.
      }
    }

    // Odometer over frequency choices then fleet choices.
    std::size_t pos = 0;
    for (; pos < nl; ++pos) {
      if (++d.frequency_choice[pos] < static_cast<int>(cfg.theta.size()))
        break;
      d.frequency_choice[pos] = -1;
    }
    if (pos < nl) continue;
    for (pos = 0; pos < nz; ++pos) {
      if (++d.fleet_choice[pos] < static_cast<int>(cfg.omega.size())) break;
      d.fleet_choice[pos] = 0;
    }
    if (pos == nz) break;
  }
  if (out.feasible == 0)
    throw SolverError("no design within the budgets serves all demand");
  return out;
}

}  // namespace modt
