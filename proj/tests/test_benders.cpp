#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "modt/assignment.hpp"
#include "modt/benders.hpp"
#include "modt/common.hpp"
#include "modt/csv.hpp"
#include "modt/design_model.hpp"
#include "modt/instances.hpp"
#include "modt/network.hpp"

using namespace modt;

namespace {

DesignConfig corridor_config(const Instance& inst) {
  DesignConfig cfg;
  cfg.theta = {10.0, 30.0, 20.0};
  cfg.omega = {0.01, 50.0, 100.0};
  cfg.bus_budget = 100.0;
  cfg.fleet_budget = 1000.0;
  cfg.params = inst.params;
  return cfg;
}

DesignConfig triangle_config(const Instance& inst) {
  DesignConfig cfg;
  cfg.theta = {6.0, 12.0};
  cfg.omega = {0.01, 10.0, 30.0};
  cfg.bus_budget = 7.0;
  cfg.fleet_budget = 40.0;
  cfg.params = inst.params;
  return cfg;
}

DesignConfig feeder_config(const Instance& inst) {
  DesignConfig cfg;
  cfg.theta = {6.0, 12.0};
  cfg.omega = {0.01, 10.0, 30.0};
  cfg.bus_budget = 3.0;
  cfg.fleet_budget = 30.5;
  cfg.params = inst.params;
  return cfg;
}

// Every point of the design space in the same odometer order the
// enumeration reference walks it.
std::vector<DesignDecision> all_designs(const MultimodalNetwork& net,
                                        const DesignConfig& cfg) {
  std::vector<DesignDecision> out;
  DesignDecision d;
  d.frequency_choice.assign(net.lines().size(), -1);
  d.fleet_choice.assign(net.zones().size(), 0);
  while (true) {
    out.push_back(d);
    std::size_t pos = 0;
    while (pos < d.frequency_choice.size()) {
      if (++d.frequency_choice[pos] < static_cast<int>(cfg.theta.size()))
        break;
      d.frequency_choice[pos] = -1;
      ++pos;
    }
    if (pos < d.frequency_choice.size()) continue;
    pos = 0;
    while (pos < d.fleet_choice.size()) {
      if (++d.fleet_choice[pos] < static_cast<int>(cfg.omega.size())) break;
      d.fleet_choice[pos] = 0;
      ++pos;
    }
    if (pos == d.fleet_choice.size()) break;
  }
  return out;
}

DesignDecision random_design(const MultimodalNetwork& net,
                             const DesignConfig& cfg, std::mt19937& rng) {
  std::uniform_int_distribution<int> freq(-1,
                                          static_cast<int>(cfg.theta.size()) -
                                              1);
  std::uniform_int_distribution<int> fleet(
      0, static_cast<int>(cfg.omega.size()) - 1);
  DesignDecision d;
  d.frequency_choice.resize(net.lines().size());
  for (int& c : d.frequency_choice) c = freq(rng);
  d.fleet_choice.resize(net.zones().size());
  for (int& c : d.fleet_choice) c = fleet(rng);
  return d;
}

double cut_total_at(const std::vector<OptimalityCut>& cuts,
                    const DesignDecision& d) {
  double total = 0.0;
  for (const OptimalityCut& cut : cuts) total += cut.rhs_at(d);
  return total;
}

MultimodalNetwork three_line_depot() {
  const char* nodes =
      "nodeId,x,y,kind,zone\n"
      "D,2.5,1,Centroid,D\n"
      "P1,0,0,TransitStop,D\n"
      "Q1,5,0,TransitStop,D\n"
      "P2,0,1,TransitStop,D\n"
      "Q2,5,1,TransitStop,D\n"
      "P3,0,2,TransitStop,D\n"
      "Q3,5,2,TransitStop,D\n";
  const char* links =
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "P1,Q1,Transit,5,0,short\n"
      "P2,Q2,Transit,7.5,0,middle\n"
      "P3,Q3,Transit,10,0,long\n";
  return MultimodalNetwork::load(
      CsvTable::from_string(nodes, "nodes.csv"),
      CsvTable::from_string(links, "links.csv"),
      CsvTable::from_string("lineId\nshort\nmiddle\nlong\n", "lines.csv"),
      CsvTable::from_string("origin,destination,trips\n", "demand.csv"));
}

}  // namespace

TEST_SUITE("benders") {

TEST_CASE("fixed-design subproblem matches the assignment solver") {
  const Instance inst = figure_one();
  const DesignConfig cfg = corridor_config(inst);
  const auto wb = design_wait_bounds(inst.network, cfg);
  std::mt19937 rng(2024);
  int checked = 0;
  while (checked < 50) {
    const DesignDecision d = random_design(inst.network, cfg, rng);
    AssignmentSolution ref;
    try {
      ref = solve_assignment(inst.network, to_service_design(d, cfg),
                             cfg.params, false);
    } catch (const SolverError&) {
      continue;  // a design that strands demand has no optimum to compare
    }
    double lp_total = 0.0;
    for (int dest : inst.network.destinations()) {
      double piece = 0.0;
      solve_subproblem_lp(inst.network, cfg, wb, d, dest, &piece);
      lp_total += piece;
    }
    CHECK(close_rel(lp_total, ref.objective, 1e-6));
    const SubproblemResult sp =
        solve_subproblem(inst.network, cfg, wb, d, false);
    CHECK(close_rel(sp.assignment.objective, ref.objective, 1e-9));
    ++checked;
  }
}

TEST_CASE("completed duals are feasible and price the optimum exactly") {
  const Instance inst = figure_one();
  const DesignConfig cfg = corridor_config(inst);
  const auto wb = design_wait_bounds(inst.network, cfg);
  long fallbacks = 0;
  for (const DesignDecision& d : all_designs(inst.network, cfg)) {
    const SubproblemResult sp =
        solve_subproblem(inst.network, cfg, wb, d, false);
    fallbacks += sp.lp_fallbacks;
    for (const SubproblemDuals& duals : sp.duals)
      CHECK(check_subproblem_duals(inst.network, cfg, duals) <= 1e-7);
    // Tight at the design that generated the cut.
    const std::vector<OptimalityCut> cuts =
        make_disaggregated_cuts(inst.network, cfg, wb, sp);
    CHECK(close_rel(cut_total_at(cuts, d), sp.assignment.objective, 1e-6));
  }
  CHECK(fallbacks == 0);
}

TEST_CASE("cuts lower bound the whole design space") {
  const Instance inst = figure_one();
  const DesignConfig cfg = corridor_config(inst);
  const auto wb = design_wait_bounds(inst.network, cfg);
  const std::vector<DesignDecision> grid = all_designs(inst.network, cfg);

  std::vector<std::vector<OptimalityCut>> cut_sets;
  for (std::size_t pick : {0ul, 37ul, 200ul, 391ul, 575ul}) {
    const SubproblemResult sp =
        solve_subproblem(inst.network, cfg, wb, grid[pick], false);
    cut_sets.push_back(make_disaggregated_cuts(inst.network, cfg, wb, sp));
  }
  // Duals read straight off the explicit linear program must cut the same
  // way as the completed ones.
  {
    std::vector<OptimalityCut> lp_cuts;
    for (std::size_t k = 0; k < inst.network.destinations().size(); ++k) {
      double objective = 0.0;
      const SubproblemDuals d = solve_subproblem_lp(
          inst.network, cfg, wb, grid[0], inst.network.destinations()[k],
          &objective);
      lp_cuts.push_back(make_destination_cut(inst.network, cfg, wb[k], d));
      CHECK(close_rel(lp_cuts.back().rhs_at(grid[0]), objective, 1e-6));
    }
    cut_sets.push_back(std::move(lp_cuts));
  }

  for (const DesignDecision& d : grid) {
    double objective;
    try {
      objective = solve_assignment(inst.network, to_service_design(d, cfg),
                                   cfg.params, false)
                      .objective;
    } catch (const SolverError&) {
      continue;
    }
    for (const auto& cuts : cut_sets)
      CHECK(cut_total_at(cuts, d) <= objective + 1e-6 * (1.0 + objective));
  }
}

TEST_CASE("classic cut is the sum of the per-destination cuts") {
  const Instance inst = triangle();
  const DesignConfig cfg = triangle_config(inst);
  const auto wb = design_wait_bounds(inst.network, cfg);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    const DesignDecision d = random_design(inst.network, cfg, rng);
    const SubproblemResult sp =
        solve_subproblem(inst.network, cfg, wb, d, false);
    const OptimalityCut whole = make_classic_cut(inst.network, cfg, wb, sp);
    const std::vector<OptimalityCut> parts =
        make_disaggregated_cuts(inst.network, cfg, wb, sp);
    double constant = 0.0;
    for (const OptimalityCut& part : parts) constant += part.constant;
    CHECK(close_abs(whole.constant, constant, 1e-9 * (1.0 + std::fabs(constant))));
    for (std::size_t l = 0; l < whole.y_coef.size(); ++l)
      for (std::size_t f = 0; f < whole.y_coef[l].size(); ++f) {
        double sum = 0.0;
        for (const OptimalityCut& part : parts) sum += part.y_coef[l][f];
        CHECK(close_abs(whole.y_coef[l][f], sum,
                        1e-9 * (1.0 + std::fabs(sum))));
      }
    for (std::size_t z = 0; z < whole.n_coef.size(); ++z)
      for (std::size_t n = 0; n < whole.n_coef[z].size(); ++n) {
        double sum = 0.0;
        for (const OptimalityCut& part : parts) sum += part.n_coef[z][n];
        CHECK(close_abs(whole.n_coef[z][n], sum,
                        1e-9 * (1.0 + std::fabs(sum))));
      }
  }
}

TEST_CASE("clique cuts cap how many zones can take a fleet option") {
  DesignConfig cfg;
  cfg.theta = {6.0};
  cfg.omega = {0.01, 500.0};
  cfg.fleet_budget = 3000.0;
  const std::vector<CliqueCut> cuts = make_clique_cuts(cfg, 24);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0].fleet_index == 1);
  CHECK(cuts[0].limit == 6);

  cfg.fleet_budget = kInf;
  CHECK(make_clique_cuts(cfg, 24).empty());
  cfg.fleet_budget = 3000.0;
  CHECK(make_clique_cuts(cfg, 6).empty());
}

TEST_CASE("cover cuts name line sets the bus budget cannot hold") {
  const MultimodalNetwork net = three_line_depot();
  DesignConfig cfg;
  cfg.theta = {12.0};
  cfg.omega = {0.01};
  cfg.params = uniform_params(net, 0.02);
  // Round trips cost 2, 3 and 4 buses; a budget of 5 holds the two small
  // lines together but nothing more.
  CHECK(buses_required(net, net.line_index("short"), 12.0) == 2);
  CHECK(buses_required(net, net.line_index("middle"), 12.0) == 3);
  CHECK(buses_required(net, net.line_index("long"), 12.0) == 4);
  cfg.bus_budget = 5.0;
  const std::vector<CoverCut> cuts = make_cover_cuts(net, cfg);
  REQUIRE(cuts.size() == 1);
  REQUIRE(cuts[0].members.size() == 3);
  // The emitted cover is not minimal ({short,long} already overruns), but
  // it is a genuine cover: its three members need 9 buses against 5.
  int buses = 0;
  for (const auto& [l, f] : cuts[0].members)
    buses += buses_required(net, l, cfg.theta[f]);
  CHECK(buses == 9);

  cfg.bus_budget = 1.0;  // nothing runs: one singleton cover per line
  const std::vector<CoverCut> none_fit = make_cover_cuts(net, cfg);
  REQUIRE(none_fit.size() == 3);
  for (const CoverCut& cut : none_fit) CHECK(cut.members.size() == 1);

  cfg.bus_budget = 9.0;  // everything fits together: nothing to cut
  CHECK(make_cover_cuts(net, cfg).empty());
}

TEST_CASE("classic decomposition recovers the enumeration optimum") {
  const Instance inst = figure_one();
  const DesignConfig cfg = corridor_config(inst);
  const EnumerationResult ref = solve_by_enumeration(inst.network, cfg);

  BendersConfig bcfg;
  bcfg.epsilon = 1e-6;
  bcfg.max_iterations = 2000;
  bcfg.parallel = false;
  const BendersRun run = run_classic(inst.network, cfg, bcfg);
  CHECK(run.converged);
  CHECK(run.stop_reason == "converged");
  CHECK(close_rel(run.best_objective, ref.objective, 1e-6));
  CHECK(within_budgets(inst.network, run.best_design, cfg));
  CHECK(run.best_objective - run.lower_bound <= 1e-6);
  for (std::size_t i = 2; i < run.trace.size(); ++i)
    CHECK(run.trace[i].lower_bound >=
          run.trace[i - 1].lower_bound - 1e-9 * (1.0 + run.trace[i].lower_bound));
}

TEST_CASE("classic and enhanced agree with enumeration on every toy") {
  struct Case {
    Instance inst;
    DesignConfig cfg;
  };
  std::vector<Case> cases;
  {
    const Instance inst = figure_one();
    cases.push_back({inst, corridor_config(inst)});
  }
  {
    const Instance inst = triangle();
    cases.push_back({inst, triangle_config(inst)});
  }
  {
    const Instance inst = feeder();
    cases.push_back({inst, feeder_config(inst)});
  }
  for (const Case& c : cases) {
    const EnumerationResult ref = solve_by_enumeration(c.inst.network, c.cfg);
    BendersConfig bcfg;
    bcfg.epsilon = 1e-6;
    bcfg.max_iterations = 2000;
    bcfg.parallel = false;
    const BendersRun classic = run_classic(c.inst.network, c.cfg, bcfg);
    CHECK(classic.converged);
    CHECK(close_rel(classic.best_objective, ref.objective, 1e-6));

    bcfg.disaggregated = true;
    bcfg.clique_cover = true;
    bcfg.pool_size = 3;
    const BendersRun enhanced = run_enhanced(c.inst.network, c.cfg, bcfg);
    CHECK(enhanced.converged);
    CHECK(close_rel(enhanced.best_objective, ref.objective, 1e-6));
    CHECK(enhanced.trace.size() <= classic.trace.size());
  }
}

TEST_CASE("cut removal keeps the run convergent") {
  const Instance inst = triangle();
  const DesignConfig cfg = triangle_config(inst);
  const EnumerationResult ref = solve_by_enumeration(inst.network, cfg);
  BendersConfig bcfg;
  bcfg.epsilon = 1e-6;
  bcfg.max_iterations = 2000;
  bcfg.parallel = false;
  bcfg.cut_cleanup = true;
  bcfg.cleanup_patience = 2;
  const BendersRun run = run_enhanced(inst.network, cfg, bcfg);
  CHECK(run.converged);
  CHECK(close_rel(run.best_objective, ref.objective, 1e-6));
}

TEST_CASE("a loose tolerance stops after the first master solve") {
  const Instance inst = feeder();
  const DesignConfig cfg = feeder_config(inst);
  BendersConfig bcfg;
  bcfg.epsilon = 1e9;
  bcfg.parallel = false;
  const BendersRun run = run_classic(inst.network, cfg, bcfg);
  CHECK(run.converged);
  CHECK(run.trace.size() == 2);
}

TEST_CASE("an exhausted iteration budget is reported, not hidden") {
  const Instance inst = triangle();
  const DesignConfig cfg = triangle_config(inst);
  BendersConfig bcfg;
  bcfg.epsilon = 0.0;
  bcfg.max_iterations = 1;
  bcfg.parallel = false;
  const BendersRun run = run_classic(inst.network, cfg, bcfg);
  if (!run.converged) {
    CHECK(run.stop_reason == "iteration limit");
    CHECK(run.best_objective >= run.lower_bound - 1e-9);
    CHECK(run.gap_percent >= 0.0);
  }
  CHECK(run.trace.size() == 2);
}

TEST_CASE("trace file round-trips through the csv reader") {
  const Instance inst = feeder();
  const DesignConfig cfg = feeder_config(inst);
  BendersConfig bcfg;
  bcfg.epsilon = 1e-6;
  bcfg.max_iterations = 100;
  bcfg.parallel = false;
  const BendersRun run = run_classic(inst.network, cfg, bcfg);
  const std::string path = "benders_trace_test.csv";
  write_trace_csv(path, run);
  const CsvTable table = CsvTable::read_file(path);
  std::remove(path.c_str());
  REQUIRE(table.rows() == run.trace.size());
  for (const char* col : {"iteration", "lower_bound", "upper_bound",
                          "gap_percent", "cuts_added", "seconds"})
    CHECK(table.has_column(col));
  for (std::size_t r = 0; r < table.rows(); ++r) {
    CHECK(table.integer(r, "iteration") == run.trace[r].iteration);
    CHECK(close_rel(table.num(r, "lower_bound"), run.trace[r].lower_bound,
                    1e-9));
    CHECK(close_rel(table.num(r, "upper_bound"), run.trace[r].upper_bound,
                    1e-9));
  }
}

TEST_CASE("networks the roads cannot serve are rejected up front") {
  const char* nodes =
      "nodeId,x,y,kind,zone\n"
      "Z1,0,0,Centroid,Z1\n"
      "Z2,8,0,Centroid,Z2\n"
      "S1,1,0,TransitStop,Z1\n"
      "S2,7,0,TransitStop,Z2\n";
  const char* links =
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "Z1,S1,AccessWalk,2,0,\n"
      "S1,S2,Transit,9,0,only\n"
      "S2,Z2,EgressWalk,2,0,\n";
  const MultimodalNetwork net = MultimodalNetwork::load(
      CsvTable::from_string(nodes, "nodes.csv"),
      CsvTable::from_string(links, "links.csv"),
      CsvTable::from_string("lineId\nonly\n", "lines.csv"),
      CsvTable::from_string("origin,destination,trips\nZ1,Z2,25\n",
                            "demand.csv"));
  DesignConfig cfg;
  cfg.theta = {6.0};
  cfg.omega = {0.01, 10.0};
  cfg.params = uniform_params(net, 0.02);
  CHECK_THROWS_AS(run_classic(net, cfg, BendersConfig{}), DataError);

  // The wait bounds come from an everything-closed worst case, so they
  // refuse such a network too, as does the subproblem itself.
  CHECK_THROWS_AS(design_wait_bounds(net, cfg), SolverError);
  const std::vector<std::vector<double>> wb(
      1, std::vector<double>(net.nodes().size(), 1000.0));
  DesignDecision closed;
  closed.frequency_choice = {-1};
  closed.fleet_choice = {0, 0};
  CHECK_THROWS_AS(solve_subproblem(net, cfg, wb, closed, false), SolverError);
}

}  // TEST_SUITE
