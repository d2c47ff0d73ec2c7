#include <algorithm>
#include <cmath>
#include <string>

#include "doctest.h"
#include "modt/common.hpp"
#include "modt/network.hpp"

using namespace modt;

namespace {

MultimodalNetwork load_csv(const std::string& nodes, const std::string& links,
                           const std::string& lines,
                           const std::string& demand) {
  return MultimodalNetwork::load(CsvTable::from_string(nodes, "nodes.csv"),
                                 CsvTable::from_string(links, "links.csv"),
                                 CsvTable::from_string(lines, "lines.csv"),
                                 CsvTable::from_string(demand, "demand.csv"));
}

const std::string kNoLines = "lineId\n";
const std::string kNoDemand = "origin,destination,trips\n";

// Two zones bridged by one road corridor and one two-stop transit line.
const std::string kMidNodes =
    "nodeId,x,y,kind,zone\n"
    "Z1,0,0,Centroid,Z1\n"
    "Z2,4,0,Centroid,Z2\n"
    "R1,0.2,0,RoadIntersection,Z1\n"
    "R2,3.8,0,RoadIntersection,Z2\n"
    "S1,0.3,0.1,TransitStop,Z1\n"
    "S2,3.7,0.1,TransitStop,Z2\n";
const std::string kMidLinks =
    "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
    "R1,R2,Road,12,0,\n"
    "R2,R1,Road,12,0,\n"
    "S1,S2,Transit,10,0,L1\n"
    "Z1,R1,AccessWalk,4,0,\n"
    "Z1,S1,AccessWalk,6,2,\n"
    "R2,Z2,EgressWalk,4,0,\n"
    "S2,Z2,EgressWalk,6,0,\n";
const std::string kMidLines = "lineId\nL1\n";
const std::string kMidDemand =
    "origin,destination,trips\n"
    "Z1,Z2,10\n";

}  // namespace

TEST_SUITE("network") {

TEST_CASE("minimal two-node network indexes one link") {
  auto net = load_csv(
      "nodeId,x,y,kind,zone\nZ1,0,0,Centroid,Z1\nR1,1,0,RoadIntersection,Z1\n",
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\nZ1,R1,AccessWalk,5,0,\n",
      kNoLines, kNoDemand);
  CHECK(net.nodes().size() == 2);
  CHECK(net.links().size() == 1);
  CHECK(net.fs(net.node_index("Z1")).size() == 1);
  CHECK(net.bs(net.node_index("R1")).size() == 1);
  CHECK(net.fs(net.node_index("R1")).empty());
  CHECK(net.waiting().nodes == std::vector<int>{net.node_index("R1")});
}

TEST_CASE("forward and backward stars partition the link set") {
  auto net = load_csv(kMidNodes, kMidLinks, kMidLines, kMidDemand);
  std::size_t fs_total = 0, bs_total = 0;
  for (std::size_t i = 0; i < net.nodes().size(); ++i) {
    fs_total += net.fs(static_cast<int>(i)).size();
    bs_total += net.bs(static_cast<int>(i)).size();
  }
  CHECK(fs_total == net.links().size());
  CHECK(bs_total == net.links().size());
}

TEST_CASE("loader errors name the offending row") {
  auto expect_error = [](const std::string& links, const std::string& what) {
    try {
      load_csv(kMidNodes, links, kMidLines, kNoDemand);
      FAIL_CHECK("expected DataError for: " << what);
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("links.csv: row") != std::string::npos);
    }
  };
  const std::string header = "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n";
  expect_error(header + "R1,R9,Road,3,0,\n", "dangling node id");
  expect_error(header + "R1,R2,Road,3,0,\nR1,R2,Road,5,0,\n", "duplicate link");
  expect_error(header + "R1,R2,Road,-3,0,\n", "negative travel time");
  expect_error(header + "R1,R2,Road,3,-1,\n", "negative fare");
  expect_error(header + "S1,S2,Transit,3,0,\n", "transit link without line");
  expect_error(header + "R1,R2,Road,3,0,L1\n", "line id on a road link");
  expect_error(header + "S1,S2,Transit,3,0,L9\n", "unknown line id");
  expect_error(header + "R1,S1,Road,3,0,\n", "road link endpoint kinds");
  expect_error(header + "R1,Z1,AccessWalk,3,0,\n", "access direction");
}

TEST_CASE("node table validation") {
  CHECK_THROWS_AS(load_csv("nodeId,x,y,kind,zone\nA,0,0,Centroid,Z1\n"
                           "A,1,0,RoadIntersection,Z1\n",
                           "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n",
                           kNoLines, kNoDemand),
                  DataError);
  CHECK_THROWS_AS(load_csv("nodeId,x,y,kind,zone\nZ1,0,0,Centroid,Z1\n"
                           "Z1b,1,0,Centroid,Z1\n",
                           "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n",
                           kNoLines, kNoDemand),
                  DataError);
  CHECK_THROWS_AS(load_csv("nodeId,x,y,kind,zone\nR1,0,0,RoadIntersection,Z9\n",
                           "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n",
                           kNoLines, kNoDemand),
                  DataError);
}

TEST_CASE("demand folds duplicates and sets intrazonal trips aside") {
  auto net = load_csv(kMidNodes, kMidLinks, kMidLines,
                      "origin,destination,trips\n"
                      "Z1,Z2,10\nZ1,Z2,5\nZ2,Z1,3\nZ1,Z1,7\n");
  CHECK(net.demand().entries.size() == 2);
  CHECK(net.total_trips() == doctest::Approx(18.0));
  CHECK(net.demand().intrazonal_trips == doctest::Approx(7.0));
  CHECK(net.origins().size() == 2);
  CHECK(net.destinations().size() == 2);
  CHECK_THROWS_AS(load_csv(kMidNodes, kMidLinks, kMidLines,
                           "origin,destination,trips\nZ1,Z2,-1\n"),
                  DataError);
  CHECK_THROWS_AS(load_csv(kMidNodes, kMidLinks, kMidLines,
                           "origin,destination,trips\nZ1,R1,5\n"),
                  DataError);
}

TEST_CASE("net supply vector balances to zero per destination") {
  auto net = load_csv(kMidNodes, kMidLinks, kMidLines,
                      "origin,destination,trips\nZ1,Z2,10\nZ2,Z1,4\n");
  for (int k : net.destinations()) {
    const std::vector<double> g = net.g_vector(k);
    double sum = 0.0;
    for (double v : g) sum += v;
    CHECK(sum == doctest::Approx(0.0));
  }
  const std::vector<double> g = net.g_vector(net.node_index("Z2"));
  CHECK(g[net.node_index("Z1")] == doctest::Approx(10.0));
  CHECK(g[net.node_index("Z2")] == doctest::Approx(-10.0));

  double excluded = 0.0;
  std::vector<char> served(net.nodes().size(), 0);
  const std::vector<double> g2 =
      net.g_vector(net.node_index("Z2"), served, &excluded);
  CHECK(excluded == doctest::Approx(10.0));
  CHECK(std::all_of(g2.begin(), g2.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("line path is reconstructed from shuffled link rows") {
  auto net = load_csv(
      "nodeId,x,y,kind,zone\n"
      "Z1,0,0,Centroid,Z1\n"
      "A,0,1,TransitStop,Z1\nB,1,1,TransitStop,Z1\n"
      "C,2,1,TransitStop,Z1\nD,3,1,TransitStop,Z1\n",
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "C,D,Transit,7,0,L1\n"
      "A,B,Transit,5,0,L1\n"
      "B,C,Transit,6,0,L1\n",
      "lineId\nL1\n", kNoDemand);
  const TransitLine& line = net.lines()[0];
  const std::vector<int> want = {net.node_index("A"), net.node_index("B"),
                                 net.node_index("C"), net.node_index("D")};
  CHECK(line.stops == want);
  CHECK(line.one_way_time == doctest::Approx(18.0));
  CHECK(line.links.size() == 3);
}

TEST_CASE("circular line keeps each stop once") {
  auto net = load_csv(
      "nodeId,x,y,kind,zone\n"
      "Z1,0,0,Centroid,Z1\n"
      "A,0,1,TransitStop,Z1\nB,1,1,TransitStop,Z1\nC,1,2,TransitStop,Z1\n",
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "B,C,Transit,4,0,L1\nC,A,Transit,4,0,L1\nA,B,Transit,4,0,L1\n",
      "lineId\nL1\n", kNoDemand);
  CHECK(net.lines()[0].stops.size() == 3);
  CHECK(net.lines()[0].links.size() == 3);
  CHECK(net.lines()[0].one_way_time == doctest::Approx(12.0));
}

TEST_CASE("malformed lines are rejected") {
  const std::string nodes =
      "nodeId,x,y,kind,zone\n"
      "Z1,0,0,Centroid,Z1\n"
      "A,0,1,TransitStop,Z1\nB,1,1,TransitStop,Z1\n"
      "C,2,1,TransitStop,Z1\nD,3,1,TransitStop,Z1\n";
  const std::string header = "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n";
  CHECK_THROWS_AS(load_csv(nodes, header + "A,B,Transit,1,0,L1\nA,C,Transit,1,0,L1\n",
                           "lineId\nL1\n", kNoDemand),
                  DataError);  // branches at A
  CHECK_THROWS_AS(load_csv(nodes, header + "A,B,Transit,1,0,L1\nC,D,Transit,1,0,L1\n",
                           "lineId\nL1\n", kNoDemand),
                  DataError);  // two separate pieces
  CHECK_THROWS_AS(load_csv(nodes, header + "A,B,Transit,1,0,L1\n",
                           "lineId\nL1\nL2\n", kNoDemand),
                  DataError);  // L2 has no links
}

TEST_CASE("walking links from a centroid near one stop and one road node") {
  auto net = load_csv(
      "nodeId,x,y,kind,zone\n"
      "Z1,0,0,Centroid,Z1\n"
      "S1,0.3,0,TransitStop,Z1\n"
      "S2,0.3,0.2,TransitStop,Z1\n"
      "R1,-0.4,0,RoadIntersection,Z1\n",
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "S1,S2,Transit,5,0,L1\n",
      "lineId\nL1\n", kNoDemand);
  net.build_walking_links(0.5, {.boarding_fare = 2.0});

  int access = 0, egress = 0, transfer = 0, mode = 0;
  for (const Link& a : net.links()) {
    switch (a.kind) {
      case LinkKind::AccessWalk: ++access; break;
      case LinkKind::EgressWalk: ++egress; break;
      case LinkKind::TransitTransfer: ++transfer; break;
      case LinkKind::ModeTransfer: ++mode; break;
      default: break;
    }
  }
  // Z1 reaches S1, S2 and R1; S1-S2 are same-line so no transfer; R1 is
  // 0.7-0.73 away from both stops so no mode transfer.
  CHECK(access == 3);
  CHECK(egress == 3);
  CHECK(transfer == 0);
  CHECK(mode == 0);

  for (const Link& a : net.links()) {
    if (a.kind == LinkKind::AccessWalk) {
      const bool to_stop = net.nodes()[a.to].kind == NodeKind::TransitStop;
      CHECK(a.fare == doctest::Approx(to_stop ? 2.0 : 0.0));
    }
  }
  // 0.3 miles at 3 mph is a 6 minute walk.
  const int s1 = net.node_index("S1");
  for (const Link& a : net.links())
    if (a.kind == LinkKind::AccessWalk && a.to == s1)
      CHECK(a.travel_time == doctest::Approx(6.0));
}

TEST_CASE("transfer links require distinct lines within reach") {
  auto net = load_csv(
      "nodeId,x,y,kind,zone\n"
      "Z1,0,0,Centroid,Z1\n"
      "A1,2,0,TransitStop,Z1\nA2,3,0,TransitStop,Z1\n"
      "B1,2,0.4,TransitStop,Z1\nB2,3,0.4,TransitStop,Z1\n",
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "A1,A2,Transit,5,0,LA\n"
      "B1,B2,Transit,5,0,LB\n",
      "lineId\nLA\nLB\n", kNoDemand);
  net.build_walking_links(0.5);

  std::vector<std::pair<int, int>> transfers;
  for (const Link& a : net.links())
    if (a.kind == LinkKind::TransitTransfer) transfers.emplace_back(a.from, a.to);
  // A1<->B1 and A2<->B2 are 0.4 apart across lines; the 1.0 diagonal pairs
  // are out of reach, and A1-A2 / B1-B2 are same-line.
  CHECK(transfers.size() == 4);
  auto has = [&](const char* f, const char* t) {
    return std::count(transfers.begin(), transfers.end(),
                      std::make_pair(net.node_index(f), net.node_index(t))) == 1;
  };
  CHECK(has("A1", "B1"));
  CHECK(has("B1", "A1"));
  CHECK(has("A2", "B2"));
  CHECK(has("B2", "A2"));
}

TEST_CASE("walking construction is idempotent and access egress symmetric") {
  auto net = load_csv(kMidNodes, kMidLinks, kMidLines, kMidDemand);
  net.build_walking_links(0.5);
  const std::size_t once = net.links().size();
  net.build_walking_links(0.5);
  CHECK(net.links().size() == once);

  for (const Link& a : net.links()) {
    if (a.kind == LinkKind::AccessWalk) {
      const bool back = std::any_of(
          net.links().begin(), net.links().end(), [&](const Link& b) {
            return b.kind == LinkKind::EgressWalk && b.from == a.to &&
                   b.to == a.from;
          });
      CHECK(back);
    }
  }
}

TEST_CASE("generalized cost converts fares at the value of time") {
  Link a;
  a.travel_time = 10.0;
  CHECK(link_cost(a, 23.0) == doctest::Approx(10.0));
  a.travel_time = 0.0;
  a.fare = 2.0;
  CHECK(link_cost(a, 23.0) == doctest::Approx(2.0 / 23.0 * 60.0));
  a.travel_time = 5.0;
  a.fare = 0.21 * 5.0 + 0.8;
  CHECK(link_cost(a, 23.0) == doctest::Approx(5.0 + 1.85 / 23.0 * 60.0));
  CHECK_THROWS_AS(link_cost(a, 0.0), DataError);
}

TEST_CASE("ride fares land on road links that leave a waiting node") {
  auto net = load_csv(
      "nodeId,x,y,kind,zone\n"
      "Z1,0,0,Centroid,Z1\n"
      "R1,0.2,0,RoadIntersection,Z1\n"
      "R2,1,0,RoadIntersection,Z1\n"
      "R3,2,0,RoadIntersection,Z1\n",
      "fromNodeId,toNodeId,kind,travelTime,fare,lineId\n"
      "Z1,R1,AccessWalk,4,0,\n"
      "R1,R2,Road,6,0,\n"
      "R2,R3,Road,8,0,\n"
      "R3,Z1,EgressWalk,4,0,\n",
      kNoLines, kNoDemand);
  net.attach_mod_fares(0.21, 0.8);
  auto fare_of = [&](const char* f, const char* t) {
    for (const Link& a : net.links())
      if (a.from == net.node_index(f) && a.to == net.node_index(t))
        return a.fare;
    return -1.0;
  };
  CHECK(fare_of("R1", "R2") == doctest::Approx(0.21 * 6.0 + 0.8));
  CHECK(fare_of("R2", "R3") == doctest::Approx(0.21 * 8.0));
  CHECK(fare_of("Z1", "R1") == doctest::Approx(0.0));
}

TEST_CASE("road connectivity gate") {
  auto net = load_csv(kMidNodes, kMidLinks, kMidLines, kMidDemand);
  SUBCASE("corridor without return road fails the all-nodes rule") {
    // S1 can only leave via its line, so it cannot reach Z2 off-transit.
    CHECK_FALSE(net.road_connected());
  }
  SUBCASE("full walking closure makes it pass") {
    net.build_walking_links(10.0);  // everything within reach of everything
    CHECK(net.road_connected());
  }
}

TEST_CASE("reachability respects the enabled link kinds") {
  auto net = load_csv(kMidNodes, kMidLinks, kMidLines, kMidDemand);
  std::vector<char> walk_and_transit(6, 1);
  walk_and_transit[static_cast<int>(LinkKind::Road)] = 0;
  const int z2 = net.node_index("Z2");
  auto mark = net.reaches(z2, walk_and_transit);
  CHECK(mark[net.node_index("Z1")] == 1);   // via S1-S2
  CHECK(mark[net.node_index("R1")] == 0);   // road link disabled

  std::vector<char> nothing(6, 0);
  auto mark2 = net.reaches(z2, nothing);
  CHECK(mark2[z2] == 1);
  CHECK(mark2[net.node_index("Z1")] == 0);
}

TEST_CASE("waiting nodes are heads of access transfer and mode links") {
  auto net = load_csv(kMidNodes, kMidLinks, kMidLines, kMidDemand);
  CHECK(net.is_waiting(net.node_index("R1")));
  CHECK(net.is_waiting(net.node_index("S1")));
  CHECK_FALSE(net.is_waiting(net.node_index("S2")));  // only egress leaves it
  CHECK_FALSE(net.is_waiting(net.node_index("Z1")));
  CHECK_FALSE(net.is_waiting(net.node_index("Z2")));
  CHECK(std::is_sorted(net.waiting().nodes.begin(), net.waiting().nodes.end()));
}

TEST_CASE("distance override table wins over coordinates") {
  auto net = load_csv(kMidNodes, kMidLinks, kMidLines, kMidDemand);
  DistanceTable table;
  const int z1 = net.node_index("Z1");
  const int s1 = net.node_index("S1");
  table.set(z1, s1, 0.1);
  CHECK(net.distance(z1, s1, &table) == doctest::Approx(0.1));
  CHECK(net.distance(s1, z1, &table) == doctest::Approx(0.1));
  CHECK(net.distance(z1, s1) ==
        doctest::Approx(std::hypot(0.3, 0.1)));
}

}  // TEST_SUITE
