#include "modt/network.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "modt/common.hpp"

namespace modt {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::RoadIntersection: return "RoadIntersection";
    case NodeKind::TransitStop: return "TransitStop";
    case NodeKind::Centroid: return "Centroid";
  }
  return "?";
}

const char* to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::Transit: return "Transit";
    case LinkKind::Road: return "Road";
    case LinkKind::AccessWalk: return "AccessWalk";
    case LinkKind::EgressWalk: return "EgressWalk";
    case LinkKind::TransitTransfer: return "TransitTransfer";
    case LinkKind::ModeTransfer: return "ModeTransfer";
  }
  return "?";
}

NodeKind parse_node_kind(const std::string& text) {
  if (text == "RoadIntersection") return NodeKind::RoadIntersection;
  if (text == "TransitStop") return NodeKind::TransitStop;
  if (text == "Centroid") return NodeKind::Centroid;
  throw DataError("unknown node kind '" + text + "'");
}

LinkKind parse_link_kind(const std::string& text) {
  if (text == "Transit") return LinkKind::Transit;
  if (text == "Road") return LinkKind::Road;
  if (text == "AccessWalk") return LinkKind::AccessWalk;
  if (text == "EgressWalk") return LinkKind::EgressWalk;
  if (text == "TransitTransfer") return LinkKind::TransitTransfer;
  if (text == "ModeTransfer") return LinkKind::ModeTransfer;
  throw DataError("unknown link kind '" + text + "'");
}

double link_cost(const Link& link, double value_of_time) {
  if (value_of_time <= 0.0) throw DataError("value of time must be positive");
  return link.travel_time + link.fare / value_of_time * 60.0;
}

void DistanceTable::set(int a, int b, double distance) {
  if (distance < 0.0) throw DataError("distance override must be nonnegative");
  auto key = [](int i, int j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
  };
  entries_[key(a, b)] = distance;
  entries_[key(b, a)] = distance;
}

bool DistanceTable::lookup(int a, int b, double* out) const {
  auto it = entries_.find(
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
      static_cast<std::uint32_t>(b));
  if (it == entries_.end()) return false;
  *out = it->second;
  return true;
}

namespace {

std::string row_tag(const CsvTable& t, std::size_t row) {
  return t.name() + ": row " + std::to_string(row + 2);
}

bool parse_flag(const std::string& text, const std::string& where) {
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw DataError(where + ": unreadable flag '" + text + "'");
}

}  // namespace

MultimodalNetwork MultimodalNetwork::load(const CsvTable& node_table,
                                          const CsvTable& link_table,
                                          const CsvTable& line_table,
                                          const CsvTable& demand_table) {
  MultimodalNetwork net;

  for (std::size_t r = 0; r < node_table.rows(); ++r) {
    Node n;
    n.id = node_table.cell(r, "nodeId");
    if (n.id.empty())
      throw DataError(row_tag(node_table, r) + ": empty nodeId");
    if (net.node_index_.count(n.id))
      throw DataError(row_tag(node_table, r) + ": duplicate nodeId '" + n.id +
                      "'");
    n.x = node_table.num(r, "x");
    n.y = node_table.num(r, "y");
    n.kind = [&] {
      try {
        return parse_node_kind(node_table.cell(r, "kind"));
      } catch (const DataError& e) {
        throw DataError(row_tag(node_table, r) + ": " + e.what());
      }
    }();
    const std::string zone_id = node_table.cell(r, "zone");
    if (zone_id.empty())
      throw DataError(row_tag(node_table, r) + ": node '" + n.id +
                      "' has no zone");
    if (n.kind == NodeKind::Centroid) {
      auto [it, inserted] =
          net.zone_index_.try_emplace(zone_id, static_cast<int>(net.zones_.size()));
      if (inserted) net.zones_.push_back({zone_id, -1});
      Zone& z = net.zones_[it->second];
      if (z.centroid >= 0)
        throw DataError(row_tag(node_table, r) + ": zone '" + zone_id +
                        "' has two centroids");
      z.centroid = static_cast<int>(net.nodes_.size());
      n.zone = it->second;
    }
    net.node_index_[n.id] = static_cast<int>(net.nodes_.size());
    net.nodes_.push_back(std::move(n));
  }

  // Non-centroid zone references resolve only against zones that a centroid
  // declared; vehicle fleets are decided per such zone.
  for (std::size_t r = 0; r < node_table.rows(); ++r) {
    Node& n = net.nodes_[r];
    if (n.zone >= 0) continue;
    const std::string zone_id = node_table.cell(r, "zone");
    auto it = net.zone_index_.find(zone_id);
    if (it == net.zone_index_.end())
      throw DataError(row_tag(node_table, r) + ": zone '" + zone_id +
                      "' has no centroid");
    n.zone = it->second;
  }

  for (std::size_t r = 0; r < line_table.rows(); ++r) {
    TransitLine line;
    line.id = line_table.cell(r, "lineId");
    if (line.id.empty())
      throw DataError(row_tag(line_table, r) + ": empty lineId");
    if (net.line_index_.count(line.id))
      throw DataError(row_tag(line_table, r) + ": duplicate lineId '" +
                      line.id + "'");
    if (line_table.has_column("candidate"))
      line.candidate = parse_flag(line_table.cell(r, "candidate"),
                                  row_tag(line_table, r));
    net.line_index_[line.id] = static_cast<int>(net.lines_.size());
    net.lines_.push_back(std::move(line));
  }

  std::unordered_set<std::string> link_keys;
  std::vector<std::size_t> link_rows;
  for (std::size_t r = 0; r < link_table.rows(); ++r) {
    Link a;
    auto endpoint = [&](const char* col) {
      const std::string id = link_table.cell(r, col);
      auto it = net.node_index_.find(id);
      if (it == net.node_index_.end())
        throw DataError(row_tag(link_table, r) + ": unknown node '" + id +
                        "'");
      return it->second;
    };
    a.from = endpoint("fromNodeId");
    a.to = endpoint("toNodeId");
    a.kind = [&] {
      try {
        return parse_link_kind(link_table.cell(r, "kind"));
      } catch (const DataError& e) {
        throw DataError(row_tag(link_table, r) + ": " + e.what());
      }
    }();
    a.travel_time = link_table.num(r, "travelTime");
    if (a.travel_time < 0.0)
      throw DataError(row_tag(link_table, r) + ": negative travel time");
    a.fare = link_table.num(r, "fare");
    if (a.fare < 0.0)
      throw DataError(row_tag(link_table, r) + ": negative fare");
    const std::string line_id = link_table.cell(r, "lineId");
    if (a.kind == LinkKind::Transit) {
      if (line_id.empty())
        throw DataError(row_tag(link_table, r) +
                        ": transit link without lineId");
      auto it = net.line_index_.find(line_id);
      if (it == net.line_index_.end())
        throw DataError(row_tag(link_table, r) + ": unknown lineId '" +
                        line_id + "'");
      a.line = it->second;
    } else if (!line_id.empty()) {
      throw DataError(row_tag(link_table, r) + ": lineId set on a " +
                      std::string(to_string(a.kind)) + " link");
    }
    const std::string key = std::to_string(a.from) + "|" +
                            std::to_string(a.to) + "|" +
                            std::to_string(static_cast<int>(a.kind)) + "|" +
                            std::to_string(a.line);
    if (!link_keys.insert(key).second)
      throw DataError(row_tag(link_table, r) + ": duplicate link");
    link_rows.push_back(r);
    net.links_.push_back(a);
  }

  // Endpoint-kind rules, while row numbers are still known and before any
  // derived structure (line paths, stars) can fail first.
  std::unordered_map<int, std::vector<int>> lines_at;
  for (const Link& a : net.links_) {
    if (a.kind != LinkKind::Transit) continue;
    for (int node : {a.from, a.to}) {
      auto& ls = lines_at[node];
      if (std::find(ls.begin(), ls.end(), a.line) == ls.end())
        ls.push_back(a.line);
    }
  }
  for (std::size_t i = 0; i < net.links_.size(); ++i) {
    const Link& a = net.links_[i];
    const NodeKind from = net.nodes_[a.from].kind;
    const NodeKind to = net.nodes_[a.to].kind;
    const std::string where = row_tag(link_table, link_rows[i]);
    auto expect = [&](bool ok, const char* what) {
      if (!ok)
        throw DataError(where + ": " + std::string(to_string(a.kind)) +
                        " link must connect " + what);
    };
    switch (a.kind) {
      case LinkKind::Transit:
        expect(from == NodeKind::TransitStop && to == NodeKind::TransitStop,
               "transit stops");
        break;
      case LinkKind::Road:
        expect(from == NodeKind::RoadIntersection &&
                   to == NodeKind::RoadIntersection,
               "road intersections");
        break;
      case LinkKind::AccessWalk:
        expect(from == NodeKind::Centroid && to != NodeKind::Centroid,
               "a centroid to a stop or road node");
        break;
      case LinkKind::EgressWalk:
        expect(from != NodeKind::Centroid && to == NodeKind::Centroid,
               "a stop or road node to a centroid");
        break;
      case LinkKind::TransitTransfer: {
        expect(from == NodeKind::TransitStop && to == NodeKind::TransitStop,
               "transit stops");
        const auto& l1 = lines_at[a.from];
        const auto& l2 = lines_at[a.to];
        const bool distinct =
            !l1.empty() && !l2.empty() &&
            !(l1.size() == 1 && l2.size() == 1 && l1[0] == l2[0]);
        if (a.from == a.to || !distinct)
          throw DataError(where +
                          ": transfer link must connect stops of distinct "
                          "lines");
        break;
      }
      case LinkKind::ModeTransfer:
        expect((from == NodeKind::RoadIntersection &&
                to == NodeKind::TransitStop) ||
                   (from == NodeKind::TransitStop &&
                    to == NodeKind::RoadIntersection),
               "a road node and a transit stop");
        break;
    }
  }

  net.index_links();

  std::unordered_map<std::uint64_t, std::size_t> od_seen;
  for (std::size_t r = 0; r < demand_table.rows(); ++r) {
    auto centroid = [&](const char* col) {
      const std::string id = demand_table.cell(r, col);
      if (auto it = net.zone_index_.find(id); it != net.zone_index_.end())
        return net.zones_[it->second].centroid;
      if (auto it = net.node_index_.find(id); it != net.node_index_.end()) {
        if (net.nodes_[it->second].kind != NodeKind::Centroid)
          throw DataError(row_tag(demand_table, r) + ": '" + id +
                          "' is not a centroid");
        return it->second;
      }
      throw DataError(row_tag(demand_table, r) + ": unknown zone '" + id +
                      "'");
    };
    const int o = centroid("origin");
    const int d = centroid("destination");
    const double trips = demand_table.num(r, "trips");
    if (trips < 0.0)
      throw DataError(row_tag(demand_table, r) + ": negative trips");
    if (trips == 0.0) continue;
    if (o == d) {
      net.demand_.intrazonal_trips += trips;
      continue;
    }
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(o)) << 32) |
        static_cast<std::uint32_t>(d);
    if (auto it = od_seen.find(key); it != od_seen.end()) {
      net.demand_.entries[it->second].trips += trips;
    } else {
      od_seen[key] = net.demand_.entries.size();
      net.demand_.entries.push_back({o, d, trips});
    }
  }
  for (const DemandEntry& e : net.demand_.entries) {
    net.total_trips_ += e.trips;
    net.destinations_.push_back(e.destination);
    net.origins_.push_back(e.origin);
  }
  auto dedupe = [](std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(net.destinations_);
  dedupe(net.origins_);

  return net;
}

MultimodalNetwork MultimodalNetwork::load_dir(const std::string& dir) {
  return load(CsvTable::read_file(dir + "/nodes.csv"),
              CsvTable::read_file(dir + "/links.csv"),
              CsvTable::read_file(dir + "/lines.csv"),
              CsvTable::read_file(dir + "/demand.csv"));
}

int MultimodalNetwork::node_index(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end())
    throw DataError("unknown node id '" + id + "'");
  return it->second;
}

int MultimodalNetwork::line_index(const std::string& id) const {
  auto it = line_index_.find(id);
  if (it == line_index_.end())
    throw DataError("unknown line id '" + id + "'");
  return it->second;
}

int MultimodalNetwork::zone_index(const std::string& id) const {
  auto it = zone_index_.find(id);
  if (it == zone_index_.end())
    throw DataError("unknown zone id '" + id + "'");
  return it->second;
}

void MultimodalNetwork::index_links() {
  const int n = static_cast<int>(nodes_.size());
  fs_.assign(n, {});
  bs_.assign(n, {});
  node_lines_.assign(n, {});
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& a = links_[i];
    fs_[a.from].push_back(static_cast<int>(i));
    bs_[a.to].push_back(static_cast<int>(i));
    if (a.kind == LinkKind::Transit) {
      for (int node : {a.from, a.to}) {
        auto& ls = node_lines_[node];
        if (std::find(ls.begin(), ls.end(), a.line) == ls.end())
          ls.push_back(a.line);
      }
    }
  }
  for (auto& ls : node_lines_) std::sort(ls.begin(), ls.end());

  waiting_.member.assign(n, 0);
  for (const Link& a : links_) {
    if (a.kind == LinkKind::AccessWalk || a.kind == LinkKind::TransitTransfer ||
        a.kind == LinkKind::ModeTransfer)
      waiting_.member[a.to] = 1;
  }
  waiting_.nodes.clear();
  for (int i = 0; i < n; ++i)
    if (waiting_.member[i]) waiting_.nodes.push_back(i);

  rebuild_line_paths();
}

void MultimodalNetwork::rebuild_line_paths() {
  for (auto& line : lines_) {
    line.stops.clear();
    line.links.clear();
    line.one_way_time = 0.0;
  }
  std::vector<std::vector<int>> by_line(lines_.size());
  for (std::size_t i = 0; i < links_.size(); ++i)
    if (links_[i].kind == LinkKind::Transit)
      by_line[links_[i].line].push_back(static_cast<int>(i));

  for (std::size_t l = 0; l < lines_.size(); ++l) {
    TransitLine& line = lines_[l];
    if (by_line[l].empty())
      throw DataError("line '" + line.id + "' has no transit links");
    std::unordered_map<int, int> next;   // node -> departing link
    std::unordered_map<int, int> indeg;
    for (int a : by_line[l]) {
      if (!next.emplace(links_[a].from, a).second)
        throw DataError("line '" + line.id + "' branches at node '" +
                        nodes_[links_[a].from].id + "'");
      if (++indeg[links_[a].to] > 1)
        throw DataError("line '" + line.id + "' merges at node '" +
                        nodes_[links_[a].to].id + "'");
    }
    int start = -1;
    for (int a : by_line[l]) {
      const int tail = links_[a].from;
      if (!indeg.count(tail) && (start < 0 || tail < start)) start = tail;
    }
    if (start < 0) {  // closed loop: start at the smallest node for stability
      start = links_[by_line[l][0]].from;
      for (int a : by_line[l]) start = std::min(start, links_[a].from);
    }
    int at = start;
    while (true) {
      auto it = next.find(at);
      if (it == next.end()) break;
      const int a = it->second;
      next.erase(it);
      line.links.push_back(a);
      line.stops.push_back(at);
      line.one_way_time += links_[a].travel_time;
      at = links_[a].to;
      if (at == start) break;
    }
    if (at != start) line.stops.push_back(at);
    if (line.links.size() != by_line[l].size())
      throw DataError("line '" + line.id + "' is not a single path");
  }
}

std::vector<double> MultimodalNetwork::g_vector(int k) const {
  return g_vector(k, {}, nullptr);
}

std::vector<double> MultimodalNetwork::g_vector(
    int k, const std::vector<char>& origin_served,
    double* excluded_trips) const {
  std::vector<double> g(nodes_.size(), 0.0);
  for (const DemandEntry& e : demand_.entries) {
    if (e.destination != k) continue;
    if (!origin_served.empty() && !origin_served[e.origin]) {
      if (excluded_trips) *excluded_trips += e.trips;
      continue;
    }
    g[e.origin] += e.trips;
    g[k] -= e.trips;
  }
  return g;
}

std::vector<char> MultimodalNetwork::reaches(
    int k, const std::vector<char>& kind_enabled) const {
  std::vector<char> mark(nodes_.size(), 0);
  std::vector<int> stack{k};
  mark[k] = 1;
  while (!stack.empty()) {
    const int at = stack.back();
    stack.pop_back();
    for (int a : bs_[at]) {
      if (!kind_enabled[static_cast<int>(links_[a].kind)]) continue;
      const int tail = links_[a].from;
      if (!mark[tail]) {
        mark[tail] = 1;
        stack.push_back(tail);
      }
    }
  }
  return mark;
}

bool MultimodalNetwork::road_connected() const {
  std::vector<char> enabled(6, 1);
  enabled[static_cast<int>(LinkKind::Transit)] = 0;
  for (int k : destinations_) {
    const std::vector<char> mark = reaches(k, enabled);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!mark[i]) return false;
  }
  return true;
}

double MultimodalNetwork::distance(int a, int b,
                                   const DistanceTable* table) const {
  double d;
  if (table && table->lookup(a, b, &d)) return d;
  return std::hypot(nodes_[a].x - nodes_[b].x, nodes_[a].y - nodes_[b].y);
}

int MultimodalNetwork::add_walk_link(int from, int to, LinkKind kind,
                                     double time, double fare) {
  Link a;
  a.from = from;
  a.to = to;
  a.kind = kind;
  a.travel_time = time;
  a.fare = fare;
  links_.push_back(a);
  return static_cast<int>(links_.size()) - 1;
}

void MultimodalNetwork::build_walking_links(double zeta,
                                            const WalkOptions& opt) {
  if (zeta <= 0.0) throw DataError("walking threshold must be positive");
  if (opt.speed_mph <= 0.0) throw DataError("walk speed must be positive");

  std::vector<int> stops, roads, centroids;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    switch (nodes_[i].kind) {
      case NodeKind::TransitStop: stops.push_back(static_cast<int>(i)); break;
      case NodeKind::RoadIntersection: roads.push_back(static_cast<int>(i)); break;
      case NodeKind::Centroid: centroids.push_back(static_cast<int>(i)); break;
    }
  }
  const std::uint64_t n = nodes_.size();
  auto pack = [n](int from, int to, LinkKind kind) {
    return (static_cast<std::uint64_t>(static_cast<int>(kind)) * n + from) * n +
           to;
  };
  std::unordered_set<std::uint64_t> have;
  for (const Link& a : links_) have.insert(pack(a.from, a.to, a.kind));
  auto emit = [&](int from, int to, LinkKind kind, double dist, double fare) {
    if (!have.insert(pack(from, to, kind)).second) return;
    add_walk_link(from, to, kind, dist / opt.speed_mph * 60.0, fare);
  };
  auto near = [&](int a, int b, double* d) {
    *d = distance(a, b, opt.distances);
    return *d <= zeta;
  };

  double d;
  for (int z : centroids) {
    for (int s : stops)
      if (near(z, s, &d)) emit(z, s, LinkKind::AccessWalk, d, opt.boarding_fare);
    for (int r : roads)
      if (near(z, r, &d)) emit(z, r, LinkKind::AccessWalk, d, 0.0);
  }
  for (int z : centroids) {
    for (int s : stops)
      if (near(s, z, &d)) emit(s, z, LinkKind::EgressWalk, d, 0.0);
    for (int r : roads)
      if (near(r, z, &d)) emit(r, z, LinkKind::EgressWalk, d, 0.0);
  }
  for (int r : roads)
    for (int s : stops)
      if (near(r, s, &d)) {
        emit(r, s, LinkKind::ModeTransfer, d, opt.boarding_fare);
        emit(s, r, LinkKind::ModeTransfer, d, 0.0);
      }
  for (int s1 : stops)
    for (int s2 : stops) {
      if (s1 == s2) continue;
      const auto& l1 = node_lines_[s1];
      const auto& l2 = node_lines_[s2];
      if (l1.empty() || l2.empty()) continue;
      if (l1.size() == 1 && l2.size() == 1 && l1[0] == l2[0]) continue;
      if (near(s1, s2, &d))
        emit(s1, s2, LinkKind::TransitTransfer, d, opt.boarding_fare);
    }

  index_links();
}

void MultimodalNetwork::attach_mod_fares(double fare_per_minute,
                                         double base_fare) {
  for (Link& a : links_) {
    if (a.kind != LinkKind::Road) continue;
    a.fare += fare_per_minute * a.travel_time;
    if (is_waiting(a.from)) a.fare += base_fare;
  }
}

std::vector<double> MultimodalNetwork::costs(double value_of_time) const {
  std::vector<double> c(links_.size());
  for (std::size_t i = 0; i < links_.size(); ++i)
    c[i] = link_cost(links_[i], value_of_time);
  return c;
}

}  // namespace modt
