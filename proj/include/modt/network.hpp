#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "modt/csv.hpp"

namespace modt {

enum class NodeKind { RoadIntersection, TransitStop, Centroid };
enum class LinkKind {
  Transit,
  Road,
  AccessWalk,
  EgressWalk,
  TransitTransfer,
  ModeTransfer
};

const char* to_string(NodeKind kind);
const char* to_string(LinkKind kind);
NodeKind parse_node_kind(const std::string& text);
LinkKind parse_link_kind(const std::string& text);

inline bool is_walk(LinkKind kind) {
  return kind == LinkKind::AccessWalk || kind == LinkKind::EgressWalk ||
         kind == LinkKind::TransitTransfer || kind == LinkKind::ModeTransfer;
}

struct Node {
  std::string id;
  NodeKind kind = NodeKind::RoadIntersection;
  double x = 0.0;
  double y = 0.0;
  int zone = -1;
};

struct Link {
  int from = -1;
  int to = -1;
  LinkKind kind = LinkKind::Road;
  double travel_time = 0.0;  // minutes
  double fare = 0.0;         // currency
  int line = -1;             // transit links only
};

struct TransitLine {
  std::string id;
  bool candidate = true;
  std::vector<int> stops;   // node indices in service order
  std::vector<int> links;   // link indices in service order
  double one_way_time = 0.0;  // minutes
};

struct Zone {
  std::string id;
  int centroid = -1;  // node index
};

struct DemandEntry {
  int origin = -1;       // centroid node index
  int destination = -1;  // centroid node index
  double trips = 0.0;
};

// Trip table between zone centroids.  Same-zone trips never enter the flow
// balance (their net supply would not cancel) and are kept aside as a count.
struct DemandMatrix {
  std::vector<DemandEntry> entries;
  double intrazonal_trips = 0.0;
};

// Nodes where passengers wait for a vehicle: heads of access, transit
// transfer, and mode transfer links.
struct WaitingNodeSet {
  std::vector<int> nodes;     // sorted node indices
  std::vector<char> member;   // by node index
};

// Optional override for pairwise walking distances; pairs not present fall
// back to the Euclidean distance between node coordinates.
class DistanceTable {
 public:
  void set(int a, int b, double distance);
  bool lookup(int a, int b, double* out) const;

 private:
  std::unordered_map<std::uint64_t, double> entries_;
};

struct WalkOptions {
  double speed_mph = 3.0;
  // Flat fare stamped on generated walking links that end at a transit stop,
  // charging each transit boarding exactly once (every boarding is preceded
  // by one walk into the stop; through riders never leave the vehicle).
  double boarding_fare = 0.0;
  const DistanceTable* distances = nullptr;
};

// Generalized cost in minutes: travel time plus fare converted at the value
// of time (currency per hour).
double link_cost(const Link& link, double value_of_time);

class MultimodalNetwork {
 public:
  static MultimodalNetwork load(const CsvTable& nodes, const CsvTable& links,
                                const CsvTable& lines, const CsvTable& demand);
  // Reads nodes.csv, links.csv, lines.csv, demand.csv from a directory.
  static MultimodalNetwork load_dir(const std::string& dir);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<TransitLine>& lines() const { return lines_; }
  const std::vector<Zone>& zones() const { return zones_; }
  const DemandMatrix& demand() const { return demand_; }

  int node_index(const std::string& id) const;  // throws DataError if absent
  int line_index(const std::string& id) const;
  int zone_index(const std::string& id) const;

  const std::vector<int>& fs(int node) const { return fs_[node]; }
  const std::vector<int>& bs(int node) const { return bs_[node]; }

  const WaitingNodeSet& waiting() const { return waiting_; }
  bool is_waiting(int node) const { return waiting_.member[node] != 0; }

  // Demand destinations / origins as sorted centroid node indices.
  const std::vector<int>& destinations() const { return destinations_; }
  const std::vector<int>& origins() const { return origins_; }
  double total_trips() const { return total_trips_; }

  // Net supply vector g for destination k over all nodes: demand toward k at
  // each origin, minus the total at k itself, zero elsewhere.  Entries whose
  // origin is marked unserved are skipped and their trips accumulated.
  std::vector<double> g_vector(int k) const;
  std::vector<double> g_vector(int k, const std::vector<char>& origin_served,
                               double* excluded_trips) const;

  // Marks nodes that can reach k using only links whose kind is enabled.
  std::vector<char> reaches(int k, const std::vector<char>& kind_enabled) const;

  // True when every node can reach every demand destination through links
  // that exist regardless of the design (road and walking layers).  Gate for
  // the decomposition: it guarantees feasible flows for any design.
  bool road_connected() const;

  // Emits access, egress, mode transfer, and stop-to-stop transfer links for
  // all pairs within walking distance zeta.  Links already present are kept
  // as-is, so the construction is idempotent and respects hand-written data.
  void build_walking_links(double zeta, const WalkOptions& opt = {});

  // Folds the distance-based fare into every road link and stamps the base
  // fare on road links leaving a waiting node (where rides begin).  Call
  // once, after all walking links exist.
  void attach_mod_fares(double fare_per_minute, double base_fare);

  double distance(int a, int b, const DistanceTable* table = nullptr) const;
  double cost(int link, double value_of_time) const {
    return link_cost(links_[link], value_of_time);
  }
  std::vector<double> costs(double value_of_time) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<TransitLine> lines_;
  std::vector<Zone> zones_;
  DemandMatrix demand_;

  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> line_index_;
  std::unordered_map<std::string, int> zone_index_;

  std::vector<std::vector<int>> fs_;
  std::vector<std::vector<int>> bs_;
  WaitingNodeSet waiting_;
  std::vector<std::vector<int>> node_lines_;  // line indices touching a node
  std::vector<int> destinations_;
  std::vector<int> origins_;
  double total_trips_ = 0.0;

  void index_links();  // rebuilds stars, waiting set, line paths
  void rebuild_line_paths();
  void validate_links() const;
  int add_walk_link(int from, int to, LinkKind kind, double time, double fare);
};

}  // namespace modt
