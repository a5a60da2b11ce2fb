#pragma once
// Directed multiplex ego-networks and the overlap measure: the share of an
// ego's interactions whose alter is tied to the ego in more than one
// (domain, direction) layer.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace coopnet::net {

enum class Direction { give, get, joint };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct Tie {
  std::string ego_id;
  std::string alter_id;
  std::string domain;
  Direction direction = Direction::give;

  friend bool operator<(const Tie& a, const Tie& b) {
    return std::tie(a.ego_id, a.alter_id, a.domain, a.direction) <
           std::tie(b.ego_id, b.alter_id, b.domain, b.direction);
  }
  friend bool operator==(const Tie& a, const Tie& b) {
    return std::tie(a.ego_id, a.alter_id, a.domain, a.direction) ==
           std::tie(b.ego_id, b.alter_id, b.domain, b.direction);
  }
};

struct MultiplexEgoNetwork {
  std::string ego_id;
  std::vector<Tie> ties;           // deduplicated, sorted
  std::set<std::string> domains;   // union of tie domains
};

struct OverlapScore {
  double value = 0.0;
  long n_interactions = 0;
  long n_multidomain = 0;
  bool undefined = false;  // ego had no interactions; value reported as 0
};

// Deduplicates ties; rejects self-ties, empty domains and ego mismatches.
MultiplexEgoNetwork build_network(const std::string& ego_id, const std::vector<Tie>& ties);

// One interaction per (alter, domain, direction) tie; an interaction is
// multidomain iff its alter appears under more than one distinct
// (domain, direction) pair.
OverlapScore individual_overlap(const MultiplexEgoNetwork& net);

// Unweighted mean of individual overlap per village (sampled egos only).
// Every scored person must appear in village_of; empty villages are absent.
std::map<std::string, double> village_overlap(
    const std::vector<std::pair<std::string, OverlapScore>>& scores,
    const std::map<std::string, std::string>& village_of);

// edges.csv: header exactly `ego_id,alter_id,domain,direction`.
std::vector<Tie> read_edges_csv(const std::string& path);

// Groups ties by ego and builds one network each.
std::map<std::string, MultiplexEgoNetwork> build_networks(const std::vector<Tie>& ties);

}  // namespace coopnet::net
