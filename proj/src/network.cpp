#include "coopnet/network.hpp"

#include <algorithm>
#include <stdexcept>

#include "coopnet/csv.hpp"

namespace coopnet::net {

std::string to_string(Direction d) {
  switch (d) {
    case Direction::give: return "give";
    case Direction::get: return "get";
    case Direction::joint: return "joint";
  }
  return "?";
}

Direction direction_from_string(const std::string& s) {
  if (s == "give") return Direction::give;
  if (s == "get") return Direction::get;
  if (s == "joint") return Direction::joint;
  throw std::invalid_argument("unknown direction `" + s + "`, expected give|get|joint");
}

MultiplexEgoNetwork build_network(const std::string& ego_id, const std::vector<Tie>& ties) {
  MultiplexEgoNetwork net;
  net.ego_id = ego_id;
  for (const Tie& t : ties) {
    if (t.ego_id != ego_id)
      throw std::invalid_argument("ego mismatch: tie (" + t.ego_id + "," + t.alter_id + "," +
                                  t.domain + "," + to_string(t.direction) +
                                  ") does not belong to ego " + ego_id);
    if (t.alter_id == t.ego_id)
      throw std::invalid_argument("self-tie rejected: ego " + ego_id + " in domain " + t.domain);
    if (t.domain.empty())
      throw std::invalid_argument("empty domain label on tie of ego " + ego_id + " to " + t.alter_id);
  }
  net.ties = ties;
  std::sort(net.ties.begin(), net.ties.end());
  net.ties.erase(std::unique(net.ties.begin(), net.ties.end()), net.ties.end());
  for (const Tie& t : net.ties) net.domains.insert(t.domain);
  return net;
}

OverlapScore individual_overlap(const MultiplexEgoNetwork& net) {
  // layers per alter = count of distinct (domain, direction) pairs;
  // ties are already unique, so each tie is one layer of its alter
  std::map<std::string, long> layers_per_alter;
  for (const Tie& t : net.ties) ++layers_per_alter[t.alter_id];

  OverlapScore score;
  score.n_interactions = static_cast<long>(net.ties.size());
  for (const Tie& t : net.ties)
    if (layers_per_alter[t.alter_id] > 1) ++score.n_multidomain;
  if (score.n_interactions == 0) {
    score.undefined = true;
    score.value = 0.0;
  } else {
    score.value = static_cast<double>(score.n_multidomain) /
                  static_cast<double>(score.n_interactions);
  }
  return score;
}

std::map<std::string, double> village_overlap(
    const std::vector<std::pair<std::string, OverlapScore>>& scores,
    const std::map<std::string, std::string>& village_of) {
  std::map<std::string, double> sum;
  std::map<std::string, long> count;
  for (const auto& [person, score] : scores) {
    auto it = village_of.find(person);
    if (it == village_of.end())
      throw std::invalid_argument("person " + person + " has no village assignment");
    sum[it->second] += score.value;
    ++count[it->second];
  }
  std::map<std::string, double> mean;
  for (const auto& [village, s] : sum) mean[village] = s / static_cast<double>(count[village]);
  return mean;
}

std::vector<Tie> read_edges_csv(const std::string& path) {
  const csv::Table table = csv::read_file(path, {"ego_id", "alter_id", "domain", "direction"});
  std::vector<Tie> ties;
  ties.reserve(table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    try {
      ties.push_back(Tie{row[0], row[1], row[2], direction_from_string(row[3])});
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ": row " + std::to_string(i + 2) + ": " + e.what());
    }
  }
  return ties;
}

std::map<std::string, MultiplexEgoNetwork> build_networks(const std::vector<Tie>& ties) {
  std::map<std::string, std::vector<Tie>> by_ego;
  for (const Tie& t : ties) by_ego[t.ego_id].push_back(t);
  std::map<std::string, MultiplexEgoNetwork> nets;
  for (auto& [ego, ego_ties] : by_ego) nets.emplace(ego, build_network(ego, ego_ties));
  return nets;
}

}  // namespace coopnet::net
