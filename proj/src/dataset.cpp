#include "coopnet/dataset.hpp"

#include <set>
#include <stdexcept>

#include "coopnet/csv.hpp"

namespace coopnet::data {

namespace {

std::optional<long> parse_count(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": not an integer: `" + s + "`");
  }
  if (pos != s.size()) throw std::invalid_argument(where + ": not an integer: `" + s + "`");
  if (v < 0) throw std::invalid_argument(where + ": negative count: `" + s + "`");
  return v;
}

std::optional<int> parse_offer(const std::string& s, const std::string& where) {
  auto v = parse_count(s, where);
  if (!v) return std::nullopt;
  if (*v > 1000) throw std::invalid_argument(where + ": offer above 1000 GYD: `" + s + "`");
  if (*v % 100 != 0) throw std::invalid_argument(where + ": offer not multiple of 100: `" + s + "`");
  return static_cast<int>(*v);
}

}  // namespace

std::vector<IndividualRecord> parse_individuals(const std::string& path) {
  const csv::Table table = csv::read_file(
      path, {"person_id", "village_id", "dg_offer_gyd", "ug_offer_gyd", "mayu_per_month",
             "mayu_per_year"});
  std::vector<IndividualRecord> records;
  records.reserve(table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = path + ":" + std::to_string(i + 2);
    if (row[0].empty()) throw std::invalid_argument(where + ": empty person_id");
    if (row[1].empty()) throw std::invalid_argument(where + ": empty village_id");
    IndividualRecord rec;
    rec.person_id = row[0];
    rec.village_id = row[1];
    rec.dg_offer_gyd = parse_offer(row[2], where);
    rec.ug_offer_gyd = parse_offer(row[3], where);
    rec.mayu_per_month = parse_count(row[4], where);
    rec.mayu_per_year = parse_count(row[5], where);
    records.push_back(std::move(rec));
  }
  return records;
}

int recode_offer(int offer_gyd) {
  if (offer_gyd < 0 || offer_gyd > 1000 || offer_gyd % 100 != 0)
    throw std::invalid_argument("offer " + std::to_string(offer_gyd) +
                                " GYD is not on the 0..1000 grid in steps of 100");
  const int category = offer_gyd / 100;
  return category > 5 ? 5 : category;
}

long annualize_mayu(std::optional<long> monthly, std::optional<long> yearly, int factor) {
  if (factor <= 0) throw std::invalid_argument("annualization factor must be positive");
  if (!monthly && !yearly) throw std::invalid_argument("no mayu report");
  if (monthly && *monthly > 0) return *monthly * factor;
  if (yearly) return *yearly;
  return 0;  // reported zero per month, never asked yearly
}

CoopDataset assemble_dataset(const std::vector<IndividualRecord>& individuals,
                             const std::map<std::string, net::MultiplexEgoNetwork>& networks,
                             const std::optional<std::map<std::string, double>>& village_sizes,
                             int annualization_factor) {
  CoopDataset ds;
  ds.meta.annualization_factor = annualization_factor;

  std::vector<std::pair<std::string, net::OverlapScore>> scores;
  std::map<std::string, std::string> village_of;
  std::map<std::string, net::OverlapScore> score_of;
  std::set<std::string> domains;
  for (const auto& ind : individuals) {
    net::OverlapScore score;
    auto it = networks.find(ind.person_id);
    if (it != networks.end()) {
      score = individual_overlap(it->second);
      domains.insert(it->second.domains.begin(), it->second.domains.end());
    } else {
      score.undefined = true;  // no elicited ties at all
    }
    scores.emplace_back(ind.person_id, score);
    score_of[ind.person_id] = score;
    village_of[ind.person_id] = ind.village_id;
  }
  ds.meta.n_domains = static_cast<int>(domains.size());
  const auto village_means = net::village_overlap(scores, village_of);

  for (const auto& ind : individuals) {
    CoopRow row;
    row.person_id = ind.person_id;
    row.village_id = ind.village_id;
    const auto& score = score_of[ind.person_id];
    row.overlap_i = score.value;
    row.overlap_undefined = score.undefined;
    if (score.undefined) ds.meta.undefined_overlap_persons.push_back(ind.person_id);
    row.overlap_V = village_means.at(ind.village_id);
    if (village_sizes) {
      auto it = village_sizes->find(ind.village_id);
      if (it == village_sizes->end())
        throw std::invalid_argument("village " + ind.village_id + " missing from size map");
      row.village_size = it->second;
    }
    if (ind.dg_offer_gyd) row.dg_category = recode_offer(*ind.dg_offer_gyd);
    if (ind.ug_offer_gyd) row.ug_category = recode_offer(*ind.ug_offer_gyd);
    if (ind.mayu_per_month || ind.mayu_per_year)
      row.mayu_yearly = annualize_mayu(ind.mayu_per_month, ind.mayu_per_year, annualization_factor);
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

}  // namespace coopnet::data
