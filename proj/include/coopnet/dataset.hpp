#pragma once
// Survey ingestion and analysis-dataset assembly: recodes game offers to six
// ordered categories, annualizes mayu counts, joins individual and village
// overlap onto each row.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coopnet/network.hpp"

namespace coopnet::data {

struct IndividualRecord {
  std::string person_id;
  std::string village_id;
  std::optional<int> dg_offer_gyd;    // 0..1000 in steps of 100
  std::optional<int> ug_offer_gyd;
  std::optional<long> mayu_per_month;
  std::optional<long> mayu_per_year;
};

// individuals.csv: header exactly
// `person_id,village_id,dg_offer_gyd,ug_offer_gyd,mayu_per_month,mayu_per_year`
// with blank cells meaning missing.
std::vector<IndividualRecord> parse_individuals(const std::string& path);

// Offers above 500 GYD collapse into the 500 category: min(offer/100, 5).
int recode_offer(int offer_gyd);

// Monthly reports scale by `factor` (default 12); a zero monthly report defers
// to the yearly answer.
long annualize_mayu(std::optional<long> monthly, std::optional<long> yearly, int factor = 12);

struct CoopRow {
  std::string person_id;
  std::string village_id;
  double overlap_i = 0.0;
  bool overlap_undefined = false;
  double overlap_V = 0.0;
  std::optional<double> village_size;  // residents, raw count
  std::optional<int> dg_category;      // 0..5
  std::optional<int> ug_category;      // 0..5
  std::optional<long> mayu_yearly;
};

struct DatasetMeta {
  int n_domains = 0;  // distinct layers observed across all networks
  int annualization_factor = 12;
  std::string village_overlap_basis = "sampled_individuals";
  std::vector<std::string> undefined_overlap_persons;
};

struct CoopDataset {
  std::vector<CoopRow> rows;
  DatasetMeta meta;
};

// Rows keep input order; missing outcomes keep the row. Individuals without a
// network get an empty one (overlap 0, flagged undefined).
CoopDataset assemble_dataset(
    const std::vector<IndividualRecord>& individuals,
    const std::map<std::string, net::MultiplexEgoNetwork>& networks,
    const std::optional<std::map<std::string, double>>& village_sizes = std::nullopt,
    int annualization_factor = 12);

}  // namespace coopnet::data
