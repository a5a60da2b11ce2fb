#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "coopnet/dataset.hpp"
#include "coopnet/io.hpp"
#include "coopnet/mcmc.hpp"
#include "coopnet/rng.hpp"

using namespace coopnet;

namespace {

std::string write_tmp(const std::string& name, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "coopnet_dataset_test";
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  out << text;
  return (dir / name).string();
}

const char* kHeader = "person_id,village_id,dg_offer_gyd,ug_offer_gyd,mayu_per_month,mayu_per_year\n";

}  // namespace

TEST_CASE("parse_individuals") {
  SUBCASE("typed fields with blanks as missing") {
    const auto recs = data::parse_individuals(write_tmp("ok.csv",
                                                        std::string(kHeader) +
                                                            "p1,v1,200,300,2,\n"
                                                            "p2,v1,,,,\n"
                                                            "p3,v2,0,1000,,7\n"));
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].dg_offer_gyd == 200);
    CHECK(recs[0].ug_offer_gyd == 300);
    CHECK(recs[0].mayu_per_month == 2);
    CHECK_FALSE(recs[0].mayu_per_year.has_value());
    CHECK_FALSE(recs[1].dg_offer_gyd.has_value());
    CHECK(recs[2].dg_offer_gyd == 0);
    CHECK(recs[2].mayu_per_year == 7);
  }
  SUBCASE("empty file with header gives empty list") {
    CHECK(data::parse_individuals(write_tmp("empty.csv", kHeader)).empty());
  }
  SUBCASE("off-grid offer is rejected with a line number") {
    const auto path = write_tmp("grid.csv", std::string(kHeader) + "p1,v1,250,,,\n");
    try {
      data::parse_individuals(path);
      FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      CHECK(msg.find("multiple of 100") != std::string::npos);
      CHECK(msg.find(":2") != std::string::npos);
    }
  }
  SUBCASE("malformed row is rejected with a line number") {
    const auto path = write_tmp("short.csv", std::string(kHeader) + "p1,v1,200\n");
    try {
      data::parse_individuals(path);
      FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
  }
  SUBCASE("offers above 1000 are rejected") {
    CHECK_THROWS_AS(data::parse_individuals(
                        write_tmp("big.csv", std::string(kHeader) + "p1,v1,1100,,,\n")),
                    std::invalid_argument);
  }
}

TEST_CASE("recode_offer") {
  CHECK(data::recode_offer(0) == 0);
  CHECK(data::recode_offer(300) == 3);
  CHECK(data::recode_offer(500) == 5);
  CHECK(data::recode_offer(600) == 5);   // collapsed into the 500 category
  CHECK(data::recode_offer(1000) == 5);
  CHECK_THROWS_AS(data::recode_offer(250), std::invalid_argument);
  CHECK_THROWS_AS(data::recode_offer(-100), std::invalid_argument);

  // monotone over the full grid, exactly 6 categories
  std::set<int> seen;
  int prev = -1;
  for (int offer = 0; offer <= 1000; offer += 100) {
    const int cat = data::recode_offer(offer);
    CHECK(cat >= prev);
    prev = cat;
    seen.insert(cat);
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("annualize_mayu") {
  CHECK(data::annualize_mayu(2, std::nullopt) == 24);
  CHECK(data::annualize_mayu(0, 5) == 5);
  CHECK(data::annualize_mayu(std::nullopt, 9) == 9);
  CHECK(data::annualize_mayu(3, 99) == 36);  // monthly report wins when positive
  CHECK(data::annualize_mayu(0, std::nullopt) == 0);
  CHECK(data::annualize_mayu(2, std::nullopt, 10) == 20);  // configurable factor
  CHECK_THROWS_AS(data::annualize_mayu(std::nullopt, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(data::annualize_mayu(1, std::nullopt, 0), std::invalid_argument);
}

namespace {

data::IndividualRecord person(const std::string& id, const std::string& village) {
  data::IndividualRecord r;
  r.person_id = id;
  r.village_id = village;
  return r;
}

net::MultiplexEgoNetwork two_layer_net(const std::string& ego, int n_multi, int n_single) {
  std::vector<net::Tie> ties;
  for (int i = 0; i < n_multi; ++i) {
    ties.push_back({ego, "m" + std::to_string(i), "d1", net::Direction::get});
    ties.push_back({ego, "m" + std::to_string(i), "d2", net::Direction::get});
  }
  for (int i = 0; i < n_single; ++i)
    ties.push_back({ego, "s" + std::to_string(i), "d1", net::Direction::get});
  return net::build_network(ego, ties);
}

}  // namespace

TEST_CASE("assemble_dataset") {
  SUBCASE("village mean joined onto both rows") {
    std::vector<data::IndividualRecord> inds = {person("p1", "v1"), person("p2", "v1")};
    std::map<std::string, net::MultiplexEgoNetwork> nets;
    nets.emplace("p1", two_layer_net("p1", 1, 8));   // overlap 0.2
    nets.emplace("p2", two_layer_net("p2", 2, 6));   // overlap 0.4
    const auto ds = data::assemble_dataset(inds, nets);
    REQUIRE(ds.rows.size() == 2);
    CHECK(ds.rows[0].overlap_i == doctest::Approx(0.2));
    CHECK(ds.rows[1].overlap_i == doctest::Approx(0.4));
    CHECK(ds.rows[0].overlap_V == doctest::Approx(0.3));
    CHECK(ds.rows[1].overlap_V == doctest::Approx(0.3));
  }
  SUBCASE("paper-scale assembly: 226 rows across 8 villages") {
    std::vector<data::IndividualRecord> inds;
    for (int i = 0; i < 226; ++i) inds.push_back(person("p" + std::to_string(i),
                                                        "v" + std::to_string(i % 8)));
    const auto ds = data::assemble_dataset(inds, {});
    CHECK(ds.rows.size() == 226);
    std::set<std::string> villages;
    for (const auto& r : ds.rows) villages.insert(r.village_id);
    CHECK(villages.size() == 8);
  }
  SUBCASE("missing networks flag undefined overlap") {
    const auto ds = data::assemble_dataset({person("p1", "v1"), person("p2", "v1")}, {});
    CHECK(ds.rows[0].overlap_i == 0.0);
    CHECK(ds.rows[0].overlap_undefined);
    CHECK(ds.meta.undefined_overlap_persons.size() == 2);
  }
  SUBCASE("row order follows input order") {
    const auto ds =
        data::assemble_dataset({person("z", "v1"), person("a", "v1"), person("m", "v2")}, {});
    CHECK(ds.rows[0].person_id == "z");
    CHECK(ds.rows[1].person_id == "a");
    CHECK(ds.rows[2].person_id == "m");
  }
  SUBCASE("unknown village in size map is an error") {
    std::map<std::string, double> sizes = {{"other", 100.0}};
    CHECK_THROWS_AS(data::assemble_dataset({person("p1", "v1")}, {}, sizes),
                    std::invalid_argument);
  }
  SUBCASE("sizes and outcomes flow through") {
    auto ind = person("p1", "v1");
    ind.dg_offer_gyd = 600;
    ind.mayu_per_month = 3;
    std::map<std::string, double> sizes = {{"v1", 271.0}};
    const auto ds = data::assemble_dataset({ind}, {}, sizes);
    CHECK(ds.rows[0].village_size == 271.0);
    CHECK(ds.rows[0].dg_category == 5);
    CHECK_FALSE(ds.rows[0].ug_category.has_value());
    CHECK(ds.rows[0].mayu_yearly == 36);
  }
  SUBCASE("overlap_V is constant within village") {
    rng::Rng r(31);
    std::vector<data::IndividualRecord> inds;
    std::map<std::string, net::MultiplexEgoNetwork> nets;
    for (int i = 0; i < 40; ++i) {
      const std::string pid = "p" + std::to_string(i);
      inds.push_back(person(pid, "v" + std::to_string(r.uniform_int(4))));
      nets.emplace(pid, two_layer_net(pid, static_cast<int>(r.uniform_int(4)),
                                      1 + static_cast<int>(r.uniform_int(6))));
    }
    const auto ds = data::assemble_dataset(inds, nets);
    std::map<std::string, double> seen;
    for (const auto& row : ds.rows) {
      if (seen.count(row.village_id))
        CHECK(row.overlap_V == doctest::Approx(seen[row.village_id]).epsilon(1e-15));
      seen[row.village_id] = row.overlap_V;
    }
  }
}

TEST_CASE("draws csv round trip") {
  rng::Rng r(23);
  coopnet::mcmc::PosteriorDraws draws;
  draws.parameter_names = {"intercept", "b_overlap_i", "sigma_village"};
  for (int c = 0; c < 3; ++c) {
    Eigen::MatrixXd m(7, 3);
    for (int i = 0; i < m.size(); ++i) m(i / 3, i % 3) = r.normal() * std::exp(10 * r.normal());
    draws.chains.push_back(m);
    draws.divergent.emplace_back(7, 0);
    draws.chain_seeds.push_back(c);
  }
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "coopnet_draws_roundtrip.csv").string();
  io::write_draws_csv(path, draws);
  const auto back = io::read_draws_csv(path);
  CHECK(back.parameter_names == draws.parameter_names);
  REQUIRE(back.n_chains() == 3);
  for (int c = 0; c < 3; ++c) CHECK(back.chains[c] == draws.chains[c]);  // bit-exact
}

TEST_CASE("dataset json round trip preserves all fields") {
  rng::Rng r(17);
  data::CoopDataset ds;
  ds.meta.n_domains = 54;
  ds.meta.annualization_factor = 12;
  ds.meta.undefined_overlap_persons = {"p3"};
  for (int i = 0; i < 50; ++i) {
    data::CoopRow row;
    row.person_id = "p" + std::to_string(i);
    row.village_id = "v" + std::to_string(i % 5);
    row.overlap_i = r.uniform();
    row.overlap_undefined = i == 3;
    row.overlap_V = r.uniform();
    if (r.flip()) row.village_size = 100.0 + std::floor(700 * r.uniform());
    if (r.flip()) row.dg_category = static_cast<int>(r.uniform_int(6));
    if (r.flip()) row.ug_category = static_cast<int>(r.uniform_int(6));
    if (r.flip()) row.mayu_yearly = static_cast<long>(r.uniform_int(100));
    ds.rows.push_back(row);
  }
  const auto j = io::dataset_to_json(ds);
  const auto back = io::dataset_from_json(io::json::parse(j.dump()));
  REQUIRE(back.rows.size() == ds.rows.size());
  CHECK(back.meta.n_domains == 54);
  CHECK(back.meta.undefined_overlap_persons == ds.meta.undefined_overlap_persons);
  for (size_t i = 0; i < ds.rows.size(); ++i) {
    CHECK(back.rows[i].person_id == ds.rows[i].person_id);
    CHECK(back.rows[i].village_id == ds.rows[i].village_id);
    CHECK(back.rows[i].overlap_i == ds.rows[i].overlap_i);
    CHECK(back.rows[i].overlap_undefined == ds.rows[i].overlap_undefined);
    CHECK(back.rows[i].overlap_V == ds.rows[i].overlap_V);
    CHECK(back.rows[i].village_size == ds.rows[i].village_size);
    CHECK(back.rows[i].dg_category == ds.rows[i].dg_category);
    CHECK(back.rows[i].ug_category == ds.rows[i].ug_category);
    CHECK(back.rows[i].mayu_yearly == ds.rows[i].mayu_yearly);
  }
}
