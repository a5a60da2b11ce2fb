#include "coopnet/io.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coopnet/csv.hpp"

namespace coopnet::io {

namespace fs = std::filesystem;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write file: " + path);
  out << content;
}

// --- dataset ---------------------------------------------------------------

namespace {

template <typename T>
json opt_json(const std::optional<T>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

json dataset_to_json(const data::CoopDataset& ds) {
  json j;
  j["metadata"] = {{"n_domains", ds.meta.n_domains},
                   {"annualization_factor", ds.meta.annualization_factor},
                   {"village_overlap_basis", ds.meta.village_overlap_basis},
                   {"undefined_overlap_persons", ds.meta.undefined_overlap_persons}};
  j["rows"] = json::array();
  for (const auto& r : ds.rows) {
    json row;
    row["person_id"] = r.person_id;
    row["village_id"] = r.village_id;
    row["overlap_i"] = r.overlap_i;
    row["overlap_undefined"] = r.overlap_undefined;
    row["overlap_V"] = r.overlap_V;
    row["village_size"] = opt_json(r.village_size);
    row["dg_category"] = opt_json(r.dg_category);
    row["ug_category"] = opt_json(r.ug_category);
    row["mayu_yearly"] = opt_json(r.mayu_yearly);
    j["rows"].push_back(std::move(row));
  }
  return j;
}

data::CoopDataset dataset_from_json(const json& j) {
  data::CoopDataset ds;
  const auto& meta = j.at("metadata");
  ds.meta.n_domains = meta.at("n_domains").get<int>();
  ds.meta.annualization_factor = meta.at("annualization_factor").get<int>();
  ds.meta.village_overlap_basis = meta.at("village_overlap_basis").get<std::string>();
  ds.meta.undefined_overlap_persons =
      meta.at("undefined_overlap_persons").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    data::CoopRow r;
    r.person_id = row.at("person_id").get<std::string>();
    r.village_id = row.at("village_id").get<std::string>();
    r.overlap_i = row.at("overlap_i").get<double>();
    r.overlap_undefined = row.at("overlap_undefined").get<bool>();
    r.overlap_V = row.at("overlap_V").get<double>();
    if (!row.at("village_size").is_null()) r.village_size = row.at("village_size").get<double>();
    if (!row.at("dg_category").is_null()) r.dg_category = row.at("dg_category").get<int>();
    if (!row.at("ug_category").is_null()) r.ug_category = row.at("ug_category").get<int>();
    if (!row.at("mayu_yearly").is_null()) r.mayu_yearly = row.at("mayu_yearly").get<long>();
    ds.rows.push_back(std::move(r));
  }
  return ds;
}

void write_dataset(const std::string& path, const data::CoopDataset& ds) {
  write_text_file(path, dataset_to_json(ds).dump(2) + "\n");
}

data::CoopDataset read_dataset(const std::string& path) {
  try {
    return dataset_from_json(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": invalid dataset json: " + e.what());
  }
}

// --- model spec ------------------------------------------------------------

json model_spec_to_json(const glmm::ModelSpec& spec) {
  json j;
  j["family"] = glmm::to_string(spec.family);
  j["outcome"] = spec.outcome;
  j["covariates"] = spec.covariates;
  j["n_categories"] = spec.n_categories;
  j["priors"] = {{"beta_scale", spec.priors.beta_scale},
                 {"intercept_scale", spec.priors.intercept_scale},
                 {"sigma_scale", spec.priors.sigma_scale},
                 {"theta_shape", spec.priors.theta_shape},
                 {"theta_rate", spec.priors.theta_rate}};
  return j;
}

glmm::ModelSpec model_spec_from_json(const json& j) {
  glmm::ModelSpec spec;
  spec.family = glmm::family_from_string(j.at("family").get<std::string>());
  spec.outcome = j.at("outcome").get<std::string>();
  spec.covariates = j.at("covariates").get<std::vector<std::string>>();
  if (j.contains("n_categories")) spec.n_categories = j.at("n_categories").get<int>();
  if (j.contains("priors")) {
    const auto& p = j.at("priors");
    if (p.contains("beta_scale")) spec.priors.beta_scale = p.at("beta_scale").get<double>();
    if (p.contains("intercept_scale"))
      spec.priors.intercept_scale = p.at("intercept_scale").get<double>();
    if (p.contains("sigma_scale")) spec.priors.sigma_scale = p.at("sigma_scale").get<double>();
    if (p.contains("theta_shape")) spec.priors.theta_shape = p.at("theta_shape").get<double>();
    if (p.contains("theta_rate")) spec.priors.theta_rate = p.at("theta_rate").get<double>();
  }
  return spec;
}

// --- draws ------------------------------------------------------------------

void write_draws_csv(const std::string& path, const mcmc::PosteriorDraws& draws) {
  std::string out = "chain,iteration";
  for (const auto& name : draws.parameter_names) out += "," + name;
  out += "\n";
  for (int c = 0; c < draws.n_chains(); ++c) {
    for (long i = 0; i < draws.chains[c].rows(); ++i) {
      out += std::to_string(c + 1) + "," + std::to_string(i + 1);
      for (long p = 0; p < draws.chains[c].cols(); ++p)
        out += "," + csv::format_double(draws.chains[c](i, p));
      out += "\n";
    }
  }
  write_text_file(path, out);
}

mcmc::PosteriorDraws read_draws_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument(path + ": empty draws file");
  std::vector<std::string> cols;
  {
    std::string field;
    std::istringstream hs(header);
    while (std::getline(hs, field, ',')) cols.push_back(field);
  }
  if (cols.size() < 3 || cols[0] != "chain" || cols[1] != "iteration")
    throw std::invalid_argument(path + ": expected header chain,iteration,<params>");

  mcmc::PosteriorDraws draws;
  draws.parameter_names.assign(cols.begin() + 2, cols.end());
  std::vector<std::vector<Eigen::VectorXd>> rows_by_chain;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    const int chain = std::stoi(field) - 1;
    std::getline(ls, field, ',');  // iteration, implied by order
    Eigen::VectorXd v(draws.parameter_names.size());
    for (size_t p = 0; p < draws.parameter_names.size(); ++p) {
      if (!std::getline(ls, field, ','))
        throw std::invalid_argument(path + ": short row in draws file");
      v(p) = std::stod(field);
    }
    if (chain < 0) throw std::invalid_argument(path + ": chain ids must start at 1");
    if (static_cast<size_t>(chain) >= rows_by_chain.size()) rows_by_chain.resize(chain + 1);
    rows_by_chain[chain].push_back(std::move(v));
  }
  for (const auto& chain_rows : rows_by_chain) {
    Eigen::MatrixXd m(chain_rows.size(), draws.parameter_names.size());
    for (size_t i = 0; i < chain_rows.size(); ++i) m.row(i) = chain_rows[i].transpose();
    draws.chains.push_back(std::move(m));
    draws.divergent.emplace_back(chain_rows.size(), 0);
    draws.chain_seeds.push_back(0);
  }
  if (draws.chains.empty()) throw std::invalid_argument(path + ": no draws");
  return draws;
}

json fit_summary_json(const mcmc::PosteriorDraws& draws, const glmm::ModelSpec& spec) {
  json j;
  j["model"] = model_spec_to_json(spec);
  j["config"] = {{"n_chains", draws.config.n_chains},
                 {"n_warmup", draws.config.n_warmup},
                 {"n_draws", draws.config.n_draws},
                 {"seed", draws.config.seed},
                 {"target_acceptance", draws.config.target_acceptance},
                 {"max_leapfrog_depth", draws.config.max_leapfrog_depth}};
  j["chain_seeds"] = draws.chain_seeds;
  j["n_divergent"] = draws.n_divergent();
  j["failed"] = draws.failed;
  json params = json::object();
  for (int p = 0; p < draws.n_params(); ++p) {
    const auto s = mcmc::summarize(draws.flat(p), 0.89);
    json entry;
    entry["mean"] = s.mean;
    entry["ci89_lower"] = s.lower;
    entry["ci89_upper"] = s.upper;
    try {
      entry["rhat"] = mcmc::rhat(draws.by_chain(p));
    } catch (const std::exception&) {
      entry["rhat"] = nullptr;
    }
    try {
      entry["ess"] = mcmc::ess(draws.by_chain(p));
    } catch (const std::exception&) {
      entry["ess"] = nullptr;
    }
    entry["n_divergent"] = draws.n_divergent();
    params[draws.parameter_names[p]] = std::move(entry);
  }
  j["parameters"] = std::move(params);
  return j;
}

// --- postfit ----------------------------------------------------------------

namespace {
json quantity_json(const postfit::PosteriorQuantity& q) {
  return {{"median", q.median}, {"ci89_lower", q.lower}, {"ci89_upper", q.upper}};
}
}  // namespace

json icc_to_json(const postfit::IccReport& report) {
  json j;
  j["model"] = report.model_label;
  j["family"] = glmm::to_string(report.family);
  j["var_village"] = quantity_json(report.var_village);
  j["var_level1"] = quantity_json(report.var_level1);
  j["icc"] = quantity_json(report.icc);
  if (report.family == glmm::Family::negative_binomial) j["lambda"] = report.lambda;
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

json loo_to_json(const postfit::ParetoKReport& report) {
  json j;
  j["tail_fraction"] = report.tail_fraction;
  json k = json::array();
  for (const auto& v : report.k)
    k.push_back(v ? json(*v) : json(nullptr));
  j["pareto_k"] = std::move(k);
  j["flagged"] = report.flagged;
  j["threshold"] = 0.7;
  return j;
}

void write_marginal_csv(const std::string& path, const postfit::MarginalCurve& curve) {
  std::string out = "grid_value,mean,ci89_lower,ci89_upper\n";
  for (size_t i = 0; i < curve.grid.size(); ++i) {
    out += csv::format_double(curve.grid[i]) + "," + csv::format_double(curve.response[i].mean) +
           "," + csv::format_double(curve.response[i].lower) + "," +
           csv::format_double(curve.response[i].upper) + "\n";
  }
  write_text_file(path, out);
}

// --- synth ------------------------------------------------------------------

json truth_to_json(const synth::TrueParams& p) {
  json j;
  j["family"] = glmm::to_string(p.family);
  j["b_overlap_i"] = p.b_overlap_i;
  j["b_overlap_V"] = p.b_overlap_V;
  j["b_size_V"] = p.b_size ? json(*p.b_size) : json(nullptr);
  j["sigma_village"] = p.sigma_village;
  if (p.family == glmm::Family::negative_binomial) {
    j["intercept"] = p.intercept;
    j["theta"] = p.theta;
  } else {
    std::vector<double> cuts(p.cutpoints.data(), p.cutpoints.data() + p.cutpoints.size());
    j["cutpoints"] = cuts;
  }
  j["n_villages"] = p.n_villages;
  j["per_village"] = p.per_village;
  j["overlap"] = {{"mean_lo", p.overlap_mean_lo},
                  {"mean_hi", p.overlap_mean_hi},
                  {"concentration", p.overlap_concentration},
                  {"note", "per-village Beta stand-in; field overlap distributions unpublished"}};
  return j;
}

synth::TrueParams truth_from_json(const json& j) {
  synth::TrueParams p;
  p.family = glmm::family_from_string(j.at("family").get<std::string>());
  if (p.family == glmm::Family::ordered_logistic) p = synth::default_game_truth();
  if (j.contains("b_overlap_i")) p.b_overlap_i = j.at("b_overlap_i").get<double>();
  if (j.contains("b_overlap_V")) p.b_overlap_V = j.at("b_overlap_V").get<double>();
  if (j.contains("b_size_V") && !j.at("b_size_V").is_null())
    p.b_size = j.at("b_size_V").get<double>();
  if (j.contains("sigma_village")) p.sigma_village = j.at("sigma_village").get<double>();
  if (j.contains("intercept")) p.intercept = j.at("intercept").get<double>();
  if (j.contains("theta")) p.theta = j.at("theta").get<double>();
  if (j.contains("cutpoints")) {
    const auto cuts = j.at("cutpoints").get<std::vector<double>>();
    p.cutpoints = Eigen::Map<const Eigen::VectorXd>(cuts.data(), cuts.size());
  }
  if (j.contains("n_villages")) p.n_villages = j.at("n_villages").get<int>();
  if (j.contains("per_village")) p.per_village = j.at("per_village").get<int>();
  if (j.contains("overlap")) {
    const auto& o = j.at("overlap");
    if (o.contains("mean_lo")) p.overlap_mean_lo = o.at("mean_lo").get<double>();
    if (o.contains("mean_hi")) p.overlap_mean_hi = o.at("mean_hi").get<double>();
    if (o.contains("concentration"))
      p.overlap_concentration = o.at("concentration").get<double>();
  }
  return p;
}

json recovery_to_json(const synth::RecoveryReport& report) {
  json j;
  j["n_replicates"] = report.n_replicates;
  j["n_failed"] = report.n_failed;
  j["failed_replicates"] = report.failed_replicates;
  json params = json::object();
  for (const auto& [name, pr] : report.parameters) {
    params[name] = {{"truth", pr.truth},
                    {"coverage", pr.coverage},
                    {"mean_bias", pr.mean_bias},
                    {"n_sign_agree", pr.n_sign_agree},
                    {"n_used", pr.n_used}};
  }
  j["parameters"] = std::move(params);
  return j;
}

// --- manifest ---------------------------------------------------------------

std::uint64_t fnv1a_file(const std::string& path) {
  const std::string text = read_text_file(path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::vector<std::string>& input_paths, const json& config_echo,
                    std::uint64_t seed) {
  json j;
  j["command"] = command;
  j["tool_version"] = kToolVersion;
  j["seed"] = seed;
  json inputs = json::object();
  for (const auto& p : input_paths) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(p)));
    inputs[p] = std::string("fnv1a64:") + hex;
  }
  j["inputs"] = std::move(inputs);
  j["config"] = config_echo;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  j["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  write_text_file((fs::path(out_dir) / "run_manifest.json").string(), j.dump(2) + "\n");
}

}  // namespace coopnet::io
