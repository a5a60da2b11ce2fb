#pragma once
// Serialization of every file format the tool emits or consumes:
// dataset.json, model.json, draws.csv, fit.json, icc.json, loo.json,
// marginal_<covariate>.csv, truth.json, recovery.json, run_manifest.json.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopnet/dataset.hpp"
#include "coopnet/glmm.hpp"
#include "coopnet/mcmc.hpp"
#include "coopnet/postfit.hpp"
#include "coopnet/synth.hpp"

namespace coopnet::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

// thrown for missing/unreadable files (CLI exit code 2)
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// --- dataset ---------------------------------------------------------------
json dataset_to_json(const data::CoopDataset& ds);
data::CoopDataset dataset_from_json(const json& j);
void write_dataset(const std::string& path, const data::CoopDataset& ds);
data::CoopDataset read_dataset(const std::string& path);

// --- model spec ------------------------------------------------------------
json model_spec_to_json(const glmm::ModelSpec& spec);
glmm::ModelSpec model_spec_from_json(const json& j);

// --- sampler draws and summaries -------------------------------------------
void write_draws_csv(const std::string& path, const mcmc::PosteriorDraws& draws);
mcmc::PosteriorDraws read_draws_csv(const std::string& path);
json fit_summary_json(const mcmc::PosteriorDraws& draws, const glmm::ModelSpec& spec);

// --- postfit ----------------------------------------------------------------
json icc_to_json(const postfit::IccReport& report);
json loo_to_json(const postfit::ParetoKReport& report);
void write_marginal_csv(const std::string& path, const postfit::MarginalCurve& curve);

// --- synth ------------------------------------------------------------------
json truth_to_json(const synth::TrueParams& params);
synth::TrueParams truth_from_json(const json& j);
json recovery_to_json(const synth::RecoveryReport& report);

// --- manifest ---------------------------------------------------------------
std::uint64_t fnv1a_file(const std::string& path);
void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::vector<std::string>& input_paths, const json& config_echo,
                    std::uint64_t seed);

}  // namespace coopnet::io
