#pragma once
// Synthetic Makushi-like datasets from known parameters, and parameter
// recovery experiments: the validation route when the field data are
// unavailable. Overlap values are drawn directly from per-village Beta
// distributions rather than from synthetic networks.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>

#include "coopnet/dataset.hpp"
#include "coopnet/glmm.hpp"
#include "coopnet/mcmc.hpp"

namespace coopnet::synth {

struct TrueParams {
  glmm::Family family = glmm::Family::negative_binomial;
  double b_overlap_i = 2.53;    // Makushi-scale defaults for the mayu model
  double b_overlap_V = 24.35;
  std::optional<double> b_size;
  double sigma_village = 0.49;

  double intercept = -8.0;      // negbin only; keeps counts on a tens-per-year scale
  double theta = 1.5;           // negbin only
  Eigen::VectorXd cutpoints;    // ordinal only; K-1 increasing values

  int n_villages = 8;
  int per_village = 28;

  // per-village overlap ~ Beta with means evenly spread over [lo, hi]
  double overlap_mean_lo = 0.15;
  double overlap_mean_hi = 0.45;
  double overlap_concentration = 40.0;
};

TrueParams default_game_truth();  // ordinal, Makushi DG-scale coefficients
TrueParams default_mayu_truth();  // negative binomial

// Draws a_V ~ N(0, sigma), overlaps from the Beta spec, village means from
// the sampled individuals, outcomes through the exact model likelihoods.
// Ordinal truths fill both dg and ug outcomes (independent draws).
data::CoopDataset generate_dataset(const TrueParams& params, std::uint64_t seed);

// The model spec a recovery fit uses for these truths.
glmm::ModelSpec model_spec_for(const TrueParams& params, const std::string& outcome = "");

struct ParamRecovery {
  double truth = 0.0;
  double coverage = 0.0;        // share of replicates whose 89% CI covers truth
  double mean_bias = 0.0;       // mean(posterior mean - truth)
  int n_sign_agree = 0;         // posterior-mean sign matches truth sign
  int n_used = 0;
};

struct RecoveryReport {
  int n_replicates = 0;
  int n_failed = 0;             // fits flagged failed, excluded from stats
  std::vector<int> failed_replicates;
  std::map<std::string, ParamRecovery> parameters;
};

// n_replicates independent generate->fit rounds; replicate r uses data seed
// hash(config.seed, r) and its own sampler seed. Failed fits are reported,
// excluded and counted. Coverage fractions are only meaningful from roughly
// 10 replicates up.
RecoveryReport recovery_experiment(const TrueParams& params, int n_replicates,
                                   const mcmc::SamplerConfig& config,
                                   const glmm::PriorSet& priors = glmm::PriorSet{});

}  // namespace coopnet::synth
