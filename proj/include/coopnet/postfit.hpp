#pragma once
// Post-fit analyses: intra-class correlation for both families, PSIS
// Pareto-k influence diagnostics, marginal-effect curves, and posterior
// prediction.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "coopnet/glmm.hpp"
#include "coopnet/mcmc.hpp"

namespace coopnet::postfit {

// Latent-scale level-1 variance of the cumulative logistic model.
inline constexpr double kOrdinalLevel1Variance = 3.29;

// var_v / (var_v + 3.29)
double icc_ordinal_point(double var_village);

// var_eps = trigamma((1/lambda + 1/theta)^-1); var_v / (var_v + var_eps)
double icc_negbin_point(double var_village, double lambda, double theta);

// median and central 89% interval of a per-draw quantity
struct PosteriorQuantity {
  double median = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct IccReport {
  std::string model_label;
  glmm::Family family = glmm::Family::negative_binomial;
  PosteriorQuantity var_village;
  PosteriorQuantity var_level1;
  PosteriorQuantity icc;
  double lambda = 0.0;  // sample mean of the outcome (negbin only)
  std::string note;
};

// Per-draw ICC summarized as median and central 89% interval. lambda is the
// sample mean of the fitted outcome.
IccReport icc_report(const mcmc::PosteriorDraws& draws, const glmm::ModelData& data,
                     const glmm::ModelSpec& spec, const std::string& label);

// draws x observations pointwise log-likelihood.
Eigen::MatrixXd pointwise_loglik(const mcmc::PosteriorDraws& draws, const glmm::ModelData& data,
                                 const glmm::ModelSpec& spec);

struct ParetoKReport {
  std::vector<std::optional<double>> k;  // one per observation; missing if tail too small
  std::vector<int> flagged;              // indices with k > 0.7
  double tail_fraction = 0.2;
};

// Importance ratios exp(-loglik) per observation; generalized Pareto shape
// fitted to the largest 20% of ratios (Zhang-Stephens profile method).
ParetoKReport psis_pareto_k(const Eigen::MatrixXd& loglik);

// Shape of a generalized Pareto fitted to exceedances (sorted or not).
double gpd_shape(std::vector<double> exceedances);

struct MarginalCurve {
  int category = -1;  // ordinal category; -1 for the negbin mean curve
  std::vector<double> grid;
  std::vector<mcmc::Summary> response;  // one per grid value
};

// Expected outcome over a covariate grid with other covariates at their
// sample means and a_V = 0. Ordinal: one curve per category (probabilities);
// negbin: a single mean-count curve.
std::vector<MarginalCurve> marginal_effect(const mcmc::PosteriorDraws& draws,
                                           const glmm::ModelData& data,
                                           const glmm::ModelSpec& spec,
                                           const std::string& covariate,
                                           const std::vector<double>& grid);

// Draws x new-rows matrix of simulated outcomes; rows must reference villages
// present in the fit. Deterministic given seed.
Eigen::MatrixXi posterior_predict(const mcmc::PosteriorDraws& draws, const glmm::ModelData& data,
                                  const glmm::ModelSpec& spec,
                                  const std::vector<data::CoopRow>& new_rows, std::uint64_t seed);

}  // namespace coopnet::postfit
