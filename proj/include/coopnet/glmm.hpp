#pragma once
// Model specifications, log-likelihoods, priors and exact gradients for the
// two outcome families: ordered-logistic game offers and negative-binomial
// yearly cooperation counts, each with a village random intercept.
//
// The sampler works on an unconstrained parameter vector; reported draws are
// on the constrained scale (ordered cutpoints, positive sigma/theta, village
// effects a_V = sigma * z_V from the non-centered parameterization).

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coopnet/dataset.hpp"

namespace coopnet::glmm {

enum class Family { ordered_logistic, negative_binomial };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct PriorSet {
  double beta_scale = 5.0;        // betas ~ normal(0, beta_scale)
  double intercept_scale = 10.0;  // intercept and cutpoints ~ student_t(3, 0, intercept_scale)
  double sigma_scale = 2.5;       // sigma_village ~ half_student_t(3, 0, sigma_scale)
  double theta_shape = 0.01;      // theta ~ gamma(theta_shape, theta_rate)
  double theta_rate = 0.01;
};

struct ModelSpec {
  Family family = Family::negative_binomial;
  std::string outcome;                  // "dg" | "ug" | "mayu"
  std::vector<std::string> covariates;  // from {overlap_i, overlap_V, size_V}
  int n_categories = 0;                 // ordinal K; 0 = derive from data
  PriorSet priors;
};

// Fit-ready dense view of a CoopDataset for one model: rows missing this
// model's outcome are dropped, covariates are materialized as columns.
struct ModelData {
  Eigen::MatrixXd X;                     // n x p
  Eigen::VectorXi y;                     // category (ordinal) or count (negbin)
  Eigen::VectorXi village;               // 0-based village index per row
  std::vector<std::string> village_ids;  // sorted; index -> id
  std::vector<std::string> covariate_names;
  Eigen::VectorXd lgamma_y1;             // cached lgamma(y+1), negbin only
  int n_categories = 0;

  int n() const { return static_cast<int>(y.size()); }
  int n_covariates() const { return static_cast<int>(X.cols()); }
  int n_villages() const { return static_cast<int>(village_ids.size()); }
};

ModelData build_model_data(const data::CoopDataset& ds, const ModelSpec& spec);

// Covariate value for one dataset row; "intercept" yields 1, "size_V" is the
// village population divided by 100.
double covariate_value(const data::CoopRow& row, const std::string& name);

// Index bookkeeping between the unconstrained sampling vector and the
// constrained, named parameter vector.
struct ParamLayout {
  Family family = Family::negative_binomial;
  int p = 0;  // covariates
  int V = 0;  // villages
  int K = 0;  // ordinal categories (0 for negbin)

  static ParamLayout of(const ModelData& data, const ModelSpec& spec);

  int unconstrained_dim() const;
  int constrained_dim() const;
  std::vector<std::string> constrained_names(const std::vector<std::string>& covariates,
                                             const std::vector<std::string>& village_ids) const;

  // unconstrained vector offsets
  int u_intercept() const { return 0; }                       // negbin only
  int u_beta(int k) const { return has_intercept() + k; }
  int u_cut(int j) const { return p + j; }                    // ordinal only
  int u_z(int v) const { return has_intercept() + p + n_cut() + v; }
  int u_log_sigma() const { return has_intercept() + p + n_cut() + V; }
  int u_log_theta() const { return u_log_sigma() + 1; }       // negbin only

  // constrained vector offsets
  int c_intercept() const { return 0; }
  int c_beta(int k) const { return has_intercept() + k; }
  int c_tau(int j) const { return p + j; }
  int c_sigma() const { return has_intercept() + p + n_cut(); }
  int c_theta() const { return c_sigma() + 1; }
  int c_a(int v) const { return c_sigma() + 1 + has_theta() + v; }

  int has_intercept() const { return family == Family::negative_binomial ? 1 : 0; }
  int has_theta() const { return family == Family::negative_binomial ? 1 : 0; }
  int n_cut() const { return family == Family::ordered_logistic ? K - 1 : 0; }
};

// --- likelihood kernels ---------------------------------------------------

// log Pr(category | eta, cutpoints) under the cumulative logistic model
// Pr(y <= c) = F(tau_{c+1} - eta). Cutpoints must be strictly increasing.
double ordered_logistic_logpmf(int category, double eta, const Eigen::VectorXd& cutpoints);

// All K category log-probabilities at once.
Eigen::VectorXd ordered_logistic_logprobs(double eta, const Eigen::VectorXd& cutpoints);

// NB2 log-pmf with mean mu and variance mu + mu^2/theta. y must be a
// nonnegative integer value.
double negbin_logpmf(double y, double mu, double theta);

// eta = a_V + sum_k beta_k x_k; include an "intercept" entry in betas for the
// negative-binomial family.
double linear_predictor(const data::CoopRow& row, const std::map<std::string, double>& betas,
                        double a_v);

// --- transforms -------------------------------------------------------------

Eigen::VectorXd constrain(const Eigen::VectorXd& q, const ParamLayout& layout);
Eigen::VectorXd unconstrain(const Eigen::VectorXd& constrained, const ParamLayout& layout);

// --- posterior --------------------------------------------------------------

// All take the unconstrained vector. log_posterior = log_likelihood +
// log_prior, where log_prior includes the z ~ N(0,1) terms and the
// change-of-variable Jacobians. NaN results throw; -inf is returned as-is
// (out-of-support proposal).
double log_likelihood(const Eigen::VectorXd& q, const ModelData& data, const ModelSpec& spec);
double log_prior(const Eigen::VectorXd& q, const ModelData& data, const ModelSpec& spec);
double log_posterior(const Eigen::VectorXd& q, const ModelData& data, const ModelSpec& spec);
Eigen::VectorXd grad_log_posterior(const Eigen::VectorXd& q, const ModelData& data,
                                   const ModelSpec& spec);
double log_posterior_with_grad(const Eigen::VectorXd& q, const ModelData& data,
                               const ModelSpec& spec, Eigen::VectorXd& grad);

// Pointwise log-likelihood of one row given a constrained parameter vector.
double row_loglik(const ModelData& data, const ModelSpec& spec,
                  const Eigen::VectorXd& constrained, int row);

}  // namespace coopnet::glmm
