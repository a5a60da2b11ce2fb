#pragma once
// Gradient-based MCMC: dynamic-trajectory (no-U-turn) Hamiltonian sampling
// with dual-averaging step-size adaptation and diagonal mass-matrix
// estimation during warmup, plus the standard convergence diagnostics.
//
// Chains are independent streams seeded from hash(seed, chain_index), so runs
// are bit-identical for a given (seed, config, target) regardless of whether
// chains execute in parallel or sequentially.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace coopnet::mcmc {

// Log-density target on an unconstrained space. to_constrained maps a draw to
// the reported parameterization (identity by default).
class Target {
 public:
  virtual ~Target() = default;
  virtual int dim() const = 0;
  virtual double logp_grad(const Eigen::VectorXd& q, Eigen::VectorXd& grad) const = 0;
  virtual std::vector<std::string> names() const;
  virtual Eigen::VectorXd to_constrained(const Eigen::VectorXd& q) const;
};

struct SamplerConfig {
  int n_chains = 4;
  int n_warmup = 1000;
  int n_draws = 1000;
  std::uint64_t seed = 2025;
  double target_acceptance = 0.9;
  int max_leapfrog_depth = 10;
  bool parallel_chains = true;
  double init_radius = 2.0;  // initial values ~ uniform(-r, r) on the unconstrained scale
};

struct PosteriorDraws {
  std::vector<std::string> parameter_names;
  std::vector<Eigen::MatrixXd> chains;                // per chain: n_draws x n_params
  std::vector<std::vector<std::uint8_t>> divergent;   // per chain, per iteration
  std::vector<std::uint64_t> chain_seeds;
  SamplerConfig config;
  bool failed = false;  // > 25% divergent iterations

  int n_chains() const { return static_cast<int>(chains.size()); }
  int n_draws_per_chain() const { return chains.empty() ? 0 : static_cast<int>(chains[0].rows()); }
  int n_params() const { return static_cast<int>(parameter_names.size()); }
  long n_divergent() const;
  int param_index(const std::string& name) const;  // throws if absent

  // draws of one parameter, iterations x chains
  Eigen::MatrixXd by_chain(int param) const;
  // all chains stacked, chain-major
  Eigen::VectorXd flat(int param) const;
};

PosteriorDraws run_chains(const Target& target, const SamplerConfig& config);

// Split potential-scale-reduction over an iterations x chains matrix.
// Throws if every split sequence has zero variance.
double rhat(const Eigen::MatrixXd& draws);

// Autocorrelation-based effective sample size (Geyer initial monotone
// sequence, chains combined). Throws on constant input.
double ess(const Eigen::MatrixXd& draws);

struct Summary {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Central credible interval via linear-interpolation quantiles at
// (1-level)/2 and 1-(1-level)/2.
Summary summarize(const Eigen::VectorXd& draws, double level = 0.89);

// Linear-interpolation quantile (the h = (n-1)p + 1 rule).
double quantile(const Eigen::VectorXd& draws, double p);

// One leapfrog step under a diagonal inverse metric; updates q, p, grad and
// logp in place. Exposed for integrator tests.
void leapfrog(const Target& target, Eigen::VectorXd& q, Eigen::VectorXd& p, Eigen::VectorXd& grad,
              double& logp, double step, const Eigen::VectorXd& inv_metric);

}  // namespace coopnet::mcmc
