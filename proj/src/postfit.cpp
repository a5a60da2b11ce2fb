#include "coopnet/postfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coopnet/rng.hpp"
#include "coopnet/special.hpp"

namespace coopnet::postfit {

double icc_ordinal_point(double var_village) {
  if (!(var_village >= 0)) throw std::invalid_argument("icc_ordinal: variance must be nonnegative");
  return var_village / (var_village + kOrdinalLevel1Variance);
}

double icc_negbin_point(double var_village, double lambda, double theta) {
  if (!(var_village >= 0)) throw std::invalid_argument("icc_negbin: variance must be nonnegative");
  if (!(lambda > 0) || !(theta > 0))
    throw std::invalid_argument("icc_negbin: lambda and theta must be positive");
  const double var_eps = special::trigamma(1.0 / (1.0 / lambda + 1.0 / theta));
  return var_village / (var_village + var_eps);
}

namespace {

PosteriorQuantity quantity(const Eigen::VectorXd& per_draw) {
  PosteriorQuantity q;
  q.median = mcmc::quantile(per_draw, 0.5);
  q.lower = mcmc::quantile(per_draw, 0.055);
  q.upper = mcmc::quantile(per_draw, 0.945);
  return q;
}

}  // namespace

IccReport icc_report(const mcmc::PosteriorDraws& draws, const glmm::ModelData& data,
                     const glmm::ModelSpec& spec, const std::string& label) {
  IccReport report;
  report.model_label = label;
  report.family = spec.family;
  const Eigen::VectorXd sigma = draws.flat(draws.param_index("sigma_village"));
  const Eigen::VectorXd var_v = sigma.array().square();
  report.var_village = quantity(var_v);

  const long s = var_v.size();
  Eigen::VectorXd icc(s), var_eps(s);
  if (spec.family == glmm::Family::ordered_logistic) {
    for (long i = 0; i < s; ++i) {
      var_eps(i) = kOrdinalLevel1Variance;
      icc(i) = icc_ordinal_point(var_v(i));
    }
    report.note =
        "latent-scale ordinal ICC; estimates of this kind can be much lower than the true ICC";
  } else {
    if (data.n() == 0) throw std::invalid_argument("icc_negbin needs a nonempty outcome");
    report.lambda = data.y.cast<double>().mean();
    const Eigen::VectorXd theta = draws.flat(draws.param_index("theta"));
    for (long i = 0; i < s; ++i) {
      var_eps(i) = special::trigamma(1.0 / (1.0 / report.lambda + 1.0 / theta(i)));
      icc(i) = var_v(i) / (var_v(i) + var_eps(i));
    }
  }
  report.var_level1 = quantity(var_eps);
  report.icc = quantity(icc);
  return report;
}

Eigen::MatrixXd pointwise_loglik(const mcmc::PosteriorDraws& draws, const glmm::ModelData& data,
                                 const glmm::ModelSpec& spec) {
  const long total = static_cast<long>(draws.n_chains()) * draws.n_draws_per_chain();
  Eigen::MatrixXd ll(total, data.n());
  long row = 0;
  for (int c = 0; c < draws.n_chains(); ++c) {
    const Eigen::MatrixXd& chain = draws.chains[c];
    for (long s = 0; s < chain.rows(); ++s, ++row) {
      const Eigen::VectorXd params = chain.row(s);
      for (int i = 0; i < data.n(); ++i) ll(row, i) = glmm::row_loglik(data, spec, params, i);
    }
  }
  return ll;
}

double gpd_shape(std::vector<double> z) {
  const long m = static_cast<long>(z.size());
  if (m < 5) throw std::invalid_argument("gpd_shape needs at least 5 exceedances");
  std::sort(z.begin(), z.end());
  if (!(z.back() > 0)) return 0.0;  // no tail spread

  // Zhang & Stephens (2009): profile likelihood over a fixed theta grid,
  // posterior-mean theta, then k = mean log1p(-theta z).
  const long grid = 30 + static_cast<long>(std::floor(std::sqrt(static_cast<double>(m))));
  const long q_idx = std::max<long>(0, static_cast<long>(std::floor(m / 4.0 + 0.5)) - 1);
  const double quartile = std::max(z[q_idx], 1e-300);
  std::vector<double> theta(grid), proflik(grid);
  for (long j = 0; j < grid; ++j) {
    theta[j] = 1.0 / z[m - 1] +
               (1.0 - std::sqrt(static_cast<double>(grid) / (static_cast<double>(j) + 0.5))) /
                   (3.0 * quartile);
    // profile likelihood in the Zhang-Stephens parameterization, whose shape
    // is the negative of the reported (Pickands) shape
    double xi = 0.0;
    for (double zi : z) xi += std::log1p(-theta[j] * zi);
    xi /= static_cast<double>(m);
    proflik[j] = static_cast<double>(m) * (std::log(-theta[j] / xi) - xi - 1.0);
    if (!std::isfinite(proflik[j])) proflik[j] = -std::numeric_limits<double>::infinity();
  }
  // normalized profile-likelihood weights
  double theta_hat = 0.0;
  for (long j = 0; j < grid; ++j) {
    double denom = 0.0;
    for (long l = 0; l < grid; ++l) denom += std::exp(proflik[l] - proflik[j]);
    theta_hat += theta[j] / denom;
  }
  double k = 0.0;
  for (double zi : z) k += std::log1p(-theta_hat * zi);
  return k / static_cast<double>(m);
}

ParetoKReport psis_pareto_k(const Eigen::MatrixXd& loglik) {
  const long s = loglik.rows();
  if (s < 100) throw std::invalid_argument("psis_pareto_k needs at least 100 draws");
  ParetoKReport report;
  const long tail = static_cast<long>(std::floor(0.2 * static_cast<double>(s)));
  for (long i = 0; i < loglik.cols(); ++i) {
    // importance ratios exp(-loglik), rescaled by their maximum
    std::vector<double> r(s);
    const double max_neg = -loglik.col(i).minCoeff();
    for (long j = 0; j < s; ++j) r[j] = std::exp(-loglik(j, i) - max_neg);
    std::sort(r.begin(), r.end());
    const double threshold = r[s - tail - 1];
    std::vector<double> exceed;
    exceed.reserve(tail);
    for (long j = s - tail; j < s; ++j)
      if (r[j] > threshold) exceed.push_back(r[j] - threshold);
    if (exceed.empty() || !(r.back() - threshold > 1e-14)) {
      report.k.push_back(0.0);  // flat tail, no fit needed
      continue;
    }
    if (static_cast<long>(exceed.size()) < 5) {
      report.k.push_back(std::nullopt);
      continue;
    }
    report.k.push_back(gpd_shape(std::move(exceed)));
  }
  for (size_t i = 0; i < report.k.size(); ++i)
    if (report.k[i] && *report.k[i] > 0.7) report.flagged.push_back(static_cast<int>(i));
  return report;
}

std::vector<MarginalCurve> marginal_effect(const mcmc::PosteriorDraws& draws,
                                           const glmm::ModelData& data,
                                           const glmm::ModelSpec& spec,
                                           const std::string& covariate,
                                           const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("marginal_effect: empty grid");
  const glmm::ParamLayout lay = glmm::ParamLayout::of(data, spec);
  int cov_index = -1;
  for (int k = 0; k < lay.p; ++k)
    if (data.covariate_names[k] == covariate) cov_index = k;
  if (cov_index < 0)
    throw std::invalid_argument("covariate `" + covariate + "` is not in the model");
  const Eigen::VectorXd xbar = data.X.colwise().mean();

  const long total = static_cast<long>(draws.n_chains()) * draws.n_draws_per_chain();
  const int n_curves = spec.family == glmm::Family::ordered_logistic ? lay.K : 1;
  std::vector<MarginalCurve> curves(n_curves);
  for (int c = 0; c < n_curves; ++c) {
    curves[c].category = spec.family == glmm::Family::ordered_logistic ? c : -1;
    curves[c].grid = grid;
    curves[c].response.resize(grid.size());
  }

  Eigen::VectorXd values(total);
  for (size_t g = 0; g < grid.size(); ++g) {
    Eigen::MatrixXd per_draw(total, n_curves);
    long row = 0;
    for (int ch = 0; ch < draws.n_chains(); ++ch) {
      const Eigen::MatrixXd& chain = draws.chains[ch];
      for (long s = 0; s < chain.rows(); ++s, ++row) {
        double eta = lay.has_intercept() ? chain(s, lay.c_intercept()) : 0.0;
        for (int k = 0; k < lay.p; ++k) {
          const double x = (k == cov_index) ? grid[g] : xbar(k);
          eta += x * chain(s, lay.c_beta(k));
        }
        if (spec.family == glmm::Family::ordered_logistic) {
          Eigen::VectorXd tau(lay.n_cut());
          for (int j = 0; j < lay.n_cut(); ++j) tau(j) = chain(s, lay.c_tau(j));
          const Eigen::VectorXd lp = glmm::ordered_logistic_logprobs(eta, tau);
          for (int c = 0; c < lay.K; ++c) per_draw(row, c) = std::exp(lp(c));
        } else {
          per_draw(row, 0) = std::exp(eta);
        }
      }
    }
    for (int c = 0; c < n_curves; ++c)
      curves[c].response[g] = mcmc::summarize(per_draw.col(c), 0.89);
  }
  return curves;
}

Eigen::MatrixXi posterior_predict(const mcmc::PosteriorDraws& draws, const glmm::ModelData& data,
                                  const glmm::ModelSpec& spec,
                                  const std::vector<data::CoopRow>& new_rows, std::uint64_t seed) {
  const glmm::ParamLayout lay = glmm::ParamLayout::of(data, spec);
  std::map<std::string, int> vindex;
  for (size_t v = 0; v < data.village_ids.size(); ++v)
    vindex[data.village_ids[v]] = static_cast<int>(v);

  const long total = static_cast<long>(draws.n_chains()) * draws.n_draws_per_chain();
  Eigen::MatrixXi out(total, static_cast<long>(new_rows.size()));
  rng::Rng rng(seed);
  long row = 0;
  for (int ch = 0; ch < draws.n_chains(); ++ch) {
    const Eigen::MatrixXd& chain = draws.chains[ch];
    for (long s = 0; s < chain.rows(); ++s, ++row) {
      for (size_t i = 0; i < new_rows.size(); ++i) {
        auto it = vindex.find(new_rows[i].village_id);
        if (it == vindex.end())
          throw std::invalid_argument("village " + new_rows[i].village_id +
                                      " was not present in the fitted data");
        double eta = chain(s, lay.c_a(it->second));
        if (lay.has_intercept()) eta += chain(s, lay.c_intercept());
        for (int k = 0; k < lay.p; ++k)
          eta += glmm::covariate_value(new_rows[i], data.covariate_names[k]) *
                 chain(s, lay.c_beta(k));
        if (spec.family == glmm::Family::ordered_logistic) {
          Eigen::VectorXd tau(lay.n_cut());
          for (int j = 0; j < lay.n_cut(); ++j) tau(j) = chain(s, lay.c_tau(j));
          // latent logistic draw; category = number of cutpoints below it
          const double u = rng.uniform_pos();
          const double latent = eta + std::log(u / (1.0 - u));
          int cat = 0;
          for (int j = 0; j < lay.n_cut(); ++j) cat += latent > tau(j) ? 1 : 0;
          out(row, static_cast<long>(i)) = cat;
        } else {
          const double theta = chain(s, lay.c_theta());
          const double g = rng.gamma(theta, theta);  // mean-one gamma mixing
          out(row, static_cast<long>(i)) = static_cast<int>(rng.poisson(std::exp(eta) * g));
        }
      }
    }
  }
  return out;
}

}  // namespace coopnet::postfit
