#include "coopnet/glmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "coopnet/special.hpp"

namespace coopnet::glmm {

using special::digamma;
using special::inv_logit;
using special::log1m_exp;
using special::log1p_exp;
using special::log_gamma;
using special::log_inv_logit;
using special::log_sum_exp;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_student_t(double x, double nu, double scale) {
  const double u = x / scale;
  return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
         0.5 * std::log(nu * 3.14159265358979323846) - std::log(scale) -
         0.5 * (nu + 1.0) * std::log1p(u * u / nu);
}

// d/dx log t_nu(x / scale)
double dlog_student_t(double x, double nu, double scale) {
  return -(nu + 1.0) * x / (nu * scale * scale + x * x);
}

double log_normal_density(double x, double sd) {
  const double u = x / sd;
  return -0.5 * u * u - std::log(sd) - 0.91893853320467274178;
}

}  // namespace

std::string to_string(Family f) {
  return f == Family::ordered_logistic ? "ordered_logistic" : "negative_binomial";
}

Family family_from_string(const std::string& s) {
  if (s == "ordered_logistic") return Family::ordered_logistic;
  if (s == "negative_binomial") return Family::negative_binomial;
  throw std::invalid_argument("unknown family `" + s +
                              "`, expected ordered_logistic|negative_binomial");
}

double covariate_value(const data::CoopRow& row, const std::string& name) {
  if (name == "intercept") return 1.0;
  if (name == "overlap_i") return row.overlap_i;
  if (name == "overlap_V") return row.overlap_V;
  if (name == "size_V") {
    if (!row.village_size)
      throw std::invalid_argument("row for person " + row.person_id +
                                  " has no village_size but the model uses size_V");
    return *row.village_size / 100.0;
  }
  throw std::invalid_argument("unknown covariate `" + name + "`");
}

ModelData build_model_data(const data::CoopDataset& ds, const ModelSpec& spec) {
  const bool ordinal = spec.family == Family::ordered_logistic;
  if (ordinal && spec.outcome != "dg" && spec.outcome != "ug")
    throw std::invalid_argument("ordered_logistic expects outcome dg or ug, got " + spec.outcome);
  if (!ordinal && spec.outcome != "mayu")
    throw std::invalid_argument("negative_binomial expects outcome mayu, got " + spec.outcome);

  std::vector<int> keep;
  std::vector<long> outcomes;
  for (size_t i = 0; i < ds.rows.size(); ++i) {
    const auto& row = ds.rows[i];
    std::optional<long> y;
    if (spec.outcome == "dg" && row.dg_category) y = *row.dg_category;
    if (spec.outcome == "ug" && row.ug_category) y = *row.ug_category;
    if (spec.outcome == "mayu" && row.mayu_yearly) y = *row.mayu_yearly;
    if (y) {
      keep.push_back(static_cast<int>(i));
      outcomes.push_back(*y);
    }
  }

  ModelData md;
  md.covariate_names = spec.covariates;
  const int n = static_cast<int>(keep.size());
  const int p = static_cast<int>(spec.covariates.size());
  md.X.resize(n, p);
  md.y.resize(n);
  md.village.resize(n);

  std::set<std::string> vset;
  for (int i : keep) vset.insert(ds.rows[i].village_id);
  md.village_ids.assign(vset.begin(), vset.end());
  std::map<std::string, int> vindex;
  for (size_t v = 0; v < md.village_ids.size(); ++v) vindex[md.village_ids[v]] = static_cast<int>(v);

  for (int r = 0; r < n; ++r) {
    const auto& row = ds.rows[keep[r]];
    for (int k = 0; k < p; ++k) md.X(r, k) = covariate_value(row, spec.covariates[k]);
    md.y(r) = static_cast<int>(outcomes[r]);
    md.village(r) = vindex.at(row.village_id);
  }

  if (ordinal) {
    md.n_categories = spec.n_categories;
    if (md.n_categories == 0) {
      if (n == 0)
        throw std::invalid_argument("cannot derive category count from an empty dataset; "
                                    "set n_categories explicitly");
      md.n_categories = md.y.maxCoeff() + 1;
    }
    if (md.n_categories < 2)
      throw std::invalid_argument("ordinal outcome needs at least 2 categories");
    if (n > 0 && md.y.maxCoeff() >= md.n_categories)
      throw std::invalid_argument("outcome category exceeds n_categories");
    if (n > 0 && md.y.minCoeff() < 0) throw std::invalid_argument("negative outcome category");
  } else {
    if (n > 0 && md.y.minCoeff() < 0) throw std::invalid_argument("negative count outcome");
    md.lgamma_y1.resize(n);
    for (int r = 0; r < n; ++r) md.lgamma_y1(r) = log_gamma(md.y(r) + 1.0);
  }
  return md;
}

ParamLayout ParamLayout::of(const ModelData& data, const ModelSpec& spec) {
  ParamLayout layout;
  layout.family = spec.family;
  layout.p = data.n_covariates();
  layout.V = data.n_villages();
  layout.K = data.n_categories;
  return layout;
}

int ParamLayout::unconstrained_dim() const {
  return has_intercept() + p + n_cut() + V + 1 + has_theta();
}

int ParamLayout::constrained_dim() const { return unconstrained_dim(); }

std::vector<std::string> ParamLayout::constrained_names(
    const std::vector<std::string>& covariates, const std::vector<std::string>& village_ids) const {
  std::vector<std::string> names;
  if (has_intercept()) names.push_back("intercept");
  for (const auto& c : covariates) names.push_back("b_" + c);
  for (int j = 1; j <= n_cut(); ++j) names.push_back("tau[" + std::to_string(j) + "]");
  names.push_back("sigma_village");
  if (has_theta()) names.push_back("theta");
  for (const auto& v : village_ids) names.push_back("a_V[" + v + "]");
  return names;
}

// --- likelihood kernels -----------------------------------------------------

namespace {

void check_cutpoints(const Eigen::VectorXd& cutpoints) {
  for (int j = 1; j < cutpoints.size(); ++j)
    if (!(cutpoints(j) > cutpoints(j - 1)))
      throw std::invalid_argument("cutpoints must be strictly increasing");
}

// log[F(u) - F(l)] for u > l via F(u) F(-l) (1 - e^{l-u})
double log_logistic_interval(double l, double u) {
  return log_inv_logit(u) + log_inv_logit(-l) + log1m_exp(l - u);
}

double ordered_logistic_logpmf_unchecked(int c, double eta, const Eigen::VectorXd& tau) {
  const int K = static_cast<int>(tau.size()) + 1;
  if (c == 0) return log_inv_logit(tau(0) - eta);
  if (c == K - 1) return log_inv_logit(eta - tau(K - 2));
  return log_logistic_interval(tau(c - 1) - eta, tau(c) - eta);
}

double negbin_logpmf_core(double y, double eta, double theta, double lgamma_y1) {
  const double lt = std::log(theta);
  const double ls = log_sum_exp(lt, eta);  // log(theta + mu)
  return log_gamma(y + theta) - log_gamma(theta) - lgamma_y1 + theta * lt + y * eta -
         (y + theta) * ls;
}

}  // namespace

double ordered_logistic_logpmf(int category, double eta, const Eigen::VectorXd& cutpoints) {
  if (cutpoints.size() < 1) throw std::invalid_argument("need at least one cutpoint");
  check_cutpoints(cutpoints);
  const int K = static_cast<int>(cutpoints.size()) + 1;
  if (category < 0 || category >= K)
    throw std::invalid_argument("category " + std::to_string(category) + " outside 0.." +
                                std::to_string(K - 1));
  return ordered_logistic_logpmf_unchecked(category, eta, cutpoints);
}

Eigen::VectorXd ordered_logistic_logprobs(double eta, const Eigen::VectorXd& cutpoints) {
  check_cutpoints(cutpoints);
  const int K = static_cast<int>(cutpoints.size()) + 1;
  Eigen::VectorXd lp(K);
  for (int c = 0; c < K; ++c) lp(c) = ordered_logistic_logpmf_unchecked(c, eta, cutpoints);
  return lp;
}

double negbin_logpmf(double y, double mu, double theta) {
  if (!(mu > 0) || !(theta > 0))
    throw std::invalid_argument("negbin_logpmf: mu and theta must be positive");
  if (!(y >= 0) || y != std::floor(y))
    throw std::invalid_argument("negbin_logpmf: y must be a nonnegative integer");
  return negbin_logpmf_core(y, std::log(mu), theta, log_gamma(y + 1.0));
}

double linear_predictor(const data::CoopRow& row, const std::map<std::string, double>& betas,
                        double a_v) {
  double eta = a_v;
  for (const auto& [name, b] : betas) eta += b * covariate_value(row, name);
  return eta;
}

// --- transforms -------------------------------------------------------------

Eigen::VectorXd constrain(const Eigen::VectorXd& q, const ParamLayout& lay) {
  if (q.size() != lay.unconstrained_dim())
    throw std::invalid_argument("parameter vector has wrong dimension");
  Eigen::VectorXd c(lay.constrained_dim());
  if (lay.has_intercept()) c(lay.c_intercept()) = q(lay.u_intercept());
  for (int k = 0; k < lay.p; ++k) c(lay.c_beta(k)) = q(lay.u_beta(k));
  if (lay.n_cut() > 0) {
    double tau = q(lay.u_cut(0));
    c(lay.c_tau(0)) = tau;
    for (int j = 1; j < lay.n_cut(); ++j) {
      tau += std::exp(q(lay.u_cut(j)));
      c(lay.c_tau(j)) = tau;
    }
  }
  const double sigma = std::exp(q(lay.u_log_sigma()));
  c(lay.c_sigma()) = sigma;
  if (lay.has_theta()) c(lay.c_theta()) = std::exp(q(lay.u_log_theta()));
  for (int v = 0; v < lay.V; ++v) c(lay.c_a(v)) = sigma * q(lay.u_z(v));
  return c;
}

Eigen::VectorXd unconstrain(const Eigen::VectorXd& c, const ParamLayout& lay) {
  if (c.size() != lay.constrained_dim())
    throw std::invalid_argument("parameter vector has wrong dimension");
  Eigen::VectorXd q(lay.unconstrained_dim());
  if (lay.has_intercept()) q(lay.u_intercept()) = c(lay.c_intercept());
  for (int k = 0; k < lay.p; ++k) q(lay.u_beta(k)) = c(lay.c_beta(k));
  if (lay.n_cut() > 0) {
    q(lay.u_cut(0)) = c(lay.c_tau(0));
    for (int j = 1; j < lay.n_cut(); ++j) {
      const double gap = c(lay.c_tau(j)) - c(lay.c_tau(j - 1));
      if (!(gap > 0)) throw std::invalid_argument("cutpoints must be strictly increasing");
      q(lay.u_cut(j)) = std::log(gap);
    }
  }
  const double sigma = c(lay.c_sigma());
  if (!(sigma > 0)) throw std::invalid_argument("sigma_village must be positive");
  q(lay.u_log_sigma()) = std::log(sigma);
  if (lay.has_theta()) {
    if (!(c(lay.c_theta()) > 0)) throw std::invalid_argument("theta must be positive");
    q(lay.u_log_theta()) = std::log(c(lay.c_theta()));
  }
  for (int v = 0; v < lay.V; ++v) q(lay.u_z(v)) = c(lay.c_a(v)) / sigma;
  return q;
}

// --- posterior --------------------------------------------------------------

namespace {

struct Eval {
  double loglik = 0.0;
  double logprior = 0.0;
};

// One pass over data and priors; writes the gradient of loglik+logprior into
// *grad when non-null. Returns NaN components if the math produced NaN (the
// public wrappers turn that into an error naming the culprit).
Eval eval_posterior(const Eigen::VectorXd& q, const ModelData& data, const ModelSpec& spec,
                    Eigen::VectorXd* grad) {
  const ParamLayout lay = ParamLayout::of(data, spec);
  if (q.size() != lay.unconstrained_dim())
    throw std::invalid_argument("parameter vector has dimension " + std::to_string(q.size()) +
                                ", model expects " + std::to_string(lay.unconstrained_dim()));
  const PriorSet& pri = spec.priors;
  const bool ordinal = spec.family == Family::ordered_logistic;
  const double sigma = std::exp(q(lay.u_log_sigma()));

  Eval out;
  if (grad) grad->setZero(lay.unconstrained_dim());

  // cutpoints on the constrained scale
  Eigen::VectorXd tau;
  if (ordinal) {
    tau.resize(lay.n_cut());
    double t = q(lay.u_cut(0));
    tau(0) = t;
    for (int j = 1; j < lay.n_cut(); ++j) {
      t += std::exp(q(lay.u_cut(j)));
      tau(j) = t;
    }
  }

  Eigen::VectorXd g_tau = Eigen::VectorXd::Zero(lay.n_cut());
  const int n = data.n();
  const double theta = lay.has_theta() ? std::exp(q(lay.u_log_theta())) : 0.0;
  const double digamma_theta = (lay.has_theta() && n > 0) ? digamma(theta) : 0.0;
  const double log_theta = lay.has_theta() ? std::log(theta) : 0.0;

  for (int i = 0; i < n; ++i) {
    const int v = data.village(i);
    double eta = sigma * q(lay.u_z(v));
    if (lay.has_intercept()) eta += q(lay.u_intercept());
    for (int k = 0; k < lay.p; ++k) eta += data.X(i, k) * q(lay.u_beta(k));

    double g_eta = 0.0;
    if (ordinal) {
      const int c = data.y(i);
      if (c == 0) {
        const double u = tau(0) - eta;
        out.loglik += log_inv_logit(u);
        const double w = inv_logit(-u);  // 1 - F(u)
        g_tau(0) += w;
        g_eta -= w;
      } else if (c == lay.K - 1) {
        const double l = tau(lay.n_cut() - 1) - eta;
        out.loglik += log_inv_logit(-l);
        const double w = inv_logit(l);  // F(l)
        g_tau(lay.n_cut() - 1) -= w;
        g_eta += w;
      } else {
        const double l = tau(c - 1) - eta;
        const double u = tau(c) - eta;
        const double d = u - l;
        out.loglik += log_logistic_interval(l, u);
        const double one_m_emd = -std::expm1(-d);
        // F'(u)/p and F'(l)/p in overflow-safe form
        const double gu = inv_logit(-u) / (inv_logit(-l) * one_m_emd);
        const double gl = inv_logit(l) / (inv_logit(u) * one_m_emd);
        g_tau(c) += gu;
        g_tau(c - 1) -= gl;
        g_eta += gl - gu;
      }
    } else {
      const double y = data.y(i);
      const double ls = log_sum_exp(log_theta, eta);  // log(theta + mu)
      out.loglik += log_gamma(y + theta) - log_gamma(theta) - data.lgamma_y1(i) +
                    theta * log_theta + y * eta - (y + theta) * ls;
      if (grad) {
        g_eta = y - (y + theta) * std::exp(eta - ls);
        const double dtheta = digamma(y + theta) - digamma_theta + log_theta + 1.0 - ls -
                              (y + theta) * std::exp(-ls);
        (*grad)(lay.u_log_theta()) += theta * dtheta;
      }
    }

    if (grad) {
      if (lay.has_intercept()) (*grad)(lay.u_intercept()) += g_eta;
      for (int k = 0; k < lay.p; ++k) (*grad)(lay.u_beta(k)) += g_eta * data.X(i, k);
      (*grad)(lay.u_z(v)) += g_eta * sigma;
      (*grad)(lay.u_log_sigma()) += g_eta * sigma * q(lay.u_z(v));
    }
  }

  // priors + Jacobians (all on the unconstrained scale)
  for (int k = 0; k < lay.p; ++k) {
    const double b = q(lay.u_beta(k));
    out.logprior += log_normal_density(b, pri.beta_scale);
    if (grad) (*grad)(lay.u_beta(k)) -= b / (pri.beta_scale * pri.beta_scale);
  }
  if (lay.has_intercept()) {
    const double b0 = q(lay.u_intercept());
    out.logprior += log_student_t(b0, 3.0, pri.intercept_scale);
    if (grad) (*grad)(lay.u_intercept()) += dlog_student_t(b0, 3.0, pri.intercept_scale);
  }
  if (ordinal) {
    for (int j = 0; j < lay.n_cut(); ++j) {
      out.logprior += log_student_t(tau(j), 3.0, pri.intercept_scale);
      g_tau(j) += dlog_student_t(tau(j), 3.0, pri.intercept_scale);
    }
    for (int j = 1; j < lay.n_cut(); ++j) out.logprior += q(lay.u_cut(j));  // log|J|
    if (grad) {
      // tau_j depends on cut_raw_m for all m <= j
      double suffix = 0.0;
      for (int j = lay.n_cut() - 1; j >= 1; --j) {
        suffix += g_tau(j);
        (*grad)(lay.u_cut(j)) += std::exp(q(lay.u_cut(j))) * suffix + 1.0;
      }
      (*grad)(lay.u_cut(0)) += suffix + g_tau(0);
    }
  }
  for (int v = 0; v < lay.V; ++v) {
    const double z = q(lay.u_z(v));
    out.logprior += -0.5 * z * z - 0.91893853320467274178;
    if (grad) (*grad)(lay.u_z(v)) -= z;
  }
  {
    const double s = q(lay.u_log_sigma());
    out.logprior += std::log(2.0) + log_student_t(sigma, 3.0, pri.sigma_scale) + s;
    if (grad)
      (*grad)(lay.u_log_sigma()) += sigma * dlog_student_t(sigma, 3.0, pri.sigma_scale) + 1.0;
  }
  if (lay.has_theta()) {
    const double t = q(lay.u_log_theta());
    out.logprior += pri.theta_shape * std::log(pri.theta_rate) - log_gamma(pri.theta_shape) +
                    pri.theta_shape * t - pri.theta_rate * theta;
    if (grad) (*grad)(lay.u_log_theta()) += pri.theta_shape - pri.theta_rate * theta;
  }
  return out;
}

[[noreturn]] void report_nonfinite(const Eigen::VectorXd& q, const ModelData& data,
                                   const ModelSpec& spec) {
  const ParamLayout lay = ParamLayout::of(data, spec);
  for (int i = 0; i < q.size(); ++i)
    if (!std::isfinite(q(i)))
      throw std::runtime_error("non-finite log posterior: parameter " + std::to_string(i) +
                               " is not finite");
  const Eigen::VectorXd c = constrain(q, lay);
  for (int i = 0; i < data.n(); ++i) {
    const double ll = row_loglik(data, spec, c, i);
    if (std::isnan(ll))
      throw std::runtime_error("non-finite log posterior at data row " + std::to_string(i));
  }
  throw std::runtime_error("non-finite log posterior (prior term)");
}

}  // namespace

double log_likelihood(const Eigen::VectorXd& q, const ModelData& data, const ModelSpec& spec) {
  const double v = eval_posterior(q, data, spec, nullptr).loglik;
  if (std::isnan(v)) report_nonfinite(q, data, spec);
  return v;
}

double log_prior(const Eigen::VectorXd& q, const ModelData& data, const ModelSpec& spec) {
  const double v = eval_posterior(q, data, spec, nullptr).logprior;
  if (std::isnan(v)) report_nonfinite(q, data, spec);
  return v;
}

double log_posterior(const Eigen::VectorXd& q, const ModelData& data, const ModelSpec& spec) {
  const Eval e = eval_posterior(q, data, spec, nullptr);
  const double v = e.loglik + e.logprior;
  if (std::isnan(v)) report_nonfinite(q, data, spec);
  return v;
}

double log_posterior_with_grad(const Eigen::VectorXd& q, const ModelData& data,
                               const ModelSpec& spec, Eigen::VectorXd& grad) {
  const Eval e = eval_posterior(q, data, spec, &grad);
  const double v = e.loglik + e.logprior;
  if (std::isnan(v)) report_nonfinite(q, data, spec);
  return v;
}

Eigen::VectorXd grad_log_posterior(const Eigen::VectorXd& q, const ModelData& data,
                                   const ModelSpec& spec) {
  Eigen::VectorXd grad;
  log_posterior_with_grad(q, data, spec, grad);
  return grad;
}

double row_loglik(const ModelData& data, const ModelSpec& spec,
                  const Eigen::VectorXd& constrained, int row) {
  const ParamLayout lay = ParamLayout::of(data, spec);
  if (constrained.size() != lay.constrained_dim())
    throw std::invalid_argument("constrained vector has wrong dimension");
  const int v = data.village(row);
  double eta = constrained(lay.c_a(v));
  if (lay.has_intercept()) eta += constrained(lay.c_intercept());
  for (int k = 0; k < lay.p; ++k) eta += data.X(row, k) * constrained(lay.c_beta(k));
  if (spec.family == Family::ordered_logistic) {
    const Eigen::VectorXd tau = constrained.segment(lay.c_tau(0), lay.n_cut());
    return ordered_logistic_logpmf_unchecked(data.y(row), eta, tau);
  }
  return negbin_logpmf_core(data.y(row), eta, constrained(lay.c_theta()), data.lgamma_y1(row));
}

}  // namespace coopnet::glmm
