// Acceptance suite: end-to-end checks of the numeric claims this project is
// built around, one printed pass/fail line per criterion. Returns nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coopnet/fit.hpp"
#include "coopnet/io.hpp"
#include "coopnet/network.hpp"
#include "coopnet/postfit.hpp"
#include "coopnet/rng.hpp"
#include "coopnet/synth.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace coopnet;

namespace {

int n_failed_criteria = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++n_failed_criteria;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void criterion_1_overlap_worked_example() {
  // 37 single-layer alters, 8 two-layer, 1 three-layer: 19 of 56 interactions
  std::vector<net::Tie> ties;
  for (int i = 0; i < 37; ++i)
    ties.push_back({"ego", "s" + std::to_string(i), "d0", net::Direction::get});
  for (int i = 0; i < 8; ++i) {
    ties.push_back({"ego", "m" + std::to_string(i), "d1", net::Direction::get});
    ties.push_back({"ego", "m" + std::to_string(i), "d2", net::Direction::give});
  }
  ties.push_back({"ego", "t", "d3", net::Direction::get});
  ties.push_back({"ego", "t", "d4", net::Direction::give});
  ties.push_back({"ego", "t", "d5", net::Direction::joint});

  const auto score = net::individual_overlap(net::build_network("ego", ties));
  const double rounded = std::round(score.value * 1000.0) / 1000.0;
  const bool pass = score.n_interactions == 56 && score.n_multidomain == 19 &&
                    score.value == 19.0 / 56.0 && rounded == 0.339;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%ld/%ld = %.7f -> %.3f", score.n_multidomain,
                score.n_interactions, score.value, rounded);
  report(1, pass, "overlap worked example 19/56 = 0.339", detail);
}

void criterion_2_icc_cross_checks() {
  const double dg = 100.0 * postfit::icc_ordinal_point(0.27 * 0.27);
  const double ug = 100.0 * postfit::icc_ordinal_point(0.49 * 0.49);
  const bool pass = std::fabs(dg - 2.2) <= 0.05 && std::fabs(ug - 6.8) <= 0.05;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "sd 0.27 -> %.4f%% (published 2.2), sd 0.49 -> %.4f%% (published 6.8); "
                "mayu ICCs excluded: theta and lambda unpublished",
                dg, ug);
  report(2, pass, "ordinal ICC reproduces published percentages within 0.05pp", detail);
}

void criterion_3_likelihood_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  double max_abs = 0.0;
  for (double mu : {0.5, 2.0, 10.0})
    for (double theta : {0.5, 2.0, 20.0})
      for (long y = 0; y <= 20; ++y) {
        const double pmf = std::exp(glmm::negbin_logpmf(static_cast<double>(y), mu, theta));
        const double quad = oracles::poisson_gamma_mixture_pmf(y, mu, theta);
        max_abs = std::max(max_abs, std::fabs(pmf - quad));
      }
  bool pass = max_abs <= 1e-8;

  rng::Rng r(424242);
  double max_norm_err = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int K = 2 + static_cast<int>(r.uniform_int(8));
    Eigen::VectorXd cuts(K - 1);
    double t = r.uniform(-6.0, 0.0);
    for (int j = 0; j < K - 1; ++j) {
      cuts(j) = t;
      t += 0.05 + 3.0 * r.uniform();
    }
    const Eigen::VectorXd lp = glmm::ordered_logistic_logprobs(r.uniform(-8.0, 8.0), cuts);
    max_norm_err = std::max(max_norm_err, std::fabs(lp.array().exp().sum() - 1.0));
  }
  pass = pass && max_norm_err <= 1e-12;

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "negbin vs quadrature max |diff| = %.2e (tol 1e-8); "
                "normalization max err = %.2e (tol 1e-12); %.1f s",
                max_abs, max_norm_err, elapsed_s(t0));
  report(3, pass, "likelihood oracles", detail);
}

void criterion_4_gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  rng::Rng r(515151);
  double worst = 0.0;
  for (int family = 0; family < 2; ++family) {
    const auto truth =
        family == 0 ? synth::default_mayu_truth() : synth::default_game_truth();
    auto small = truth;
    small.n_villages = 5;
    small.per_village = 8;
    const auto ds = synth::generate_dataset(small, 99 + family);
    const auto spec = synth::model_spec_for(small);
    const auto md = glmm::build_model_data(ds, spec);
    const auto lay = glmm::ParamLayout::of(md, spec);
    auto f = [&](const Eigen::VectorXd& x) { return glmm::log_posterior(x, md, spec); };
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::VectorXd q(lay.unconstrained_dim());
      for (int i = 0; i < q.size(); ++i) q(i) = r.uniform(-1.5, 1.5);
      const Eigen::VectorXd analytic = glmm::grad_log_posterior(q, md, spec);
      const Eigen::VectorXd numeric = oracles::central_difference(f, q, 1e-5);
      for (int i = 0; i < q.size(); ++i)
        worst = std::max(worst,
                         std::fabs(analytic(i) - numeric(i)) / std::max(1.0, std::fabs(analytic(i))));
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "max relative error %.2e (tol 1e-5); %.1f s", worst,
                elapsed_s(t0));
  report(4, worst < 1e-5, "analytic gradients vs central differences, both families", detail);
}

struct StdNormalTarget : mcmc::Target {
  int dim() const override { return 1; }
  double logp_grad(const Eigen::VectorXd& q, Eigen::VectorXd& grad) const override {
    grad = -q;
    return -0.5 * q.squaredNorm();
  }
};

struct CorrGaussTarget : mcmc::Target {
  Eigen::Matrix2d precision;
  CorrGaussTarget() {
    Eigen::Matrix2d cov;
    cov << 1.0, 0.8, 0.8, 1.0;
    precision = cov.inverse();
  }
  int dim() const override { return 2; }
  double logp_grad(const Eigen::VectorXd& q, Eigen::VectorXd& grad) const override {
    grad = -(precision * q);
    return -0.5 * q.dot(precision * q);
  }
};

struct BetaBinomialTarget : mcmc::Target {
  int dim() const override { return 1; }
  double logp_grad(const Eigen::VectorXd& q, Eigen::VectorXd& grad) const override {
    grad.resize(1);
    grad(0) = 8.0 - 12.0 * special::inv_logit(q(0));
    return 8.0 * special::log_inv_logit(q(0)) + 4.0 * special::log_inv_logit(-q(0));
  }
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& q) const override {
    Eigen::VectorXd p(1);
    p(0) = special::inv_logit(q(0));
    return p;
  }
};

void criterion_5_sampler_known_targets() {
  const auto t0 = std::chrono::steady_clock::now();
  mcmc::SamplerConfig cfg;
  cfg.n_chains = 4;
  cfg.n_warmup = 1000;
  cfg.n_draws = 1000;

  cfg.seed = 314;
  StdNormalTarget normal;
  const auto nd = mcmc::run_chains(normal, cfg);
  const Eigen::VectorXd x = nd.flat(0);
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().sum() / (x.size() - 1));
  const double rhat = mcmc::rhat(nd.by_chain(0));
  const double ess = mcmc::ess(nd.by_chain(0));
  bool pass = std::fabs(mean) < 0.05 && std::fabs(sd - 1.0) < 0.05 && rhat < 1.01 && ess > 400;

  cfg.seed = 2718;
  CorrGaussTarget gauss;
  const auto gd = mcmc::run_chains(gauss, cfg);
  const Eigen::VectorXd gx = gd.flat(0), gy = gd.flat(1);
  const double corr = ((gx.array() - gx.mean()) * (gy.array() - gy.mean())).mean() /
                      (std::sqrt((gx.array() - gx.mean()).square().mean()) *
                       std::sqrt((gy.array() - gy.mean()).square().mean()));
  pass = pass && std::fabs(corr - 0.8) < 0.05 && std::fabs(gx.mean()) < 0.05 &&
         std::fabs(gy.mean()) < 0.05;

  cfg.seed = 11;
  BetaBinomialTarget bb;
  const auto bd = mcmc::run_chains(bb, cfg);
  const double pmean = bd.flat(0).mean();
  pass = pass && std::fabs(pmean - 8.0 / 12.0) < 0.02;

  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "normal: mean %.4f sd %.4f rhat %.4f ess %.0f; corr %.4f (target 0.8); "
                "beta-binomial mean %.4f (target 0.6667); %.1f s",
                mean, sd, rhat, ess, corr, pmean, elapsed_s(t0));
  report(5, pass, "sampler recovers known targets", detail);
}

void criterion_6_parameter_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto truth = synth::default_mayu_truth();  // 8 villages x 28, Table-1-scale truths
  mcmc::SamplerConfig cfg;
  cfg.n_chains = 4;
  cfg.n_warmup = 500;
  cfg.n_draws = 500;
  cfg.seed = 20250808;
  glmm::PriorSet priors;  // stated priors for this run:
  priors.beta_scale = 25.0;  // betas ~ normal(0, 25); raw-scale village coefficient is ~24
  const auto rep = synth::recovery_experiment(truth, 20, cfg, priors);

  bool pass = rep.n_failed == 0;
  std::string cov_detail;
  for (const auto& name :
       {"intercept", "b_overlap_i", "b_overlap_V", "sigma_village", "theta"}) {
    const auto& pr = rep.parameters.at(name);
    pass = pass && pr.coverage >= 0.70;
    char piece[64];
    std::snprintf(piece, sizeof(piece), "%s %.2f ", name, pr.coverage);
    cov_detail += piece;
  }
  const int sign_b1 = rep.parameters.at("b_overlap_i").n_sign_agree;
  const int sign_b2 = rep.parameters.at("b_overlap_V").n_sign_agree;
  pass = pass && sign_b1 >= 18 && sign_b2 >= 18;

  char detail[320];
  std::snprintf(detail, sizeof(detail),
                "coverage: %s; sign agreement B1 %d/20, B2 %d/20; failed fits %d; "
                "priors: beta normal(0,25), cutpoint/intercept t(3,0,10), sigma half-t(3,0,2.5), "
                "theta gamma(.01,.01); %.0f s",
                cov_detail.c_str(), sign_b1, sign_b2, rep.n_failed, elapsed_s(t0));
  report(6, pass, "parameter recovery at survey scale (20 replicates)", detail);
}

void criterion_7_outlier_diagnostic() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto truth = synth::default_mayu_truth();
  auto ds = synth::generate_dataset(truth, 70707);
  long max_count = 0;
  for (const auto& row : ds.rows) max_count = std::max(max_count, row.mayu_yearly.value_or(0));
  const size_t victim = 100;
  ds.rows[victim].mayu_yearly = 10 * max_count;

  auto spec = synth::model_spec_for(truth);
  spec.priors.beta_scale = 25.0;
  mcmc::SamplerConfig cfg;
  cfg.n_chains = 4;
  cfg.n_warmup = 500;
  cfg.n_draws = 500;
  cfg.seed = 7;
  const auto fit = fit::fit_model(ds, spec, cfg);
  const auto ll = postfit::pointwise_loglik(fit.draws, fit.data, fit.spec);
  const auto pk = postfit::psis_pareto_k(ll);

  int below = 0, total_others = 0;
  for (size_t i = 0; i < pk.k.size(); ++i) {
    if (i == victim) continue;
    ++total_others;
    if (pk.k[i] && *pk.k[i] < 0.7) ++below;
  }
  const double victim_k = pk.k[victim] ? *pk.k[victim] : -1.0;
  const bool pass =
      victim_k > 0.7 && below >= static_cast<int>(std::ceil(0.95 * total_others));
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "injected k = %.3f (> 0.7), %d of %d others below 0.7; %.0f s", victim_k, below,
                total_others, elapsed_s(t0));
  report(7, pass, "10x-max injected count is flagged by Pareto-k", detail);
}

void criterion_8_icc_attenuation() {
  const auto t0 = std::chrono::steady_clock::now();
  auto truth = synth::default_mayu_truth();
  truth.sigma_village = 0.0;  // village differences fully overlap-driven
  mcmc::SamplerConfig cfg;
  cfg.n_chains = 4;
  cfg.n_warmup = 500;
  cfg.n_draws = 500;
  cfg.parallel_chains = true;

  glmm::ModelSpec covariate_spec = synth::model_spec_for(truth);
  covariate_spec.priors.beta_scale = 25.0;
  glmm::ModelSpec null_spec = covariate_spec;
  null_spec.covariates = {};

  int attenuated = 0, failed = 0;
  const int n_replicates = 20;
  for (int r = 0; r < n_replicates; ++r) {
    const auto ds = synth::generate_dataset(truth, rng::stream_seed(606, r));
    mcmc::SamplerConfig c = cfg;
    c.seed = rng::stream_seed(607, r);
    const auto null_fit = fit::fit_model(ds, null_spec, c);
    c.seed = rng::stream_seed(608, r);
    const auto cov_fit = fit::fit_model(ds, covariate_spec, c);
    if (null_fit.draws.failed || cov_fit.draws.failed) {
      ++failed;
      continue;
    }
    const auto unconditional =
        postfit::icc_report(null_fit.draws, null_fit.data, null_fit.spec, "null");
    const auto adjusted =
        postfit::icc_report(cov_fit.draws, cov_fit.data, cov_fit.spec, "covariates");
    if (adjusted.icc.median < unconditional.icc.median) ++attenuated;
  }
  const bool pass = attenuated >= 18 && failed == 0;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "adjusted < unconditional in %d/20 replicates (%d failed); %.0f s",
                attenuated, failed, elapsed_s(t0));
  report(8, pass, "covariates absorb overlap-driven village variance", detail);
}

// --- criterion 9: byte-identical pipeline reruns ----------------------------

int run_cmd(const std::string& args) {
  const std::string cmd = std::string(COOPNET_BIN) + " " + args + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

bool run_pipeline(const fs::path& root) {
  const std::string sampler = " --chains 2 --warmup 300 --draws 300 ";
  auto in_root = [&](const std::string& rel) { return (root / rel).string(); };
  std::vector<std::string> cmds = {
      "simulate --family ordinal --seed 21 --out " + in_root("games"),
      "simulate --family negbin --seed 22 --out " + in_root("mayu"),
      "fit --data " + in_root("games/dataset.json") + " --outcome dg --seed 1" + sampler +
          "--out " + in_root("fit_dg"),
      "fit --data " + in_root("games/dataset.json") + " --outcome ug --seed 2" + sampler +
          "--out " + in_root("fit_ug"),
      "fit --data " + in_root("mayu/dataset.json") + " --outcome mayu --seed 3" + sampler +
          "--out " + in_root("fit_mayu"),
      "icc --fit " + in_root("fit_mayu") + " --data " + in_root("mayu/dataset.json") + " --out " +
          in_root("icc_mayu"),
      "icc --fit " + in_root("fit_dg") + " --data " + in_root("games/dataset.json") + " --out " +
          in_root("icc_dg"),
      "loo --fit " + in_root("fit_mayu") + " --data " + in_root("mayu/dataset.json") + " --out " +
          in_root("loo_mayu"),
      "marginal --fit " + in_root("fit_mayu") + " --data " + in_root("mayu/dataset.json") +
          " --covariate overlap_i --grid-points 11 --out " + in_root("marginal_mayu"),
      "marginal --fit " + in_root("fit_dg") + " --data " + in_root("games/dataset.json") +
          " --covariate overlap_i --grid-points 5 --out " + in_root("marginal_dg"),
      "report --dg " + in_root("fit_dg") + " --ug " + in_root("fit_ug") + " --mayu " +
          in_root("fit_mayu") + " --out " + in_root("report"),
  };
  for (const auto& cmd : cmds)
    if (run_cmd(cmd) != 0) {
      std::printf("  pipeline step failed: %s\n", cmd.c_str());
      return false;
    }
  return true;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_9_determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / "coopnet_acceptance_determinism";
  fs::remove_all(root);
  const fs::path a = root / "a", b = root / "b";
  bool pass = run_pipeline(a) && run_pipeline(b);

  int compared = 0;
  std::string first_diff;
  if (pass) {
    std::vector<fs::path> rels;
    for (const auto& entry : fs::recursive_directory_iterator(a))
      if (entry.is_regular_file()) rels.push_back(fs::relative(entry.path(), a));
    for (const auto& rel : rels) {
      // the manifest carries wall-clock timestamps; analysis outputs must match
      if (rel.filename() == "run_manifest.json") continue;
      ++compared;
      if (!fs::exists(b / rel) || read_bytes(a / rel) != read_bytes(b / rel)) {
        pass = false;
        first_diff = rel.string();
        break;
      }
    }
    pass = pass && compared >= 15;
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail), "%d artifacts byte-identical%s%s; %.0f s", compared,
                first_diff.empty() ? "" : "; first difference: ", first_diff.c_str(),
                elapsed_s(t0));
  report(9, pass, "pipeline rerun with identical seeds reproduces all artifacts", detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite (tool version %s)\n", io::kToolVersion);
  criterion_1_overlap_worked_example();
  criterion_2_icc_cross_checks();
  criterion_3_likelihood_oracles();
  criterion_4_gradients();
  criterion_5_sampler_known_targets();
  criterion_6_parameter_recovery();
  criterion_7_outlier_diagnostic();
  criterion_8_icc_attenuation();
  criterion_9_determinism();
  if (n_failed_criteria > 0) {
    std::printf("%d criterion(s) failed\n", n_failed_criteria);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
