#include "coopnet/synth.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "coopnet/fit.hpp"
#include "coopnet/rng.hpp"

namespace coopnet::synth {

TrueParams default_game_truth() {
  TrueParams p;
  p.family = glmm::Family::ordered_logistic;
  p.b_overlap_i = -2.83;
  p.b_overlap_V = -23.10;
  p.sigma_village = 0.27;
  p.cutpoints.resize(5);
  p.cutpoints << -9.0, -7.8, -6.6, -5.6, -4.6;  // centered near eta at mid overlap
  return p;
}

TrueParams default_mayu_truth() { return TrueParams{}; }

namespace {

void validate(const TrueParams& p) {
  if (p.n_villages < 1 || p.per_village < 1)
    throw std::invalid_argument("village count and size must be positive");
  if (p.sigma_village < 0) throw std::invalid_argument("sigma_village must be nonnegative");
  if (!(p.overlap_concentration > 0))
    throw std::invalid_argument("overlap_concentration must be positive");
  if (!(p.overlap_mean_lo > 0 && p.overlap_mean_hi < 1 && p.overlap_mean_lo <= p.overlap_mean_hi))
    throw std::invalid_argument("overlap means must satisfy 0 < lo <= hi < 1");
  if (p.family == glmm::Family::ordered_logistic) {
    if (p.cutpoints.size() < 1) throw std::invalid_argument("ordinal truth needs cutpoints");
    for (int j = 1; j < p.cutpoints.size(); ++j)
      if (!(p.cutpoints(j) > p.cutpoints(j - 1)))
        throw std::invalid_argument("cutpoints must be strictly increasing");
  } else if (!(p.theta > 0)) {
    throw std::invalid_argument("theta must be positive");
  }
}

int ordinal_category(double eta, const Eigen::VectorXd& tau, rng::Rng& rng) {
  const double u = rng.uniform_pos();
  const double latent = eta + std::log(u / (1.0 - u));
  int cat = 0;
  for (int j = 0; j < tau.size(); ++j) cat += latent > tau(j) ? 1 : 0;
  return cat;
}

long negbin_count(double eta, double theta, rng::Rng& rng) {
  const double g = rng.gamma(theta, theta);  // mean one
  return rng.poisson(std::exp(eta) * g);
}

}  // namespace

data::CoopDataset generate_dataset(const TrueParams& p, std::uint64_t seed) {
  validate(p);
  rng::Rng rng(seed);
  const int V = p.n_villages;

  Eigen::VectorXd a(V);
  for (int v = 0; v < V; ++v) a(v) = p.sigma_village > 0 ? rng.normal(0.0, p.sigma_village) : 0.0;

  Eigen::VectorXd village_mean(V);
  for (int v = 0; v < V; ++v)
    village_mean(v) =
        V == 1 ? 0.5 * (p.overlap_mean_lo + p.overlap_mean_hi)
               : p.overlap_mean_lo + (p.overlap_mean_hi - p.overlap_mean_lo) * v / (V - 1.0);

  data::CoopDataset ds;
  ds.meta.n_domains = 0;  // overlaps drawn directly, no synthetic networks
  int person = 0;
  for (int v = 0; v < V; ++v) {
    const double m = village_mean(v);
    const double alpha = m * p.overlap_concentration;
    const double beta = (1.0 - m) * p.overlap_concentration;
    std::vector<double> overlaps(p.per_village);
    double sum = 0.0;
    for (auto& o : overlaps) {
      o = rng.beta(alpha, beta);
      sum += o;
    }
    const double overlap_V = sum / p.per_village;
    const double size_v = 150.0 + 650.0 * (V == 1 ? 0.5 : v / (V - 1.0));

    for (int i = 0; i < p.per_village; ++i) {
      data::CoopRow row;
      char pid[16];
      std::snprintf(pid, sizeof(pid), "p%04d", ++person);
      row.person_id = pid;
      row.village_id = "v" + std::to_string(v + 1);
      row.overlap_i = overlaps[i];
      row.overlap_V = overlap_V;
      if (p.b_size) row.village_size = size_v;
      double eta = p.b_overlap_i * row.overlap_i + p.b_overlap_V * row.overlap_V + a(v);
      if (p.b_size) eta += *p.b_size * (size_v / 100.0);
      if (p.family == glmm::Family::ordered_logistic) {
        row.dg_category = ordinal_category(eta, p.cutpoints, rng);
        row.ug_category = ordinal_category(eta, p.cutpoints, rng);
      } else {
        row.mayu_yearly = negbin_count(eta + p.intercept, p.theta, rng);
      }
      ds.rows.push_back(std::move(row));
    }
  }
  return ds;
}

glmm::ModelSpec model_spec_for(const TrueParams& p, const std::string& outcome) {
  glmm::ModelSpec spec;
  spec.family = p.family;
  spec.outcome = outcome.empty()
                     ? (p.family == glmm::Family::ordered_logistic ? "dg" : "mayu")
                     : outcome;
  spec.covariates = {"overlap_i", "overlap_V"};
  if (p.b_size) spec.covariates.push_back("size_V");
  return spec;
}

RecoveryReport recovery_experiment(const TrueParams& p, int n_replicates,
                                   const mcmc::SamplerConfig& config,
                                   const glmm::PriorSet& priors) {
  if (n_replicates < 1) throw std::invalid_argument("need at least one replicate");
  validate(p);
  glmm::ModelSpec spec = model_spec_for(p);
  spec.priors = priors;

  // truth values keyed by reported parameter name
  std::map<std::string, double> truth;
  truth["b_overlap_i"] = p.b_overlap_i;
  truth["b_overlap_V"] = p.b_overlap_V;
  if (p.b_size) truth["b_size_V"] = *p.b_size;
  truth["sigma_village"] = p.sigma_village;
  if (p.family == glmm::Family::negative_binomial) {
    truth["intercept"] = p.intercept;
    truth["theta"] = p.theta;
  } else {
    for (int j = 0; j < p.cutpoints.size(); ++j)
      truth["tau[" + std::to_string(j + 1) + "]"] = p.cutpoints(j);
  }

  struct ReplicateStats {
    bool failed = false;
    std::map<std::string, mcmc::Summary> summaries;
  };
  std::vector<ReplicateStats> reps(n_replicates);

  auto run_replicate = [&](int r) {
    const std::uint64_t data_seed = rng::stream_seed(config.seed, 0x5EED0000ULL + r);
    const data::CoopDataset ds = generate_dataset(p, data_seed);
    mcmc::SamplerConfig rep_config = config;
    rep_config.seed = rng::stream_seed(config.seed, 0xF1700000ULL + r);
    rep_config.parallel_chains = false;  // replicates parallelize instead
    const fit::FitResult fit = fit::fit_model(ds, spec, rep_config);
    if (fit.draws.failed) {
      reps[r].failed = true;
      return;
    }
    for (const auto& [name, t] : truth) {
      (void)t;
      const int idx = fit.draws.param_index(name);
      reps[r].summaries[name] = mcmc::summarize(fit.draws.flat(idx), 0.89);
    }
  };

  const int n_threads =
      std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()),
                                std::min(n_replicates, 8)));
  if (n_threads > 1) {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int r = t; r < n_replicates; r += n_threads) run_replicate(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (int r = 0; r < n_replicates; ++r) run_replicate(r);
  }

  RecoveryReport report;
  report.n_replicates = n_replicates;
  for (int r = 0; r < n_replicates; ++r)
    if (reps[r].failed) {
      ++report.n_failed;
      report.failed_replicates.push_back(r);
    }
  for (const auto& [name, t] : truth) {
    ParamRecovery pr;
    pr.truth = t;
    for (int r = 0; r < n_replicates; ++r) {
      if (reps[r].failed) continue;
      const auto& s = reps[r].summaries.at(name);
      ++pr.n_used;
      if (s.lower <= t && t <= s.upper) pr.coverage += 1.0;
      pr.mean_bias += s.mean - t;
      if ((s.mean > 0) == (t > 0) || (s.mean == 0 && t == 0)) ++pr.n_sign_agree;
    }
    if (pr.n_used > 0) {
      pr.coverage /= pr.n_used;
      pr.mean_bias /= pr.n_used;
    }
    report.parameters[name] = pr;
  }
  return report;
}

}  // namespace coopnet::synth
