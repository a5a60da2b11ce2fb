#include "coopnet/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "coopnet/rng.hpp"
#include "coopnet/special.hpp"

namespace coopnet::mcmc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDivergenceThreshold = 1000.0;  // energy error flagged as divergence
}  // namespace

std::vector<std::string> Target::names() const {
  std::vector<std::string> out;
  for (int i = 0; i < dim(); ++i) out.push_back("q" + std::to_string(i + 1));
  return out;
}

Eigen::VectorXd Target::to_constrained(const Eigen::VectorXd& q) const { return q; }

long PosteriorDraws::n_divergent() const {
  long total = 0;
  for (const auto& chain : divergent)
    for (auto d : chain) total += d;
  return total;
}

int PosteriorDraws::param_index(const std::string& name) const {
  for (size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("unknown parameter `" + name + "`");
}

Eigen::MatrixXd PosteriorDraws::by_chain(int param) const {
  Eigen::MatrixXd out(n_draws_per_chain(), n_chains());
  for (int c = 0; c < n_chains(); ++c) out.col(c) = chains[c].col(param);
  return out;
}

Eigen::VectorXd PosteriorDraws::flat(int param) const {
  Eigen::VectorXd out(static_cast<long>(n_draws_per_chain()) * n_chains());
  long at = 0;
  for (int c = 0; c < n_chains(); ++c) {
    out.segment(at, n_draws_per_chain()) = chains[c].col(param);
    at += n_draws_per_chain();
  }
  return out;
}

void leapfrog(const Target& target, Eigen::VectorXd& q, Eigen::VectorXd& p, Eigen::VectorXd& grad,
              double& logp, double step, const Eigen::VectorXd& inv_metric) {
  p += 0.5 * step * grad;
  q += step * inv_metric.cwiseProduct(p).eval();
  logp = target.logp_grad(q, grad);
  p += 0.5 * step * grad;
}

namespace {

double kinetic(const Eigen::VectorXd& p, const Eigen::VectorXd& inv_metric) {
  return 0.5 * p.dot(inv_metric.cwiseProduct(p));
}

struct PhasePoint {
  Eigen::VectorXd q, p, grad;
  double logp = 0.0;
};

// Guarded evaluation: target exceptions act as -inf (proposal rejection).
double safe_logp_grad(const Target& target, const Eigen::VectorXd& q, Eigen::VectorXd& grad) {
  try {
    const double lp = target.logp_grad(q, grad);
    return std::isnan(lp) ? -kInf : lp;
  } catch (const std::exception&) {
    grad.setZero(q.size());
    return -kInf;
  }
}

struct TreeResult {
  PhasePoint front;        // near end of the subtree in the build direction
  PhasePoint back;         // far end of the subtree in the build direction
  PhasePoint sample;       // multinomial draw from the subtree
  double log_sum_weight = -kInf;
  double sum_metro = 0.0;  // sum of min(1, exp(h0 - h)) over leapfrog steps
  long n_leapfrog = 0;
  bool divergent = false;
  bool uturn = false;
};

class NutsChain {
 public:
  NutsChain(const Target& target, const SamplerConfig& cfg, std::uint64_t chain_seed)
      : target_(target), cfg_(cfg), rng_(chain_seed) {
    const int d = target.dim();
    inv_metric_ = Eigen::VectorXd::Ones(d);
    initialize_position();
  }

  // warmup + sampling; returns post-warmup constrained draws and divergences
  void run(Eigen::MatrixXd& draws, std::vector<std::uint8_t>& divergent) {
    adapt();
    const int n_params = static_cast<int>(target_.to_constrained(q_).size());
    draws.resize(cfg_.n_draws, n_params);
    divergent.assign(cfg_.n_draws, 0);
    for (int i = 0; i < cfg_.n_draws; ++i) {
      const bool div = transition();
      draws.row(i) = target_.to_constrained(q_).transpose();
      divergent[i] = div ? 1 : 0;
    }
  }

 private:
  void initialize_position() {
    const int d = target_.dim();
    q_.resize(d);
    grad_.resize(d);
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (int i = 0; i < d; ++i) q_(i) = rng_.uniform(-cfg_.init_radius, cfg_.init_radius);
      logp_ = safe_logp_grad(target_, q_, grad_);
      if (std::isfinite(logp_) && grad_.allFinite()) return;
    }
    throw std::runtime_error(
        "could not find a finite initial log posterior after 100 draws of initial values");
  }

  Eigen::VectorXd sample_momentum() {
    Eigen::VectorXd p(q_.size());
    for (int i = 0; i < p.size(); ++i) p(i) = rng_.normal() / std::sqrt(inv_metric_(i));
    return p;
  }

  // Stan-style heuristic: scale step size until one leapfrog step crosses
  // 50% acceptance.
  void init_step_size() {
    step_ = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      PhasePoint z{q_, sample_momentum(), grad_, logp_};
      const double h0 = -z.logp + kinetic(z.p, inv_metric_);
      leapfrog_guarded(z, step_);
      const double h1 = -z.logp + kinetic(z.p, inv_metric_);
      const double delta = h0 - h1;  // log acceptance probability
      if (iter == 0) grow_ = delta > std::log(0.5);
      const bool grow_now = delta > std::log(0.5);
      if (grow_now != grow_) break;
      step_ *= grow_ ? 2.0 : 0.5;
      if (step_ > 1e7 || step_ < 1e-16) break;
    }
    step_ = std::clamp(step_, 1e-16, 1e7);
  }

  void leapfrog_guarded(PhasePoint& z, double step) {
    z.p += 0.5 * step * z.grad;
    z.q += step * inv_metric_.cwiseProduct(z.p).eval();
    z.logp = safe_logp_grad(target_, z.q, z.grad);
    z.p += 0.5 * step * z.grad;
  }

  bool uturn_between(const PhasePoint& minus, const PhasePoint& plus) const {
    const Eigen::VectorXd dq = plus.q - minus.q;
    return dq.dot(inv_metric_.cwiseProduct(minus.p)) < 0 ||
           dq.dot(inv_metric_.cwiseProduct(plus.p)) < 0;
  }

  TreeResult build_tree(int depth, PhasePoint from, double dir, double h0) {
    TreeResult result;
    if (depth == 0) {
      leapfrog_guarded(from, dir * step_);
      ++result.n_leapfrog;
      const double h = -from.logp + kinetic(from.p, inv_metric_);
      const double delta = h0 - h;  // > 0 when energy decreased
      result.divergent = !(delta > -kDivergenceThreshold);
      result.log_sum_weight = std::isnan(delta) ? -kInf : delta;
      result.sum_metro = std::isnan(delta) ? 0.0 : std::min(1.0, std::exp(delta));
      result.front = from;
      result.back = from;
      result.sample = std::move(from);
      return result;
    }
    TreeResult inner = build_tree(depth - 1, std::move(from), dir, h0);
    if (inner.divergent || inner.uturn) return inner;
    TreeResult outer = build_tree(depth - 1, inner.back, dir, h0);
    TreeResult merged;
    merged.n_leapfrog = inner.n_leapfrog + outer.n_leapfrog;
    merged.sum_metro = inner.sum_metro + outer.sum_metro;
    merged.divergent = outer.divergent;
    merged.log_sum_weight = special::log_sum_exp(inner.log_sum_weight, outer.log_sum_weight);
    merged.front = std::move(inner.front);
    merged.back = std::move(outer.back);
    if (merged.divergent || outer.uturn) {
      merged.uturn = outer.uturn;
      merged.sample = std::move(inner.sample);
      return merged;
    }
    // multinomial sampling within the subtree
    const double accept = std::exp(outer.log_sum_weight - merged.log_sum_weight);
    merged.sample = (rng_.uniform() < accept) ? std::move(outer.sample) : std::move(inner.sample);
    merged.uturn = dir > 0 ? uturn_between(merged.front, merged.back)
                           : uturn_between(merged.back, merged.front);
    return merged;
  }

  // One NUTS transition updating (q_, grad_, logp_); returns divergence flag.
  bool transition() {
    const Eigen::VectorXd p0 = sample_momentum();
    const double h0 = -logp_ + kinetic(p0, inv_metric_);

    PhasePoint plus{q_, p0, grad_, logp_};
    PhasePoint minus = plus;
    PhasePoint sample = plus;
    double log_sum_weight = 0.0;  // weight exp(h0 - h) = 1 at the start point
    double sum_metro = 0.0;
    long n_leapfrog = 0;
    bool divergent = false;

    for (int depth = 0; depth < cfg_.max_leapfrog_depth; ++depth) {
      const double dir = rng_.flip() ? 1.0 : -1.0;
      TreeResult sub = build_tree(depth, dir > 0 ? plus : minus, dir, h0);
      n_leapfrog += sub.n_leapfrog;
      sum_metro += sub.sum_metro;
      if (sub.divergent) {
        divergent = true;
        break;
      }
      if (sub.uturn) break;
      // biased progressive sampling: favor the new subtree
      const double accept = std::exp(sub.log_sum_weight - log_sum_weight);
      if (rng_.uniform() < accept) sample = sub.sample;
      log_sum_weight = special::log_sum_exp(log_sum_weight, sub.log_sum_weight);
      if (dir > 0)
        plus = sub.back;
      else
        minus = sub.back;
      if (uturn_between(minus, plus)) break;
    }
    q_ = sample.q;
    grad_ = sample.grad;
    logp_ = sample.logp;
    last_accept_stat_ = n_leapfrog > 0 ? sum_metro / static_cast<double>(n_leapfrog) : 0.0;
    return divergent;
  }

  // --- warmup ---------------------------------------------------------------

  struct DualAveraging {
    double mu = 0.0, log_step = 0.0, log_step_bar = 0.0, h_bar = 0.0;
    long m = 0;
    static constexpr double gamma = 0.05, t0 = 10.0, kappa = 0.75;

    void restart(double step) {
      mu = std::log(10.0 * step);
      log_step = std::log(step);
      log_step_bar = std::log(step);
      h_bar = 0.0;
      m = 0;
    }
    double update(double accept_stat, double target_accept) {
      ++m;
      const double md = static_cast<double>(m);
      h_bar = (1.0 - 1.0 / (md + t0)) * h_bar + (target_accept - accept_stat) / (md + t0);
      log_step = mu - std::sqrt(md) / gamma * h_bar;
      const double w = std::pow(md, -kappa);
      log_step_bar = w * log_step + (1.0 - w) * log_step_bar;
      return std::exp(log_step);
    }
  };

  struct Welford {
    Eigen::VectorXd mean, m2;
    long n = 0;
    void reset(int d) {
      mean = Eigen::VectorXd::Zero(d);
      m2 = Eigen::VectorXd::Zero(d);
      n = 0;
    }
    void add(const Eigen::VectorXd& x) {
      ++n;
      const Eigen::VectorXd delta = x - mean;
      mean += delta / static_cast<double>(n);
      m2 += delta.cwiseProduct(x - mean);
    }
    Eigen::VectorXd variance() const { return m2 / std::max<long>(1, n - 1); }
  };

  void adapt() {
    init_step_size();
    if (cfg_.n_warmup <= 0) return;

    // Stan-style schedule: fast / expanding slow windows / fast
    int init_buffer = 75, term_buffer = 50, base_window = 25;
    if (cfg_.n_warmup < init_buffer + term_buffer + base_window) {
      init_buffer = std::max(1, static_cast<int>(0.15 * cfg_.n_warmup));
      term_buffer = std::max(1, static_cast<int>(0.10 * cfg_.n_warmup));
      base_window = std::max(1, cfg_.n_warmup - init_buffer - term_buffer);
    }
    std::vector<int> window_ends;
    {
      const int limit = cfg_.n_warmup - term_buffer;
      int start = init_buffer, size = base_window;
      while (start < limit) {
        int end = start + size;
        if (end + 2 * size > limit) end = limit;  // absorb the tail into the last window
        window_ends.push_back(end);
        start = end;
        size *= 2;
      }
    }

    DualAveraging da;
    da.restart(step_);
    Welford welford;
    welford.reset(target_.dim());
    size_t window = 0;

    for (int it = 0; it < cfg_.n_warmup; ++it) {
      transition();
      step_ = da.update(last_accept_stat_, cfg_.target_acceptance);
      const bool in_slow = it >= init_buffer && it < cfg_.n_warmup - term_buffer;
      if (in_slow) welford.add(q_);
      if (window < window_ends.size() && it + 1 == window_ends[window]) {
        // close the window: refresh metric, restart step-size adaptation
        const double nd = static_cast<double>(welford.n);
        const Eigen::VectorXd var = welford.variance();
        inv_metric_ = (nd / (nd + 5.0)) * var.array().max(1e-12).matrix() +
                      Eigen::VectorXd::Constant(target_.dim(), 1e-3 * (5.0 / (nd + 5.0)));
        welford.reset(target_.dim());
        ++window;
        logp_ = safe_logp_grad(target_, q_, grad_);
        init_step_size();
        da.restart(step_);
      }
    }
    step_ = std::exp(da.log_step_bar);
  }

  const Target& target_;
  SamplerConfig cfg_;
  rng::Rng rng_;
  Eigen::VectorXd q_, grad_;
  double logp_ = 0.0;
  Eigen::VectorXd inv_metric_;
  double step_ = 1.0;
  bool grow_ = true;
  double last_accept_stat_ = 0.0;
};

}  // namespace

PosteriorDraws run_chains(const Target& target, const SamplerConfig& config) {
  if (config.n_chains < 1 || config.n_draws < 1 || config.n_warmup < 0)
    throw std::invalid_argument("sampler config: counts must be positive");
  if (!(config.target_acceptance > 0 && config.target_acceptance < 1))
    throw std::invalid_argument("sampler config: target_acceptance must be in (0,1)");

  PosteriorDraws out;
  out.config = config;
  out.parameter_names = target.names();
  out.chains.resize(config.n_chains);
  out.divergent.resize(config.n_chains);
  out.chain_seeds.resize(config.n_chains);
  for (int c = 0; c < config.n_chains; ++c)
    out.chain_seeds[c] = rng::stream_seed(config.seed, static_cast<std::uint64_t>(c));

  std::vector<std::exception_ptr> errors(config.n_chains);
  auto run_one = [&](int c) {
    try {
      NutsChain chain(target, config, out.chain_seeds[c]);
      chain.run(out.chains[c], out.divergent[c]);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  if (config.parallel_chains && config.n_chains > 1) {
    std::vector<std::thread> threads;
    threads.reserve(config.n_chains);
    for (int c = 0; c < config.n_chains; ++c) threads.emplace_back(run_one, c);
    for (auto& t : threads) t.join();
  } else {
    for (int c = 0; c < config.n_chains; ++c) run_one(c);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const long total = static_cast<long>(config.n_chains) * config.n_draws;
  out.failed = out.n_divergent() * 4 > total;  // > 25% divergent
  return out;
}

// --- diagnostics ------------------------------------------------------------

namespace {

// split every chain column into halves; returns sequences as columns
Eigen::MatrixXd split_chains(const Eigen::MatrixXd& draws) {
  const long n = draws.rows(), m = draws.cols();
  const long h = n / 2;
  Eigen::MatrixXd seq(h, 2 * m);
  for (long c = 0; c < m; ++c) {
    seq.col(2 * c) = draws.col(c).head(h);
    seq.col(2 * c + 1) = draws.col(c).tail(h);
  }
  return seq;
}

}  // namespace

double rhat(const Eigen::MatrixXd& draws) {
  if (draws.cols() < 2 || draws.rows() < 4)
    throw std::invalid_argument("rhat needs at least 2 chains with at least 4 draws each");
  const Eigen::MatrixXd seq = split_chains(draws);
  const long n = seq.rows(), m = seq.cols();
  const Eigen::VectorXd means = seq.colwise().mean();
  Eigen::VectorXd vars(m);
  for (long j = 0; j < m; ++j)
    vars(j) = (seq.col(j).array() - means(j)).square().sum() / static_cast<double>(n - 1);
  const double w = vars.mean();
  if (w <= 0.0) throw std::invalid_argument("degenerate chains: zero within-chain variance");
  const double grand = means.mean();
  const double b_over_n =
      (means.array() - grand).square().sum() / static_cast<double>(m - 1);
  const double var_plus = (static_cast<double>(n - 1) / n) * w + b_over_n;
  return std::sqrt(var_plus / w);
}

double ess(const Eigen::MatrixXd& draws) {
  const long n = draws.rows(), m = draws.cols();
  if (n < 4) throw std::invalid_argument("ess needs at least 4 draws");
  Eigen::VectorXd means(m), vars(m);
  for (long j = 0; j < m; ++j) {
    means(j) = draws.col(j).mean();
    vars(j) = (draws.col(j).array() - means(j)).square().sum() / static_cast<double>(n - 1);
  }
  const double w = vars.mean();
  if (w <= 0.0) throw std::invalid_argument("degenerate chain: zero variance");
  double var_plus = (static_cast<double>(n - 1) / n) * w;
  if (m > 1) {
    const double grand = means.mean();
    var_plus += (means.array() - grand).square().sum() / static_cast<double>(m - 1);
  }

  // mean autocovariance across chains at lag t (biased, 1/n normalization)
  auto acov = [&](long t) {
    double total = 0.0;
    for (long j = 0; j < m; ++j) {
      const auto col = draws.col(j);
      double s = 0.0;
      for (long i = 0; i + t < n; ++i) s += (col(i) - means(j)) * (col(i + t) - means(j));
      total += s / static_cast<double>(n);
    }
    return total / static_cast<double>(m);
  };

  // Geyer initial positive monotone sequence over lag pairs
  // (rho_0 + rho_1), (rho_2 + rho_3), ...
  double tau = -1.0;
  double prev_pair = kInf;
  for (long t = 0; t + 1 < n; t += 2) {
    const double rho_a = (t == 0) ? 1.0 : 1.0 - (w - acov(t)) / var_plus;
    const double rho_b = 1.0 - (w - acov(t + 1)) / var_plus;
    double pair = rho_a + rho_b;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1e-10);
  return static_cast<double>(n * m) / tau;
}

double quantile(const Eigen::VectorXd& draws, double p) {
  if (draws.size() == 0) throw std::invalid_argument("quantile of empty draws");
  std::vector<double> x(draws.data(), draws.data() + draws.size());
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const long lo = static_cast<long>(std::floor(h));
  const long hi = std::min<long>(lo + 1, static_cast<long>(x.size()) - 1);
  const double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

Summary summarize(const Eigen::VectorXd& draws, double level) {
  if (draws.size() == 0) throw std::invalid_argument("summarize: empty draws");
  if (!(level > 0 && level < 1)) throw std::invalid_argument("summarize: level must be in (0,1)");
  Summary s;
  s.mean = draws.mean();
  const double tail = 0.5 * (1.0 - level);
  s.lower = quantile(draws, tail);
  s.upper = quantile(draws, 1.0 - tail);
  return s;
}

}  // namespace coopnet::mcmc
