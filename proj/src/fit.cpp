#include "coopnet/fit.hpp"

namespace coopnet::fit {

FitResult fit_model(const data::CoopDataset& ds, const glmm::ModelSpec& spec,
                    const mcmc::SamplerConfig& config) {
  FitResult result;
  result.spec = spec;
  result.data = glmm::build_model_data(ds, spec);
  if (result.spec.family == glmm::Family::ordered_logistic)
    result.spec.n_categories = result.data.n_categories;
  GlmmTarget target(result.data, result.spec);
  result.draws = mcmc::run_chains(target, config);
  return result;
}

}  // namespace coopnet::fit
