#pragma once
// Glue between the model and the sampler.

#include "coopnet/glmm.hpp"
#include "coopnet/mcmc.hpp"

namespace coopnet::fit {

class GlmmTarget : public mcmc::Target {
 public:
  GlmmTarget(const glmm::ModelData& data, const glmm::ModelSpec& spec)
      : data_(data), spec_(spec), layout_(glmm::ParamLayout::of(data, spec)) {}

  int dim() const override { return layout_.unconstrained_dim(); }
  double logp_grad(const Eigen::VectorXd& q, Eigen::VectorXd& grad) const override {
    return glmm::log_posterior_with_grad(q, data_, spec_, grad);
  }
  std::vector<std::string> names() const override {
    return layout_.constrained_names(data_.covariate_names, data_.village_ids);
  }
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& q) const override {
    return glmm::constrain(q, layout_);
  }
  const glmm::ParamLayout& layout() const { return layout_; }

 private:
  const glmm::ModelData& data_;
  const glmm::ModelSpec& spec_;
  glmm::ParamLayout layout_;
};

struct FitResult {
  glmm::ModelSpec spec;
  glmm::ModelData data;
  mcmc::PosteriorDraws draws;
};

FitResult fit_model(const data::CoopDataset& ds, const glmm::ModelSpec& spec,
                    const mcmc::SamplerConfig& config);

}  // namespace coopnet::fit
