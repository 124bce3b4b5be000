#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "graphdis/tensor.hpp"

namespace graphdis {

struct Parameter {
  Tensor value;
  Tensor grad;
  Tensor m;  // Adam first moment
  Tensor v;  // Adam second moment
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Named trainable tensors with gradient accumulators and optimizer state.
// Iteration is ordered by name.
class ParamStore {
 public:
  Parameter& add(const std::string& name, Tensor init);

  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  std::size_t size() const { return params_.size(); }
  std::size_t num_scalars() const;

  std::size_t step() const { return step_; }
  void set_step(std::size_t step) { step_ = step; }

  void zero_grad();

  // Equality of parameter values only.
  bool same_values(const ParamStore& other) const;

 private:
  friend void adam_step(ParamStore&, const AdamConfig&);
  std::map<std::string, Parameter> params_;
  std::size_t step_ = 0;
};

// Bias-corrected Adam update of every parameter, then clears gradients and
// increments the step counter.
void adam_step(ParamStore& store, const AdamConfig& cfg);

}  // namespace graphdis
