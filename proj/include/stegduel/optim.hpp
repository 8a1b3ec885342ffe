#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "stegduel/errors.hpp"
#include "stegduel/tensor.hpp"

namespace stegduel {

/// RMSProp accumulator: one running mean of squared gradients per parameter,
/// shapes mirroring the parameter list it was built from.
struct OptimState {
  double decay = 0.9;
  double epsilon = 1e-8;
  std::vector<std::vector<double>> sq_avg;

  OptimState() = default;
  explicit OptimState(const std::vector<Tensor>& params, double decay = 0.9,
                      double epsilon = 1e-8)
      : decay(decay), epsilon(epsilon) {
    sq_avg.reserve(params.size());
    for (const Tensor& p : params) sq_avg.emplace_back(p.numel(), 0.0);
  }
};

/// v <- decay*v + (1-decay)*g^2 ; p <- p - lr*g/(sqrt(v)+eps).
/// With lr == 0 the parameters are untouched (the accumulator still decays).
inline void rmsprop_step(std::vector<Tensor>& params, OptimState& state,
                         double lr) {
  if (state.sq_avg.size() != params.size())
    throw ContractError("rmsprop_step: state tracks " +
                        std::to_string(state.sq_avg.size()) + " parameters, got " +
                        std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    auto& v = state.sq_avg[i];
    if (v.size() != p.numel())
      throw ContractError("rmsprop_step: state shape mismatch at parameter " +
                          std::to_string(i));
    const auto& g = p.grad();
    if (g.empty())
      throw ContractError("rmsprop_step: parameter " + std::to_string(i) +
                          " has no gradient");
    auto& pd = p.mutable_data();
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double gj = g[j];
      if (!std::isfinite(gj))
        throw OverflowError("rmsprop_step: non-finite gradient at parameter " +
                            std::to_string(i));
      v[j] = state.decay * v[j] + (1.0 - state.decay) * gj * gj;
      pd[j] -= lr * gj / (std::sqrt(v[j]) + state.epsilon);
    }
  }
}

inline void zero_grads(std::vector<Tensor>& params) {
  for (Tensor& p : params) p.zero_grad();
}

}  // namespace stegduel
