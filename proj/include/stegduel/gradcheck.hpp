#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "stegduel/errors.hpp"
#include "stegduel/rng.hpp"
#include "stegduel/tensor.hpp"

namespace stegduel {

/// Compare the analytic gradient of a scalar-valued tensor function against
/// central finite differences. Returns the max over coordinates of
///   |analytic - (f(x+eps*e) - f(x-eps*e)) / (2*eps)| / max(1, |analytic|).
inline double finite_diff_check(
    const std::function<Tensor(const Tensor&)>& f, const Tensor& input,
    double epsilon = 1e-5) {
  Tensor x = Tensor::from_data(input.shape(), input.data(), true);
  Tensor y = f(x);
  if (y.numel() != 1)
    throw ContractError("finite_diff_check: f must be scalar-valued");
  backward(y);
  std::vector<double> analytic = x.grad();
  if (analytic.empty()) analytic.assign(x.numel(), 0.0);

  double worst = 0.0;
  NoGradGuard no_grad;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    std::vector<double> d = input.data();
    d[i] += epsilon;
    const double fp = f(Tensor::from_data(input.shape(), d)).item();
    d[i] = input.data()[i] - epsilon;
    const double fm = f(Tensor::from_data(input.shape(), d)).item();
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw OverflowError("finite_diff_check: non-finite function value");
    const double numeric = (fp - fm) / (2.0 * epsilon);
    const double err =
        std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Self-check registry: one entry per autodiff primitive. Each run() draws a
// random instance, scalarizes the op output through a fixed random weighting
// (so per-element gradient errors cannot cancel), and finite-diff-checks the
// gradient with respect to every differentiable input.
// ---------------------------------------------------------------------------

struct PrimitiveCheck {
  std::string name;
  std::function<double(Rng&)> run;  // max relative error for one random instance
};

namespace detail {

inline Tensor random_tensor(Rng& rng, Shape shape, double lo, double hi) {
  std::vector<double> d(shape_numel(shape));
  for (double& v : d) v = rng.next_range(lo, hi);
  return Tensor::from_data(std::move(shape), std::move(d));
}

/// Scalarize: sum(op_out * w) with w fixed per instance.
inline Tensor weighted_sum(const Tensor& t, const std::vector<double>& w) {
  return sum(mul(t, Tensor::from_data(t.shape(), w)));
}

inline std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (double& v : w) v = rng.next_range(-1.0, 1.0);
  return w;
}

}  // namespace detail

inline std::vector<PrimitiveCheck> primitive_checks() {
  using detail::random_tensor;
  using detail::random_weights;
  using detail::weighted_sum;

  std::vector<PrimitiveCheck> checks;
  auto both_inputs = [](Rng& rng, const Tensor& a, const Tensor& b,
                        auto op, std::size_t out_n) {
    const auto w = random_weights(rng, out_n);
    const double ea = finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(op(x, b), w); }, a);
    const double eb = finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(op(a, x), w); }, b);
    return std::max(ea, eb);
  };

  checks.push_back({"add", [both_inputs](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, -2, 2), b = random_tensor(rng, {3, 3}, -2, 2);
    return both_inputs(rng, a, b, [](auto& x, auto& y) { return add(x, y); }, 9);
  }});
  checks.push_back({"sub", [both_inputs](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, -2, 2), b = random_tensor(rng, {3, 3}, -2, 2);
    return both_inputs(rng, a, b, [](auto& x, auto& y) { return sub(x, y); }, 9);
  }});
  checks.push_back({"mul_elementwise", [both_inputs](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, -2, 2), b = random_tensor(rng, {3, 3}, -2, 2);
    return both_inputs(rng, a, b, [](auto& x, auto& y) { return mul(x, y); }, 9);
  }});
  checks.push_back({"matmul", [both_inputs](Rng& rng) {
    auto a = random_tensor(rng, {2, 3}, -2, 2), b = random_tensor(rng, {3, 4}, -2, 2);
    return both_inputs(rng, a, b, [](auto& x, auto& y) { return matmul(x, y); }, 8);
  }});
  checks.push_back({"reshape", [](Rng& rng) {
    auto a = random_tensor(rng, {2, 6}, -2, 2);
    const auto w = random_weights(rng, 12);
    return finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(reshape(x, {3, 4}), w); }, a);
  }});
  checks.push_back({"concat", [both_inputs](Rng& rng) {
    auto a = random_tensor(rng, {2, 3}, -2, 2), b = random_tensor(rng, {2, 2}, -2, 2);
    return both_inputs(rng, a, b,
                       [](auto& x, auto& y) { return concat(x, y, 1); }, 10);
  }});
  checks.push_back({"mean", [](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, -2, 2);
    return finite_diff_check([](const Tensor& x) { return mean(x); }, a);
  }});
  checks.push_back({"sum", [](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, -2, 2);
    return finite_diff_check([](const Tensor& x) { return sum(x); }, a);
  }});
  // Keep random inputs away from the leaky_relu kink and clamp edges; the
  // central difference straddles the non-smooth point otherwise.
  checks.push_back({"leaky_relu", [](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, 0.05, 2.0);
    for (double& v : a.mutable_data())
      if (rng.next_bool()) v = -v;
    const auto w = random_weights(rng, 9);
    return finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(leaky_relu(x, 0.2), w); }, a);
  }});
  checks.push_back({"tanh", [](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, -2, 2);
    const auto w = random_weights(rng, 9);
    return finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(tanh(x), w); }, a);
  }});
  checks.push_back({"sigmoid", [](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, -4, 4);
    const auto w = random_weights(rng, 9);
    return finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(sigmoid(x), w); }, a);
  }});
  checks.push_back({"clamp", [](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, -2, 2);
    for (double& v : a.mutable_data())  // keep away from the clamp edges
      if (std::abs(std::abs(v) - 1.0) < 0.05) v = v > 0 ? 0.9 : -0.9;
    const auto w = random_weights(rng, 9);
    return finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(clamp(x, -1.0, 1.0), w); }, a);
  }});
  checks.push_back({"log", [](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, 0.5, 3.0);
    const auto w = random_weights(rng, 9);
    return finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(log(x), w); }, a);
  }});
  checks.push_back({"sqrt", [](Rng& rng) {
    auto a = random_tensor(rng, {3, 3}, 0.5, 3.0);
    const auto w = random_weights(rng, 9);
    return finite_diff_check(
        [&](const Tensor& x) { return weighted_sum(sqrt(x), w); }, a);
  }});
  checks.push_back({"bias_add", [both_inputs](Rng& rng) {
    auto x = random_tensor(rng, {1, 2, 3, 3}, -2, 2);
    auto b = random_tensor(rng, {2}, -1, 1);
    return both_inputs(rng, x, b,
                       [](auto& u, auto& v) { return bias_add(u, v); }, 18);
  }});
  checks.push_back({"conv2d", [both_inputs](Rng& rng) {
    auto x = random_tensor(rng, {1, 2, 6, 6}, -1, 1);
    auto k = random_tensor(rng, {3, 2, 3, 3}, -1, 1);
    return both_inputs(rng, x, k,
                       [](auto& u, auto& v) { return conv2d(u, v, 2, 1); },
                       3 * 3 * 3);
  }});
  checks.push_back({"conv2d_transpose", [both_inputs](Rng& rng) {
    auto x = random_tensor(rng, {1, 3, 3, 3}, -1, 1);
    auto k = random_tensor(rng, {3, 2, 4, 4}, -1, 1);
    return both_inputs(
        rng, x, k, [](auto& u, auto& v) { return conv2d_transpose(u, v, 2, 1); },
        2 * 6 * 6);
  }});
  return checks;
}

struct GradCheckReport {
  std::string op;
  double max_rel_err = 0.0;
  bool passed = false;
};

/// Run every primitive through `instances` random finite-difference checks.
inline std::vector<GradCheckReport> run_gradcheck(std::uint64_t seed = 1,
                                                  int instances = 20,
                                                  double tolerance = 1e-4) {
  std::vector<GradCheckReport> reports;
  for (const auto& check : primitive_checks()) {
    Rng rng(derive_seed(seed, std::hash<std::string>{}(check.name)));
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) worst = std::max(worst, check.run(rng));
    reports.push_back({check.name, worst, worst < tolerance});
  }
  return reports;
}

}  // namespace stegduel
