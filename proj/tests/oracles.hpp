// Test-only reference implementations. Each oracle is an independent
// brute-force path used to pin expected values; none of them share code with
// the library implementations they check.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "stegduel/image.hpp"
#include "stegduel/tensor.hpp"

namespace oracle {

/// Triple-loop matrix product.
inline std::vector<double> matmul(const std::vector<double>& a,
                                  const std::vector<double>& b, std::size_t m,
                                  std::size_t k, std::size_t n) {
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t kk = 0; kk < k; ++kk)
        out[i * n + j] += a[i * k + kk] * b[kk * n + j];
  return out;
}

/// Direct correlation sum over every output coordinate.
inline std::vector<double> conv2d(const std::vector<double>& in,
                                  const std::vector<double>& kernel,
                                  std::size_t N, std::size_t C, std::size_t H,
                                  std::size_t W, std::size_t F, std::size_t kh,
                                  std::size_t kw, int stride, int pad) {
  const std::size_t oh = (H + 2 * pad - kh) / stride + 1;
  const std::size_t ow = (W + 2 * pad - kw) / stride + 1;
  std::vector<double> out(N * F * oh * ow, 0.0);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          double acc = 0.0;
          for (std::size_t c = 0; c < C; ++c)
            for (std::size_t u = 0; u < kh; ++u)
              for (std::size_t v = 0; v < kw; ++v) {
                const long iy = static_cast<long>(oy) * stride - pad + u;
                const long ix = static_cast<long>(ox) * stride - pad + v;
                if (iy < 0 || iy >= static_cast<long>(H) || ix < 0 ||
                    ix >= static_cast<long>(W))
                  continue;
                acc += in[((n * C + c) * H + iy) * W + ix] *
                       kernel[((f * C + c) * kh + u) * kw + v];
              }
          out[((n * F + f) * oh + oy) * ow + ox] = acc;
        }
  return out;
}

/// Scatter-accumulate transposed convolution.
inline std::vector<double> conv2d_transpose(const std::vector<double>& in,
                                            const std::vector<double>& kernel,
                                            std::size_t N, std::size_t F,
                                            std::size_t H, std::size_t W,
                                            std::size_t C, std::size_t kh,
                                            std::size_t kw, int stride, int pad) {
  const std::size_t oh = (H - 1) * stride + kh - 2 * pad;
  const std::size_t ow = (W - 1) * stride + kw - 2 * pad;
  std::vector<double> out(N * C * oh * ow, 0.0);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t iy = 0; iy < H; ++iy)
        for (std::size_t ix = 0; ix < W; ++ix)
          for (std::size_t c = 0; c < C; ++c)
            for (std::size_t u = 0; u < kh; ++u)
              for (std::size_t v = 0; v < kw; ++v) {
                const long ty = static_cast<long>(iy) * stride - pad + u;
                const long tx = static_cast<long>(ix) * stride - pad + v;
                if (ty < 0 || ty >= static_cast<long>(oh) || tx < 0 ||
                    tx >= static_cast<long>(ow))
                  continue;
                out[((n * C + c) * oh + ty) * ow + tx] +=
                    in[((n * F + f) * H + iy) * W + ix] *
                    kernel[((f * C + c) * kh + u) * kw + v];
              }
  return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Population variance of the clipped 3x3 neighborhood around (x,y).
inline double neighborhood_variance(const stegduel::GrayImage& img, int x, int y) {
  std::vector<double> samples;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      const int nx = x + dx, ny = y + dy;
      if (nx < 0 || nx >= img.width || ny < 0 || ny >= img.height) continue;
      samples.push_back(img.at(nx, ny));
    }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  return var / static_cast<double>(samples.size());
}

/// Scalar-loop binary cross-entropy with clamped probabilities.
inline double bce(const std::vector<double>& probs,
                  const std::vector<double>& targets) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double p = probs[i];
    if (p < 1e-12) p = 1e-12;
    if (p > 1.0 - 1e-12) p = 1.0 - 1e-12;
    total += targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p);
  }
  return -total / static_cast<double>(probs.size());
}

/// Scalar reference for one RMSProp update.
inline void rmsprop_scalar(double& p, double& v, double g, double decay,
                           double lr, double eps) {
  v = decay * v + (1.0 - decay) * g * g;
  p -= lr * g / (std::sqrt(v) + eps);
}

}  // namespace oracle
