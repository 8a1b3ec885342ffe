#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "stegduel/bits.hpp"
#include "stegduel/errors.hpp"
#include "stegduel/image.hpp"

namespace stegduel {

/// +infinity marks the zero-MSE case (identical images); serialized as "inf".
constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

/// 10*log10(255^2 / MSE) on 8-bit values; identical images give the sentinel.
inline double psnr(const GrayImage& a, const GrayImage& b) {
  check_same_size(a, b, "psnr");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    sq += d * d;
  }
  if (sq == 0.0) return kPsnrInfinite;
  const double mse = sq / static_cast<double>(a.pixel_count());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// Hamming distance / length. bit accuracy = 1 - BER.
inline double bit_error_rate(const BitMessage& m, const BitMessage& m_hat) {
  if (m.size() != m_hat.size())
    throw DimensionError("bit_error_rate: lengths differ (" +
                         std::to_string(m.size()) + " vs " +
                         std::to_string(m_hat.size()) + ")");
  if (m.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < m.size(); ++i) errors += m[i] != m_hat[i];
  return static_cast<double>(errors) / static_cast<double>(m.size());
}

/// Fraction of samples where (prob >= threshold) matches the cover label.
/// Probabilities follow the steganalyzer convention: 1 = cover, 0 = stego.
inline double detection_accuracy(const std::vector<bool>& is_cover,
                                 const std::vector<double>& probs,
                                 double threshold = 0.5) {
  if (is_cover.size() != probs.size())
    throw DimensionError("detection_accuracy: " + std::to_string(is_cover.size()) +
                         " labels vs " + std::to_string(probs.size()) + " probs");
  if (probs.empty())
    throw ContractError("detection_accuracy: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    correct += (probs[i] >= threshold) == is_cover[i];
  return static_cast<double>(correct) / static_cast<double>(probs.size());
}

/// floor(side^2 * bpp) message bits for a side x side carrier.
inline std::size_t payload_bits(int image_side, double bpp) {
  if (image_side <= 0) throw ContractError("payload_bits: side must be positive");
  if (!(bpp > 0.0) || bpp > 1.0)
    throw ContractError("payload_bits: bpp must be in (0,1]");
  const double exact =
      bpp * static_cast<double>(image_side) * static_cast<double>(image_side);
  // Nudge before flooring so decimal rates like 0.3 don't round an exact
  // integer product down.
  return static_cast<std::size_t>(std::floor(exact + 1e-9));
}

struct MetricsRecord {
  double psnr_db = 0.0;  // kPsnrInfinite when all pairs are identical
  double bit_accuracy = 0.0;
  double message_exact_rate = 0.0;
  double detection_accuracy = 0.0;
  double embedding_rate_bpp = 0.0;
};

}  // namespace stegduel
