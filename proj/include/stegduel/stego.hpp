#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "stegduel/bits.hpp"
#include "stegduel/errors.hpp"
#include "stegduel/image.hpp"
#include "stegduel/rng.hpp"

namespace stegduel {

/// Shared secret driving the pseudorandom pixel visiting path, the ±1 coin
/// flips, and the adaptive simulator's payload bits. Same key and cover
/// dimensions always give the same path.
struct StegoKey {
  std::uint64_t seed = 0;
};

namespace detail {
constexpr std::uint64_t kPathSalt = 0x70617468ULL;   // "path"
constexpr std::uint64_t kCoinSalt = 0x636f696eULL;   // "coin"
constexpr std::uint64_t kBitsSalt = 0x62697473ULL;   // "bits"
}  // namespace detail

/// Keyed permutation of pixel indices (Fisher-Yates over xoshiro256**,
/// splitmix64-seeded from the key).
inline std::vector<std::uint32_t> pixel_path(const StegoKey& key,
                                             std::size_t pixel_count) {
  std::vector<std::uint32_t> path(pixel_count);
  std::iota(path.begin(), path.end(), 0u);
  Rng rng(derive_seed(key.seed, detail::kPathSalt));
  rng.shuffle(path);
  return path;
}

namespace detail {

inline void check_capacity(std::size_t bits, std::size_t pixels, const char* op) {
  if (bits > pixels)
    throw CapacityError(std::string(op) + ": message of " + std::to_string(bits) +
                            " bits exceeds capacity of " + std::to_string(pixels) +
                            " bits",
                        pixels);
}

/// ±1 LSB-matching change for one pixel whose LSB disagrees with the bit.
inline std::uint8_t lsb_adjust(std::uint8_t v, Rng& coins) {
  if (v == 0) return 1;     // clamp: never wrap below 0
  if (v == 255) return 254; // clamp: never wrap above 255
  return coins.next_bool() ? static_cast<std::uint8_t>(v + 1)
                           : static_cast<std::uint8_t>(v - 1);
}

}  // namespace detail

/// LSB ±1 matching along the keyed path. Pixels whose LSB already equals the
/// message bit are untouched; the rest move by ±1 (keyed coin, clamped at the
/// 0/255 boundaries). Unvisited pixels are identical to the cover.
inline GrayImage lsb_matching_embed(const GrayImage& cover,
                                    const BitMessage& message,
                                    const StegoKey& key) {
  detail::check_capacity(message.size(), cover.pixel_count(),
                         "lsb_matching_embed");
  GrayImage stego = cover;
  const auto path = pixel_path(key, cover.pixel_count());
  Rng coins(derive_seed(key.seed, detail::kCoinSalt));
  for (std::size_t i = 0; i < message.size(); ++i) {
    std::uint8_t& px = stego.pixels[path[i]];
    if ((px & 1u) != message[i]) px = detail::lsb_adjust(px, coins);
  }
  return stego;
}

/// LSBs of the first `length` pixels along the keyed path.
inline BitMessage lsb_extract(const GrayImage& stego, const StegoKey& key,
                              std::size_t length) {
  detail::check_capacity(length, stego.pixel_count(), "lsb_extract");
  const auto path = pixel_path(key, stego.pixel_count());
  std::vector<std::uint8_t> bits(length);
  for (std::size_t i = 0; i < length; ++i)
    bits[i] = stego.pixels[path[i]] & 1u;
  return BitMessage(std::move(bits));
}

/// Per-pixel nonnegative modification costs, same dimensions as the cover.
struct CostMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

namespace detail {
inline void check_costs(const CostMap& costs, const GrayImage& ref,
                        const char* op) {
  if (costs.width != ref.width || costs.height != ref.height)
    throw DimensionError(std::string(op) + ": cost map " +
                         std::to_string(costs.width) + "x" +
                         std::to_string(costs.height) + " does not match image " +
                         std::to_string(ref.width) + "x" +
                         std::to_string(ref.height));
  for (double c : costs.values)
    if (!(c >= 0.0) || !std::isfinite(c))
      throw ContractError(std::string(op) + ": cost map entries must be finite "
                          "and nonnegative");
}
}  // namespace detail

/// Total embedding distortion: sum over pixels of cost * |cover - stego|.
inline double distortion(const GrayImage& cover, const GrayImage& stego,
                         const CostMap& costs) {
  check_same_size(cover, stego, "distortion");
  detail::check_costs(costs, cover, "distortion");
  double total = 0.0;
  for (std::size_t i = 0; i < cover.pixel_count(); ++i)
    total += costs.values[i] *
             std::abs(static_cast<int>(cover.pixels[i]) -
                      static_cast<int>(stego.pixels[i]));
  return total;
}

/// Degenerate cost function: every pixel costs 1, so distortion equals the
/// L1 pixel distance.
inline CostMap cost_uniform(const GrayImage& cover) {
  return {cover.width, cover.height,
          std::vector<double>(cover.pixel_count(), 1.0)};
}

/// Texture-adaptive cost 1/(1 + var(3x3 neighborhood)): flat regions are
/// expensive to touch, busy regions cheap. Edge pixels use the clipped
/// neighborhood.
inline CostMap cost_texture(const GrayImage& cover) {
  if (cover.width < 3 || cover.height < 3)
    throw DimensionError("cost_texture: image must be at least 3x3, got " +
                         std::to_string(cover.width) + "x" +
                         std::to_string(cover.height));
  CostMap costs{cover.width, cover.height,
                std::vector<double>(cover.pixel_count())};
  for (int y = 0; y < cover.height; ++y)
    for (int x = 0; x < cover.width; ++x) {
      double sum = 0.0, sum_sq = 0.0;
      int count = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || nx >= cover.width || ny < 0 || ny >= cover.height)
            continue;
          const double v = cover.at(nx, ny);
          sum += v;
          sum_sq += v * v;
          ++count;
        }
      const double mean = sum / count;
      const double variance = std::max(0.0, sum_sq / count - mean * mean);
      costs.values[static_cast<std::size_t>(y) * cover.width + x] =
          1.0 / (1.0 + variance);
    }
  return costs;
}

/// Distortion-minimizing embedding simulator: flips fresh keyed payload bits
/// into the floor(payload_bpp * pixels) cheapest pixels (ties broken by the
/// keyed path order). No blind extraction exists for this variant; it produces
/// stego material for steganalyzer training and evaluation.
inline GrayImage adaptive_embed_simulate(const GrayImage& cover,
                                         double payload_bpp,
                                         const CostMap& costs,
                                         const StegoKey& key) {
  if (!(payload_bpp > 0.0) || payload_bpp > 1.0)
    throw ContractError("adaptive_embed_simulate: payload_bpp must be in (0,1]");
  detail::check_costs(costs, cover, "adaptive_embed_simulate");
  const std::size_t n = cover.pixel_count();
  const std::size_t k = static_cast<std::size_t>(
      std::floor(payload_bpp * static_cast<double>(n) + 1e-9));

  const auto path = pixel_path(key, n);
  std::vector<std::uint32_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[path[i]] = static_cast<std::uint32_t>(i);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (costs.values[a] != costs.values[b])
      return costs.values[a] < costs.values[b];
    return rank[a] < rank[b];
  });

  std::vector<std::uint8_t> selected(n, 0);
  for (std::size_t i = 0; i < k; ++i) selected[order[i]] = 1;

  GrayImage stego = cover;
  Rng payload(derive_seed(key.seed, detail::kBitsSalt));
  Rng coins(derive_seed(key.seed, detail::kCoinSalt));
  // Visit in keyed path order so the result is independent of the sort's
  // internal ordering details.
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t px_index = path[i];
    if (!selected[px_index]) continue;
    std::uint8_t& px = stego.pixels[px_index];
    const std::uint8_t bit = payload.next_bit();
    if ((px & 1u) != bit) px = detail::lsb_adjust(px, coins);
  }
  return stego;
}

}  // namespace stegduel
