#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "stegduel/errors.hpp"
#include "stegduel/image.hpp"
#include "stegduel/pgm.hpp"
#include "stegduel/rng.hpp"

namespace stegduel {

struct Dataset {
  enum class Provenance { synthetic, loaded };

  std::vector<GrayImage> images;
  Provenance provenance = Provenance::synthetic;

  std::size_t size() const { return images.size(); }
  int side() const { return images.empty() ? 0 : images.front().width; }
};

namespace detail {

/// One synthetic cover: a smooth gradient plus Gaussian blobs and coarse
/// blurred noise, with a few hard noise patches, affinely stretched so every
/// image spans at least [10,245]. The mix gives cost_texture and the
/// steganalyzer both flat and busy regions to work with.
inline GrayImage synth_image(int side, Rng& rng) {
  const double s = side;
  std::vector<double> field(static_cast<std::size_t>(side) * side, 0.0);

  // Directional gradient.
  const double angle = rng.next_range(0.0, 2.0 * 3.14159265358979323846);
  const double gx = std::cos(angle), gy = std::sin(angle);
  const double offset = rng.next_range(-0.5, 0.5);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      field[static_cast<std::size_t>(y) * side + x] =
          gx * (x / s - 0.5) + gy * (y / s - 0.5) + offset;

  // Smooth Gaussian blobs.
  const int blobs = 2 + static_cast<int>(rng.next_below(3));
  for (int b = 0; b < blobs; ++b) {
    const double cx = rng.next_range(0.0, s), cy = rng.next_range(0.0, s);
    const double sigma = rng.next_range(s / 8.0, s / 3.0);
    const double amp = rng.next_range(-0.6, 0.6);
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) {
        const double dx = x - cx, dy = y - cy;
        field[static_cast<std::size_t>(y) * side + x] +=
            amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      }
  }

  // Coarse noise bilinearly upsampled: low-frequency texture.
  const int grid = std::max(2, side / 8);
  std::vector<double> coarse(static_cast<std::size_t>(grid + 1) * (grid + 1));
  for (double& v : coarse) v = rng.next_range(-0.15, 0.15);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const double fx = static_cast<double>(x) * grid / s;
      const double fy = static_cast<double>(y) * grid / s;
      const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
      const double tx = fx - x0, ty = fy - y0;
      auto c = [&](int xi, int yi) {
        return coarse[static_cast<std::size_t>(yi) * (grid + 1) + xi];
      };
      field[static_cast<std::size_t>(y) * side + x] +=
          (1 - tx) * (1 - ty) * c(x0, y0) + tx * (1 - ty) * c(x0 + 1, y0) +
          (1 - tx) * ty * c(x0, y0 + 1) + tx * ty * c(x0 + 1, y0 + 1);
    }

  // High-variance texture patches.
  const int patches = 1 + static_cast<int>(rng.next_below(3));
  for (int p = 0; p < patches; ++p) {
    const int pw = side / 8 + static_cast<int>(rng.next_below(side / 4));
    const int ph = side / 8 + static_cast<int>(rng.next_below(side / 4));
    const int px = static_cast<int>(rng.next_below(std::max(1, side - pw)));
    const int py = static_cast<int>(rng.next_below(std::max(1, side - ph)));
    const double amp = rng.next_range(0.3, 0.8);
    for (int y = py; y < py + ph && y < side; ++y)
      for (int x = px; x < px + pw && x < side; ++x)
        field[static_cast<std::size_t>(y) * side + x] +=
            rng.next_range(-amp, amp);
  }

  // Stretch to [lo,hi] with lo <= 10 and hi >= 245.
  const auto [mn_it, mx_it] = std::minmax_element(field.begin(), field.end());
  const double mn = *mn_it, mx = *mx_it;
  const double lo = rng.next_range(0.0, 10.0), hi = rng.next_range(245.0, 255.0);
  const double scale = mx > mn ? (hi - lo) / (mx - mn) : 0.0;

  GrayImage img(side, side);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double v = lo + (field[i] - mn) * scale;
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
  }
  return img;
}

}  // namespace detail

/// Deterministic synthetic corpus; desk-scale stand-in for a grayscale photo
/// dataset.
inline Dataset synth_dataset(int count, int side, std::uint64_t seed) {
  if (count <= 0) throw ContractError("synth_dataset: count must be positive");
  if (side <= 0 || side % 16 != 0)
    throw ContractError("synth_dataset: side must be a positive multiple of 16");
  Dataset ds;
  ds.provenance = Dataset::Provenance::synthetic;
  ds.images.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, 0x696d67ULL + static_cast<std::uint64_t>(i)));
    ds.images.push_back(detail::synth_image(side, rng));
  }
  return ds;
}

/// All *.pgm files under dir, lexicographically ordered. Every image must
/// share dimensions.
inline Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError(dir + ": not a directory");
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw IoError(dir + ": no .pgm files found");

  Dataset ds;
  ds.provenance = Dataset::Provenance::loaded;
  for (const auto& p : paths) {
    GrayImage img = load_pgm(p);
    if (!ds.images.empty()) check_same_size(ds.images.front(), img, "load_dataset");
    ds.images.push_back(std::move(img));
  }
  return ds;
}

/// Keyed shuffle then cut: first floor(fraction*n) images form the train set.
/// The two halves are disjoint and their union is the input multiset.
inline std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                         std::uint64_t seed) {
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw ContractError("split: fraction must be strictly inside (0,1)");
  const std::size_t n = dataset.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  Rng rng(derive_seed(seed, 0x73706c69ULL));  // "spli"
  rng.shuffle(idx);
  const std::size_t k = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n) + 1e-9));

  Dataset train, test;
  train.provenance = test.provenance = dataset.provenance;
  for (std::size_t i = 0; i < n; ++i)
    (i < k ? train : test).images.push_back(dataset.images[idx[i]]);
  return {std::move(train), std::move(test)};
}

}  // namespace stegduel
