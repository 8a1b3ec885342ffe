#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "stegduel/errors.hpp"
#include "stegduel/tensor.hpp"

namespace stegduel {

/// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0)
      : width(width), height(height),
        pixels(static_cast<std::size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0)
      throw ContractError("GrayImage: dimensions must be positive");
  }

  std::size_t pixel_count() const { return pixels.size(); }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }

  bool same_size(const GrayImage& o) const {
    return width == o.width && height == o.height;
  }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

inline void check_same_size(const GrayImage& a, const GrayImage& b,
                            const char* op) {
  if (!a.same_size(b))
    throw DimensionError(std::string(op) + ": image sizes differ (" +
                         std::to_string(a.width) + "x" + std::to_string(a.height) +
                         " vs " + std::to_string(b.width) + "x" +
                         std::to_string(b.height) + ")");
}

// Networks operate in the tanh-compatible [-1,1] pixel domain; conversion to
// and from 8-bit happens only at these two boundaries.

inline Tensor image_to_tensor(const GrayImage& img) {
  std::vector<double> d(img.pixel_count());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = static_cast<double>(img.pixels[i]) / 127.5 - 1.0;
  return Tensor::from_data({1, 1, static_cast<std::size_t>(img.height),
                            static_cast<std::size_t>(img.width)},
                           std::move(d));
}

/// round((x+1)*127.5) clamped to [0,255].
inline GrayImage tensor_to_image(const Tensor& t) {
  const Shape& s = t.shape();
  if (s.size() != 4 || s[0] != 1 || s[1] != 1)
    throw DimensionError("tensor_to_image: expected shape [1,1,H,W], got " +
                         shape_str(s));
  GrayImage img(static_cast<int>(s[3]), static_cast<int>(s[2]));
  for (std::size_t i = 0; i < t.numel(); ++i) {
    const double v = std::round((t.data()[i] + 1.0) * 127.5);
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return img;
}

}  // namespace stegduel
