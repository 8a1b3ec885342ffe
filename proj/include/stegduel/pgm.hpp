#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "stegduel/errors.hpp"
#include "stegduel/image.hpp"

namespace stegduel {

// Binary PGM (P5), maxval 255, is the only on-disk image format. The parser
// accepts '#' comments and arbitrary whitespace between header tokens per the
// PGM grammar; exactly one whitespace byte separates the maxval from the
// raster.

namespace detail {

inline bool pgm_is_space(int c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

/// Next header token, skipping whitespace and comment lines.
inline std::string pgm_token(std::istream& in, const std::string& path) {
  int c = in.get();
  for (;;) {
    while (c != EOF && pgm_is_space(c)) c = in.get();
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
      continue;
    }
    break;
  }
  if (c == EOF)
    throw PgmTruncatedError(path + ": unexpected end of file in header");
  std::string token;
  while (c != EOF && !pgm_is_space(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  return token;
}

inline int pgm_int(std::istream& in, const std::string& path, const char* field) {
  const std::string tok = pgm_token(in, path);
  int value = 0;
  for (char ch : tok) {
    if (ch < '0' || ch > '9')
      throw PgmParseError(path + ": malformed " + std::string(field) + " '" +
                          tok + "'");
    value = value * 10 + (ch - '0');
    if (value > 1'000'000)
      throw PgmParseError(path + ": " + std::string(field) + " out of range");
  }
  if (tok.empty()) throw PgmParseError(path + ": empty " + std::string(field));
  return value;
}

}  // namespace detail

inline GrayImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");

  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in) throw PgmTruncatedError(path + ": file too short for magic");
  if (m0 == 'P' && m1 != '5') {
    if (m1 >= '1' && m1 <= '7')
      throw PgmUnsupportedFormatError(path + ": P" + std::string(1, m1) +
                                      " is not supported, only binary P5");
    throw PgmBadMagicError(path + ": bad magic");
  }
  if (m0 != 'P') throw PgmBadMagicError(path + ": bad magic");

  const int width = detail::pgm_int(in, path, "width");
  const int height = detail::pgm_int(in, path, "height");
  const int maxval = detail::pgm_int(in, path, "maxval");
  if (width <= 0 || height <= 0)
    throw PgmParseError(path + ": non-positive dimensions");
  if (maxval != 255)
    throw PgmBadMaxvalError(path + ": maxval " + std::to_string(maxval) +
                            " unsupported, must be 255");
  // Exactly one whitespace byte before the raster.
  const int sep = in.get();
  if (sep == EOF) throw PgmTruncatedError(path + ": missing raster");
  if (!detail::pgm_is_space(sep))
    throw PgmParseError(path + ": expected whitespace before raster");

  GrayImage img(width, height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixel_count()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixel_count())
    throw PgmTruncatedError(path + ": raster truncated (" +
                            std::to_string(in.gcount()) + " of " +
                            std::to_string(img.pixel_count()) + " bytes)");
  return img;
}

inline void save_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixel_count()));
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace stegduel
