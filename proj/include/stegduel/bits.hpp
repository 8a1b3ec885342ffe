#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "stegduel/errors.hpp"
#include "stegduel/rng.hpp"

namespace stegduel {

/// Ordered sequence of bits; every element is 0 or 1.
class BitMessage {
 public:
  BitMessage() = default;
  explicit BitMessage(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (std::uint8_t b : bits_)
      if (b > 1) throw ContractError("BitMessage: element not in {0,1}");
  }
  BitMessage(std::initializer_list<std::uint8_t> bits)
      : BitMessage(std::vector<std::uint8_t>(bits)) {}

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void push_back(std::uint8_t b) {
    if (b > 1) throw ContractError("BitMessage: element not in {0,1}");
    bits_.push_back(b);
  }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BitMessage&, const BitMessage&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// i.i.d. uniform bits, deterministic per seed.
inline BitMessage sample_message(std::size_t length, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6d657373ULL));  // "mess"
  std::vector<std::uint8_t> bits(length);
  for (auto& b : bits) b = rng.next_bit();
  return BitMessage(std::move(bits));
}

}  // namespace stegduel
