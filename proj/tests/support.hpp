#pragma once
#include <cstdint>
#include <random>
#include <string>

#include "etcimg/image.hpp"

namespace testsupport {

inline std::string fixture(const std::string& name) { return std::string(ETCIMG_TEST_DATA) + "/" + name; }

inline etcimg::Image random_image(std::mt19937_64& rng, int w, int h, int ch) {
  etcimg::Image img(w, h, ch);
  for (auto& s : img.samples()) s = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

// sample(x, y, c) = (7x + 13y + 51c + xy) mod 256; matches tests/oracles/cipher_oracle.py.
inline etcimg::Image pattern_image(int w, int h) {
  etcimg::Image img(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>((7 * x + 13 * y + 51 * c + x * y) % 256);
  return img;
}

inline std::uint64_t fnv1a(const etcimg::Image& img) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (auto b : img.samples()) {
    h ^= b;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace testsupport
