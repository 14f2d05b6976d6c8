#pragma once

// Block scrambling-based image encryption for Encryption-then-Compression.
//
// Color scheme: the image is cut into square blocks (16x16 by default, one
// 4:2:0 JPEG MCU) and four keyed steps are applied in order:
//   1. block scrambling        (permutation of block positions)
//   2. block rotation + flip   (one of the 8 square symmetries per block)
//   3. negative-positive       (p -> 255 - p on the whole block, per block bit)
//   4. color component shuffle (one of the 6 RGB orders per block)
// Grayscale-based scheme: the R, G and B planes are stacked vertically into a
// single-channel W x 3H image, which is then encrypted with steps 1-3 and
// 8x8 blocks (one DCT block).

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etcimg/image.hpp"
#include "etcimg/keyschedule.hpp"

namespace etcimg {

struct CipherConfig {
  Scheme scheme = Scheme::Color;
  int block_size = 16;
  StepSet steps = StepSet::all();

  static CipherConfig defaults(Scheme scheme);

  /// Throws InvalidArgument when the config cannot be applied to an image with `channels`.
  void validate(int channels) const;
};

/// Square symmetry: rotate 90*(code%4) degrees counter-clockwise, then mirror
/// left-right if code >= 4.
class Orientation {
 public:
  constexpr Orientation() = default;
  constexpr explicit Orientation(unsigned code) : code_(static_cast<std::uint8_t>(code & 7u)) {}

  static constexpr Orientation identity() { return Orientation(0); }
  static constexpr Orientation rotation(int quarter_turns) { return Orientation(static_cast<unsigned>(((quarter_turns % 4) + 4) % 4)); }

  constexpr unsigned code() const { return code_; }
  constexpr int quarter_turns() const { return code_ & 3; }
  constexpr bool flipped() const { return code_ >= 4; }
  constexpr bool is_rotation() const { return code_ < 4; }

  Orientation inverse() const;
  /// The orientation equal to applying `first`, then *this.
  Orientation after(Orientation first) const;

  /// Where a displacement (drow, dcol) ends up after the transform.
  std::array<int, 2> map_offset(int drow, int dcol) const;

  friend constexpr bool operator==(Orientation, Orientation) = default;

 private:
  std::uint8_t code_ = 0;
};

std::vector<std::uint32_t> invert_permutation(std::span<const std::uint32_t> perm);

/// output[i] = blocks[perm[i]]
std::vector<Image> apply_scramble(std::span<const Image> blocks, std::span<const std::uint32_t> perm);
/// Inverse of apply_scramble with the same perm.
std::vector<Image> undo_scramble(std::span<const Image> blocks, std::span<const std::uint32_t> perm);

Image apply_orientation(const Image& block, Orientation o);
Image apply_negpos(const Image& block, bool invert);

/// Channel orders indexed lexicographically: 0=RGB 1=RBG 2=GRB 3=GBR 4=BRG 5=BGR.
Image apply_color_shuffle(const Image& block, unsigned order);
unsigned inverse_color_shuffle(unsigned order);

/// Everything encryption needs to remember besides the key.
struct CipherSidecar {
  static constexpr int kFormatVersion = 1;

  int version = kFormatVersion;
  Scheme scheme = Scheme::Color;
  int block_size = 16;
  StepSet steps;
  int orig_width = 0;
  int orig_height = 0;
  int channels = 3;
  int pad_right = 0;
  int pad_bottom = 0;

  /// Flat "key=value" lines.
  std::string serialize() const;
  static CipherSidecar parse(std::string_view text);

  CipherConfig config() const { return {scheme, block_size, steps}; }

  friend bool operator==(const CipherSidecar&, const CipherSidecar&) = default;
};

/// Per-block randomness for one image, drawn in block-index order.
struct KeyMaterial {
  std::vector<std::uint32_t> permutation;  // empty when scrambling is off
  std::vector<Orientation> orientations;   // empty when rotation/flip is off
  std::vector<std::uint8_t> negpos;        // empty when negative-positive is off
  std::vector<std::uint8_t> color_orders;  // empty when color shuffling is off
};

KeyMaterial derive_key_material(MasterKey key, StepSet steps, std::size_t n_blocks);

/// R, G, B planes stacked top to bottom into one channel (identity for 1-channel input).
Image stack_planes(const Image& img);
Image unstack_planes(const Image& stacked, int channels);

struct Encrypted {
  Image image;
  CipherSidecar sidecar;
};

/// Requires both sides divisible by the block size.
Encrypted encrypt(const Image& img, MasterKey key, const CipherConfig& cfg);
/// Edge-replicates to a multiple of the block size first; padding goes into the sidecar.
Encrypted encrypt_padded(const Image& img, MasterKey key, const CipherConfig& cfg);

Image decrypt(const Image& cipher, MasterKey key, const CipherSidecar& sidecar);

}  // namespace etcimg
