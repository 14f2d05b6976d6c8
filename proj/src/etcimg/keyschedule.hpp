#pragma once

// Keyed randomness for every cipher step, derived from a 64-bit master key.
//
// The generator is SplitMix64. It is portable and bit-exact across
// implementations, which is what the golden-vector tests rely on, but it is
// not a cryptographic PRNG. A deployment should put a real KDF and CSPRNG
// behind the same functions.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace etcimg {

struct MasterKey {
  std::uint64_t seed = 0;

  /// Exactly 16 hex digits (either case); surrounding whitespace is ignored.
  static MasterKey parse(std::string_view hex);
  /// 16 lowercase hex digits.
  std::string to_hex() const;

  friend bool operator==(const MasterKey&, const MasterKey&) = default;
};

enum class Scheme { Color, GrayscaleBased };

// Bit flags for the four cipher steps, in application order.
enum Step : unsigned {
  kScramble = 1u << 0,
  kRotateFlip = 1u << 1,
  kNegPos = 1u << 2,
  kColorShuffle = 1u << 3,
};

class StepSet {
 public:
  constexpr StepSet() = default;
  constexpr explicit StepSet(unsigned bits) : bits_(bits & kAllBits) {}

  static constexpr StepSet all() { return StepSet(kAllBits); }
  static constexpr StepSet none() { return StepSet(0); }

  /// Comma list of s,r,n,c (or scramble,rotate,negpos,color); "" is the empty set.
  static StepSet parse(std::string_view text);
  /// Canonical "s,r,n,c" subset, in step order.
  std::string to_string() const;

  constexpr bool has(Step s) const { return (bits_ & s) != 0; }
  constexpr unsigned bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr StepSet with(Step s) const { return StepSet(bits_ | s); }
  constexpr StepSet without(Step s) const { return StepSet(bits_ & ~static_cast<unsigned>(s)); }

  friend constexpr bool operator==(StepSet, StepSet) = default;

 private:
  static constexpr unsigned kAllBits = 0xFu;
  unsigned bits_ = 0;
};

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view text);

// Stream tags; each keyed step draws from its own stream.
inline constexpr std::uint32_t kTagScramble = 0;
inline constexpr std::uint32_t kTagRotateFlip = 1;
inline constexpr std::uint32_t kTagNegPos = 2;
inline constexpr std::uint32_t kTagColorShuffle = 3;
inline constexpr std::uint32_t kTagTemplate = 100;

/// One SplitMix64 step: returns (new state, output).
std::pair<std::uint64_t, std::uint64_t> splitmix_next(std::uint64_t state) noexcept;

/// SplitMix64 output transform applied to `z`.
std::uint64_t mix64(std::uint64_t z) noexcept;

std::uint64_t derive_step_seed(MasterKey key, std::uint32_t step_tag) noexcept;

class StepStream {
 public:
  explicit StepStream(std::uint64_t seed) noexcept : state_(seed) {}
  StepStream(MasterKey key, std::uint32_t step_tag) noexcept : state_(derive_step_seed(key, step_tag)) {}

  std::uint64_t next() noexcept;

  /// next() mod n. Modulo bias is below 2^-32 for n <= 2^32.
  std::uint64_t uniform_below(std::uint64_t n);

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates from the top: for i = n-1..1, swap(i, uniform_below(i+1)).
std::vector<std::uint32_t> gen_permutation(std::uint64_t seed, std::size_t n);

std::vector<std::uint32_t> gen_symbols(std::uint64_t seed, std::size_t n, std::uint32_t alphabet);

/// log2 of the key space: n! for scrambling, 8^n, 2^n and 6^n for the per-block steps.
double keyspace_bits(std::size_t n_blocks, StepSet steps, Scheme scheme);

}  // namespace etcimg
