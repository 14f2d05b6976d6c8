#include "etcimg/keyschedule.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "etcimg/error.hpp"

namespace etcimg {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

MasterKey MasterKey::parse(std::string_view hex) {
  hex = trim(hex);
  if (hex.size() != 16) fail(ErrorKind::InvalidArgument, "key must be exactly 16 hex characters");
  std::uint64_t v = 0;
  for (char ch : hex) {
    int d;
    if (ch >= '0' && ch <= '9') {
      d = ch - '0';
    } else if (ch >= 'a' && ch <= 'f') {
      d = ch - 'a' + 10;
    } else if (ch >= 'A' && ch <= 'F') {
      d = ch - 'A' + 10;
    } else {
      fail(ErrorKind::InvalidArgument, "key contains a non-hex character");
    }
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return MasterKey{v};
}

std::string MasterKey::to_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(seed));
  return buf;
}

StepSet StepSet::parse(std::string_view text) {
  unsigned bits = 0;
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view tok = trim(text.substr(0, comma));
    if (tok == "s" || tok == "scramble") {
      bits |= kScramble;
    } else if (tok == "r" || tok == "rotate") {
      bits |= kRotateFlip;
    } else if (tok == "n" || tok == "negpos") {
      bits |= kNegPos;
    } else if (tok == "c" || tok == "color") {
      bits |= kColorShuffle;
    } else {
      fail(ErrorKind::InvalidArgument, "unknown step '" + std::string(tok) + "' (expected s, r, n or c)");
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return StepSet(bits);
}

std::string StepSet::to_string() const {
  std::string out;
  const std::pair<Step, char> names[] = {{kScramble, 's'}, {kRotateFlip, 'r'}, {kNegPos, 'n'}, {kColorShuffle, 'c'}};
  for (auto [step, name] : names) {
    if (!has(step)) continue;
    if (!out.empty()) out += ',';
    out += name;
  }
  return out;
}

std::string_view scheme_name(Scheme s) { return s == Scheme::Color ? "color" : "gray"; }

Scheme parse_scheme(std::string_view text) {
  text = trim(text);
  if (text == "color") return Scheme::Color;
  if (text == "gray" || text == "grayscale" || text == "grayscale_based") return Scheme::GrayscaleBased;
  fail(ErrorKind::InvalidArgument, "unknown scheme '" + std::string(text) + "' (expected color or gray)");
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::pair<std::uint64_t, std::uint64_t> splitmix_next(std::uint64_t state) noexcept {
  state += kGamma;
  return {state, mix64(state)};
}

std::uint64_t derive_step_seed(MasterKey key, std::uint32_t step_tag) noexcept {
  return mix64(key.seed ^ ((static_cast<std::uint64_t>(step_tag) + 1) * kGamma));
}

std::uint64_t StepStream::next() noexcept {
  auto [state, out] = splitmix_next(state_);
  state_ = state;
  return out;
}

std::uint64_t StepStream::uniform_below(std::uint64_t n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "uniform_below: n must be positive");
  return next() % n;
}

std::vector<std::uint32_t> gen_permutation(std::uint64_t seed, std::size_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  StepStream stream(seed);
  for (std::size_t i = n; i-- > 1;) {
    const auto j = static_cast<std::size_t>(stream.uniform_below(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::vector<std::uint32_t> gen_symbols(std::uint64_t seed, std::size_t n, std::uint32_t alphabet) {
  if (alphabet == 0) fail(ErrorKind::InvalidArgument, "gen_symbols: alphabet must be non-empty");
  std::vector<std::uint32_t> out(n);
  StepStream stream(seed);
  for (auto& s : out) s = static_cast<std::uint32_t>(stream.uniform_below(alphabet));
  return out;
}

double keyspace_bits(std::size_t n_blocks, StepSet steps, Scheme scheme) {
  if (n_blocks < 1) fail(ErrorKind::InvalidArgument, "keyspace_bits: need at least one block");
  if (steps.has(kColorShuffle) && scheme != Scheme::Color) {
    fail(ErrorKind::InvalidArgument, "color shuffling is not available in the grayscale-based scheme");
  }
  const double n = static_cast<double>(n_blocks);
  double bits = 0.0;
  if (steps.has(kScramble)) bits += std::lgamma(n + 1.0) / std::numbers::ln2;
  if (steps.has(kRotateFlip)) bits += 3.0 * n;
  if (steps.has(kNegPos)) bits += n;
  if (steps.has(kColorShuffle)) bits += n * std::log2(6.0);
  return bits;
}

}  // namespace etcimg
