#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "etcimg/error.hpp"
#include "etcimg/keyschedule.hpp"

using namespace etcimg;

// Golden vectors from tests/oracles/keyschedule_oracle.py.

TEST_CASE("splitmix64 golden vectors") {
  struct Case {
    std::uint64_t seed;
    std::array<std::uint64_t, 4> out;
  };
  const Case cases[] = {
      {0, {0xe220a8397b1dcdafull, 0x6e789e6aa1b965f4ull, 0x06c45d188009454full, 0xf88bb8a8724c81ecull}},
      {1, {0x910a2dec89025cc1ull, 0xbeeb8da1658eec67ull, 0xf893a2eefb32555eull, 0x71c18690ee42c90bull}},
      {~0ull, {0xe4d971771b652c20ull, 0xe99ff867dbf682c9ull, 0x382ff84cb27281e9ull, 0x6d1db36ccba982d2ull}},
  };
  for (const auto& c : cases) {
    StepStream s(c.seed);
    for (auto want : c.out) CHECK(s.next() == want);
  }
}

TEST_CASE("splitmix_next is pure") {
  const auto a = splitmix_next(12345);
  const auto b = splitmix_next(12345);
  CHECK(a == b);
  CHECK(a.first == 12345 + 0x9E3779B97F4A7C15ull);
}

TEST_CASE("derive_step_seed golden vectors") {
  const std::uint64_t key0[] = {0xe220a8397b1dcdafull, 0x6e789e6aa1b965f4ull, 0x06c45d188009454full,
                                0xf88bb8a8724c81ecull};
  const std::uint64_t key1[] = {0xe4d971771b652c20ull, 0xbeeb8da1658eec67ull, 0x382ff84cb27281e9ull,
                                0x71c18690ee42c90bull};
  for (std::uint32_t t = 0; t < 4; ++t) {
    CHECK(derive_step_seed(MasterKey{0}, t) == key0[t]);
    CHECK(derive_step_seed(MasterKey{1}, t) == key1[t]);
  }
  CHECK(derive_step_seed(MasterKey{0}, 0) != derive_step_seed(MasterKey{0}, 1));
  CHECK(derive_step_seed(MasterKey{77}, 3) == derive_step_seed(MasterKey{77}, 3));
}

TEST_CASE("derive_step_seed separates tags for random keys") {
  std::mt19937_64 rng(2024);
  int injective = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const MasterKey k{rng()};
    std::set<std::uint64_t> seeds;
    for (std::uint32_t t = 0; t < 4; ++t) seeds.insert(derive_step_seed(k, t));
    injective += seeds.size() == 4;
  }
  CHECK(injective >= trials * 999 / 1000);
}

TEST_CASE("uniform_below") {
  StepStream s(42);
  const std::uint64_t want[] = {1, 1, 0, 0};
  for (auto w : want) CHECK(s.uniform_below(6) == w);

  StepStream one(9);
  const auto before = one.state();
  CHECK(one.uniform_below(1) == 0);
  CHECK(one.state() != before);

  CHECK_THROWS_AS(one.uniform_below(0), Error);

  StepStream freq(123);
  std::array<int, 8> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[freq.uniform_below(8)];
  for (int c : counts) CHECK(std::abs(c / double(draws) - 0.125) < 0.02 * 0.125);
}

TEST_CASE("gen_permutation") {
  CHECK(gen_permutation(1, 0).empty());
  CHECK(gen_permutation(1, 1) == std::vector<std::uint32_t>{0});
  CHECK(gen_permutation(42, 4) == std::vector<std::uint32_t>{2, 0, 3, 1});
  CHECK(gen_permutation(0, 4) == std::vector<std::uint32_t>{2, 1, 0, 3});

  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = rng() % 257;
    auto p = gen_permutation(rng(), n);
    std::sort(p.begin(), p.end());
    std::vector<std::uint32_t> id(n);
    std::iota(id.begin(), id.end(), 0u);
    CHECK(p == id);
  }
}

TEST_CASE("gen_symbols") {
  CHECK(gen_symbols(5, 10, 1) == std::vector<std::uint32_t>(10, 0));
  CHECK(gen_symbols(42, 8, 8) == std::vector<std::uint32_t>{5, 3, 2, 4, 2, 6, 5, 4});
  const auto bits = gen_symbols(7, 100000, 2);
  const auto ones = std::count(bits.begin(), bits.end(), 1u);
  CHECK(std::abs(ones / 100000.0 - 0.5) < 0.01);
  CHECK_THROWS_AS(gen_symbols(1, 1, 0), Error);
}

TEST_CASE("keyspace_bits") {
  CHECK(keyspace_bits(1, StepSet(kScramble), Scheme::Color) == 0.0);
  CHECK(std::abs(keyspace_bits(4, StepSet(kScramble), Scheme::Color) - 4.584962500721156) < 1e-12);
  CHECK(std::abs(keyspace_bits(4, StepSet::all(), Scheme::Color) - 30.924812503605782) < 1e-9);
  CHECK(std::abs(keyspace_bits(16, StepSet(kScramble), Scheme::Color) - 44.25014046988262) < 1e-9);
  CHECK(std::abs(keyspace_bits(1024, StepSet::all(), Scheme::Color) - 15512.00774433972) < 1e-6);
  CHECK(keyspace_bits(10, StepSet::none(), Scheme::Color) == 0.0);
  CHECK(keyspace_bits(3, StepSet(kNegPos), Scheme::GrayscaleBased) == doctest::Approx(3.0));
  CHECK_THROWS_AS(keyspace_bits(4, StepSet::all(), Scheme::GrayscaleBased), Error);
}

TEST_CASE("MasterKey parse and format") {
  CHECK(MasterKey::parse("0123456789abcdef").seed == 0x0123456789abcdefull);
  CHECK(MasterKey::parse("  FFFFFFFFFFFFFFFF\n").seed == ~0ull);
  CHECK(MasterKey{0xabcull}.to_hex() == "0000000000000abc");
  CHECK_THROWS_AS(MasterKey::parse("123"), Error);
  CHECK_THROWS_AS(MasterKey::parse("0123456789abcdeg"), Error);
}

TEST_CASE("StepSet parse") {
  CHECK(StepSet::parse("") == StepSet::none());
  CHECK(StepSet::parse("s,r,n,c") == StepSet::all());
  CHECK(StepSet::parse("c,s") == StepSet(kScramble | kColorShuffle));
  CHECK(StepSet::parse("scramble,negpos").to_string() == "s,n");
  CHECK_THROWS_AS(StepSet::parse("x"), Error);
  CHECK(parse_scheme("gray") == Scheme::GrayscaleBased);
  CHECK(scheme_name(Scheme::Color) == "color");
}
