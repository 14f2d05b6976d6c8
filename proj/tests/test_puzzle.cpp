#include <doctest.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "etcimg/error.hpp"
#include "etcimg/puzzle.hpp"
#include "support.hpp"

using namespace etcimg;

namespace {

Image constant(int n, int ch, std::uint8_t v) {
  Image img(n, n, ch);
  for (auto& s : img.samples()) s = v;
  return img;
}

// Smooth content with distinct blocks: a 2D gradient plus a gentle ripple.
Image smooth_image(int w, int h) {
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = static_cast<std::uint8_t>(x * 255 / (w - 1));
      img.at(x, y, 1) = static_cast<std::uint8_t>(y * 255 / (h - 1));
      img.at(x, y, 2) = static_cast<std::uint8_t>(((x * 3 + y * 5) / 2) % 256);
    }
  return img;
}

Puzzle identity_puzzle(const Image& plain, int bs) {
  Puzzle p = make_puzzle(plain, bs);
  std::vector<Placement> truth;
  for (std::uint32_t i = 0; i < p.pieces.size(); ++i) truth.push_back({i, Orientation::identity()});
  p.ground_truth = truth;
  return p;
}

}  // namespace

TEST_CASE("boundary dissimilarity constants") {
  const Image a = constant(4, 1, 0);
  const Image b = constant(4, 1, 255);
  CHECK(boundary_dissimilarity(a, a, Relation::RightOf) == 0.0);
  CHECK(boundary_dissimilarity(a, b, Relation::RightOf) == 65025.0);
  CHECK(boundary_dissimilarity(a, b, Relation::Below) == 65025.0);
  CHECK(boundary_ssd(a, b, Relation::Below) == 4ull * 65025);
}

TEST_CASE("boundary dissimilarity uses the facing edges") {
  Image a(2, 2, 1, {0, 10, 20, 30});
  Image b(2, 2, 1, {10, 0, 30, 0});
  // b right of a: a's right column (10, 30) against b's left column (10, 30).
  CHECK(boundary_ssd(a, b, Relation::RightOf) == 0);
  // b below a: a's bottom row (20, 30) against b's top row (10, 0).
  CHECK(boundary_ssd(a, b, Relation::Below) == 100 + 900);
}

TEST_CASE("true neighbors are usually more similar on a gradient") {
  const Image img = smooth_image(128, 128);
  const Puzzle p = make_puzzle(img, 8);
  std::mt19937_64 rng(3);
  int wins = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const int r = static_cast<int>(rng() % 16);
    const int c = static_cast<int>(rng() % 15);
    const auto a = static_cast<std::size_t>(r * 16 + c);
    std::size_t other = rng() % 256;
    while (other == a || other == a + 1) other = rng() % 256;
    wins += boundary_dissimilarity(p.pieces[a], p.pieces[a + 1], Relation::RightOf) <
            boundary_dissimilarity(p.pieces[a], p.pieces[other], Relation::RightOf);
  }
  CHECK(wins >= trials * 9 / 10);
}

TEST_CASE("one-piece puzzle") {
  const Puzzle p = identity_puzzle(constant(8, 3, 9), 8);
  const Assembly a = greedy_assemble(p, false);
  CHECK(a.rows == 1);
  CHECK(a.cols == 1);
  CHECK(a.cells == std::vector<Placement>{{0, Orientation::identity()}});
  const Metrics m = score_assembly(a, p);
  CHECK(m.dc == 1.0);
  CHECK(m.nc == 1.0);
  CHECK(m.lc == 1.0);
}

TEST_CASE("two-piece gradient is solved") {
  Image img(16, 8, 1);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x) img.at(x, y, 0) = static_cast<std::uint8_t>(x * 16);
  Puzzle p = make_puzzle(img, 8);
  // Present the pieces swapped.
  std::swap(p.pieces[0], p.pieces[1]);
  p.ground_truth = std::vector<Placement>{{1, Orientation::identity()}, {0, Orientation::identity()}};
  const Assembly a = greedy_assemble(p, false);
  CHECK(a.cells[0].piece == 1);
  CHECK(a.cells[1].piece == 0);
  CHECK(score_assembly(a, p).nc == 1.0);
}

TEST_CASE("ground truth scores one and renders the plaintext") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = 1 + static_cast<int>(rng() % 4);
    const Image plain = testsupport::random_image(rng, cols * 4, rows * 4, 3);
    const MasterKey key{rng()};
    const CipherConfig cfg{Scheme::Color, 4, StepSet(static_cast<unsigned>(rng() % 16))};
    const Encrypted e = encrypt(plain, key, cfg);
    Puzzle p = make_puzzle(e.image, 4);
    p.ground_truth = ground_truth_from_key(key, cfg.steps, p.pieces.size());
    const Assembly truth = truth_assembly(p);
    const Metrics m = score_assembly(truth, p);
    CHECK(m.dc == 1.0);
    CHECK(m.nc == 1.0);
    CHECK(m.lc == 1.0);
    if (!cfg.steps.has(kNegPos) && !cfg.steps.has(kColorShuffle)) CHECK(render_assembly(truth, p) == plain);
  }
}

TEST_CASE("ground truth by matching agrees with the key") {
  std::mt19937_64 rng(5);
  const Image plain = testsupport::random_image(rng, 32, 24, 3);
  for (unsigned bits = 0; bits < 16; ++bits) {
    const MasterKey key{rng()};
    const CipherConfig cfg{Scheme::Color, 8, StepSet(bits)};
    const Encrypted e = encrypt(plain, key, cfg);
    const auto by_key = ground_truth_from_key(key, cfg.steps, 12);
    const auto by_match = ground_truth_by_matching(plain, e.image, 8);
    CHECK(by_key.size() == by_match.size());
    for (std::size_t i = 0; i < by_key.size(); ++i) CHECK(by_key[i].piece == by_match[i].piece);
  }
  CHECK_THROWS_AS(ground_truth_by_matching(plain, testsupport::random_image(rng, 32, 24, 3), 8), Error);
}

// Table from tests/oracles/puzzle_metrics_oracle.py.
TEST_CASE("2x2 metric table") {
  struct Row {
    std::array<std::uint32_t, 4> cells;
    double dc, nc, lc;
  };
  const Row table[] = {
      {{0, 1, 2, 3}, 1.0, 1.0, 1.0},  {{0, 1, 3, 2}, 0.5, 0.25, 0.5}, {{0, 2, 1, 3}, 0.5, 0.0, 0.25},
      {{0, 2, 3, 1}, 0.25, 0.0, 0.25}, {{0, 3, 1, 2}, 0.25, 0.0, 0.25}, {{0, 3, 2, 1}, 0.5, 0.25, 0.5},
      {{1, 0, 2, 3}, 0.5, 0.25, 0.5}, {{1, 0, 3, 2}, 0.0, 0.5, 0.5},  {{1, 2, 0, 3}, 0.25, 0.0, 0.25},
      {{1, 2, 3, 0}, 0.0, 0.25, 0.5}, {{1, 3, 0, 2}, 0.0, 0.0, 0.25}, {{1, 3, 2, 0}, 0.25, 0.0, 0.25},
      {{2, 0, 1, 3}, 0.25, 0.0, 0.25}, {{2, 0, 3, 1}, 0.0, 0.0, 0.25}, {{2, 1, 0, 3}, 0.5, 0.25, 0.5},
      {{2, 1, 3, 0}, 0.25, 0.0, 0.25}, {{2, 3, 0, 1}, 0.0, 0.5, 0.5},  {{2, 3, 1, 0}, 0.0, 0.25, 0.5},
      {{3, 0, 1, 2}, 0.0, 0.25, 0.5}, {{3, 0, 2, 1}, 0.25, 0.0, 0.25}, {{3, 1, 0, 2}, 0.25, 0.0, 0.25},
      {{3, 1, 2, 0}, 0.5, 0.0, 0.25}, {{3, 2, 0, 1}, 0.0, 0.25, 0.5}, {{3, 2, 1, 0}, 0.0, 0.0, 0.25},
  };
  std::mt19937_64 rng(6);
  const Puzzle p = identity_puzzle(testsupport::random_image(rng, 8, 8, 3), 4);
  for (const Row& row : table) {
    Assembly a{2, 2, {}};
    for (auto c : row.cells) a.cells.push_back({c, Orientation::identity()});
    const Metrics m = score_assembly(a, p);
    CHECK(m.dc == row.dc);
    CHECK(m.nc == row.nc);
    CHECK(m.lc == row.lc);
  }
}

TEST_CASE("global rotation counts for Dc") {
  std::mt19937_64 rng(7);
  const Image plain = testsupport::random_image(rng, 12, 12, 3);
  const Puzzle p = identity_puzzle(plain, 4);
  for (int k = 0; k < 4; ++k) {
    const Image turned = apply_orientation(plain, Orientation::rotation(k));
    // Cell t of `turned` shows piece cells[t].piece under cells[t].orientation.
    const Assembly a{3, 3, ground_truth_by_matching(turned, plain, 4)};
    const Metrics m = score_assembly(a, p);
    CHECK(m.dc == 1.0);
    CHECK(m.nc == 1.0);
    CHECK(m.lc == 1.0);
    const Metrics strict = score_assembly(a, p, ScoreOptions{false});
    CHECK(strict.dc == (k == 0 ? 1.0 : 0.0));
  }
}

TEST_CASE("random assemblies score low and Lc stays in range") {
  std::mt19937_64 rng(8);
  const Puzzle p = identity_puzzle(testsupport::random_image(rng, 32, 32, 3), 4);
  double nc_sum = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::uint32_t> perm(64);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    Assembly a{8, 8, {}};
    for (auto c : perm) a.cells.push_back({c, Orientation(static_cast<unsigned>(rng() % 8))});
    const Metrics m = score_assembly(a, p);
    nc_sum += m.nc;
    CHECK(m.lc >= 1.0 / 64);
    CHECK(m.lc <= 1.0);
  }
  CHECK(nc_sum / trials <= 0.1);
}

TEST_CASE("greedy solver with orientation search on smooth content") {
  const Image plain = smooth_image(64, 64);
  const MasterKey key{11};
  const CipherConfig cfg{Scheme::Color, 16, StepSet(kScramble | kRotateFlip)};
  const Encrypted e = encrypt(plain, key, cfg);
  Puzzle p = make_puzzle(e.image, 16);
  p.ground_truth = ground_truth_from_key(key, cfg.steps, p.pieces.size());
  const Metrics with = score_assembly(greedy_assemble(p, true), p);
  const Metrics without = score_assembly(greedy_assemble(p, false), p);
  CHECK(with.nc > without.nc);
  CHECK(with.nc >= 0.5);
}

TEST_CASE("greedy solver is deterministic") {
  std::mt19937_64 rng(9);
  const Image plain = smooth_image(48, 48);
  const Encrypted e = encrypt(plain, MasterKey{3}, CipherConfig{Scheme::Color, 8, StepSet(kScramble)});
  const Puzzle p = make_puzzle(e.image, 8);
  CHECK(greedy_assemble(p, false) == greedy_assemble(p, false));
}

TEST_CASE("brute force over scramble keys") {
  std::mt19937_64 rng(10);
  const CipherConfig cfg{Scheme::Color, 4, StepSet(kScramble)};

  const Image one = testsupport::random_image(rng, 4, 4, 3);
  const BruteForceResult r1 = brute_force_scramble(one, encrypt(one, MasterKey{1}, cfg).image, cfg);
  CHECK(r1.candidates == std::vector<std::vector<std::uint32_t>>{{0}});

  const Image four = testsupport::random_image(rng, 8, 8, 3);
  const MasterKey key{0xfeed};
  const BruteForceResult r4 = brute_force_scramble(four, encrypt(four, key, cfg).image, cfg);
  REQUIRE(r4.candidates.size() == 1);
  CHECK(r4.candidates[0] == gen_permutation(derive_step_seed(key, kTagScramble), 4));
  CHECK(r4.permutations_checked <= 24);

  const Image same(8, 8, 3);
  const BruteForceResult all = brute_force_scramble(same, same, cfg);
  CHECK(all.candidates.size() == 24);

  CHECK_THROWS_AS(brute_force_scramble(four, four, CipherConfig{Scheme::Color, 4, StepSet::all()}), Error);
  const Image big = testsupport::random_image(rng, 16, 12, 3);
  CHECK_THROWS_AS(brute_force_scramble(big, big, cfg), Error);
}
