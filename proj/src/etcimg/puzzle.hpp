#pragma once

// Ciphertext-only attack harness: treats the blocks of an encrypted image as
// jigsaw pieces, reassembles them greedily and scores the result with the
// direct (Dc), neighbor (Nc) and largest-component (Lc) measures.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "etcimg/cipher.hpp"
#include "etcimg/image.hpp"

namespace etcimg {

/// Position of piece b relative to piece a.
enum class Relation { RightOf, Below };

/// Mean squared difference across the shared border, summed over channels
/// and divided by the number of border pixels.
double boundary_dissimilarity(const Image& a, const Image& b, Relation rel);

/// Integer numerator of boundary_dissimilarity.
std::uint64_t boundary_ssd(const Image& a, const Image& b, Relation rel);

struct Placement {
  std::uint32_t piece = 0;
  Orientation orientation;  // applied to the piece before display

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Puzzle {
  std::vector<Image> pieces;
  BlockGrid grid;
  /// cells[t] = the piece belonging at cell t and the orientation that restores it.
  std::optional<std::vector<Placement>> ground_truth;
};

struct Assembly {
  int rows = 0;
  int cols = 0;
  std::vector<Placement> cells;  // row-major

  friend bool operator==(const Assembly&, const Assembly&) = default;
};

struct Metrics {
  double dc = 0.0;
  double nc = 0.0;
  double lc = 0.0;
};

struct ScoreOptions {
  /// Count an assembly that is correct up to a global rotation as correct for Dc.
  bool dc_global_rotation = true;
};

/// Pieces are the ciphertext's blocks in raster order.
Puzzle make_puzzle(const Image& cipher, int block_size);

/// Ground truth recorded from the key, valid even after lossy recompression.
/// For the grayscale-based scheme the puzzle is the stacked ciphertext.
std::vector<Placement> ground_truth_from_key(MasterKey key, StepSet steps, std::size_t n_blocks);

/// Ground truth recovered by exact block matching against the plaintext (in
/// the ciphertext's layout, i.e. plane-stacked for the grayscale-based
/// scheme). Every block variant reachable by the four steps is tried.
/// Throws a Data error if some ciphertext block matches nothing.
std::vector<Placement> ground_truth_by_matching(const Image& plain, const Image& cipher, int block_size);

/// The assembly a perfect solver would produce.
Assembly truth_assembly(const Puzzle& puzzle);

/// Greedy best-first placement. Seeds with the lowest-dissimilarity pair, then
/// repeatedly places the (piece, cell, orientation) with the lowest mean
/// dissimilarity to its already-placed neighbors, keeping the placed region
/// within the grid's dimensions. Ties go to the lowest (piece, cell, orientation).
Assembly greedy_assemble(const Puzzle& puzzle, bool orientation_search);

Metrics score_assembly(const Assembly& assembly, const Puzzle& puzzle, const ScoreOptions& options = {});

Image render_assembly(const Assembly& assembly, const Puzzle& puzzle);

struct BruteForceResult {
  std::vector<std::vector<std::uint32_t>> candidates;  // in gen_permutation convention
  std::uint64_t permutations_checked = 0;
};

inline constexpr std::size_t kBruteForceMaxBlocks = 10;

/// Known-plaintext exhaustive search over block permutations (scramble-only configs).
BruteForceResult brute_force_scramble(const Image& plain, const Image& cipher, const CipherConfig& cfg);

}  // namespace etcimg
