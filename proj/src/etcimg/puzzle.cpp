#include "etcimg/puzzle.hpp"

#include <algorithm>
#include <numeric>
#include <string_view>
#include <unordered_map>

#include "etcimg/error.hpp"

namespace etcimg {

namespace {

void check_pair(const Image& a, const Image& b) {
  if (!a.same_shape(b) || a.width() != a.height()) {
    fail(ErrorKind::InvalidArgument, "pieces must be square and the same size");
  }
}

// Oriented piece edges, stored as flat sample runs.
struct Edges {
  std::vector<std::uint8_t> top, bottom, left, right;
};

Edges edges_of(const Image& img) {
  const int n = img.width();
  const int ch = img.channels();
  Edges e;
  e.top.assign(img.pixel(0, 0), img.pixel(0, 0) + static_cast<std::size_t>(n) * ch);
  e.bottom.assign(img.pixel(0, n - 1), img.pixel(0, n - 1) + static_cast<std::size_t>(n) * ch);
  e.left.reserve(static_cast<std::size_t>(n) * ch);
  e.right.reserve(static_cast<std::size_t>(n) * ch);
  for (int y = 0; y < n; ++y) {
    e.left.insert(e.left.end(), img.pixel(0, y), img.pixel(0, y) + ch);
    e.right.insert(e.right.end(), img.pixel(n - 1, y), img.pixel(n - 1, y) + ch);
  }
  return e;
}

std::uint64_t ssd(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    sum += static_cast<std::uint64_t>(d * d);
  }
  return sum;
}

// Pairwise compatibility over (piece, orientation) variants. The full table
// is built when it fits; otherwise costs are computed from cached edges.
class Compatibility {
 public:
  Compatibility(const std::vector<Image>& pieces, int orientations) : orientations_(orientations) {
    for (const auto& p : pieces) {
      for (int o = 0; o < orientations; ++o) edges_.push_back(edges_of(apply_orientation(p, Orientation(o))));
    }
    const std::size_t v = edges_.size();
    if (v * v <= kMaxTableEntries) {
      right_.resize(v * v);
      below_.resize(v * v);
      for (std::size_t a = 0; a < v; ++a) {
        for (std::size_t b = 0; b < v; ++b) {
          right_[a * v + b] = ssd(edges_[a].right, edges_[b].left);
          below_[a * v + b] = ssd(edges_[a].bottom, edges_[b].top);
        }
      }
    }
  }

  std::size_t variants() const { return edges_.size(); }
  int orientations() const { return orientations_; }

  // b placed to the right of / below a.
  std::uint64_t cost(std::size_t a, std::size_t b, Relation rel) const {
    if (!right_.empty()) return rel == Relation::RightOf ? right_[a * edges_.size() + b] : below_[a * edges_.size() + b];
    return rel == Relation::RightOf ? ssd(edges_[a].right, edges_[b].left) : ssd(edges_[a].bottom, edges_[b].top);
  }

 private:
  static constexpr std::size_t kMaxTableEntries = std::size_t{1} << 22;
  int orientations_;
  std::vector<Edges> edges_;
  std::vector<std::uint64_t> right_;
  std::vector<std::uint64_t> below_;
};

// cost_a / k_a < cost_b / k_b without division.
bool mean_less(std::uint64_t cost_a, int k_a, std::uint64_t cost_b, int k_b) {
  return cost_a * static_cast<std::uint64_t>(k_b) < cost_b * static_cast<std::uint64_t>(k_a);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::size_t largest() const { return *std::max_element(size_.begin(), size_.end()); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

std::uint64_t boundary_ssd(const Image& a, const Image& b, Relation rel) {
  check_pair(a, b);
  const Edges ea = edges_of(a);
  const Edges eb = edges_of(b);
  return rel == Relation::RightOf ? ssd(ea.right, eb.left) : ssd(ea.bottom, eb.top);
}

double boundary_dissimilarity(const Image& a, const Image& b, Relation rel) {
  return static_cast<double>(boundary_ssd(a, b, rel)) / static_cast<double>(a.width());
}

Puzzle make_puzzle(const Image& cipher, int block_size) {
  Blocks split = split_blocks(cipher, block_size);
  return Puzzle{std::move(split.blocks), split.grid, std::nullopt};
}

std::vector<Placement> ground_truth_from_key(MasterKey key, StepSet steps, std::size_t n_blocks) {
  const KeyMaterial km = derive_key_material(key, steps, n_blocks);
  std::vector<Placement> truth(n_blocks);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const std::size_t cell = km.permutation.empty() ? i : km.permutation[i];
    const Orientation o = km.orientations.empty() ? Orientation::identity() : km.orientations[i].inverse();
    truth[cell] = Placement{static_cast<std::uint32_t>(i), o};
  }
  return truth;
}

std::vector<Placement> ground_truth_by_matching(const Image& plain, const Image& cipher, int block_size) {
  if (!plain.same_shape(cipher)) fail(ErrorKind::Data, "plaintext and ciphertext layouts differ");
  const Blocks pb = split_blocks(plain, block_size);
  const Blocks cb = split_blocks(cipher, block_size);
  const unsigned color_orders = plain.channels() == 3 ? 6 : 1;

  struct Variant {
    std::uint32_t cell;
    Orientation orientation;
    bool negpos;
    unsigned color;
  };
  auto render = [&](const Variant& v) {
    Image b = apply_orientation(pb.blocks[v.cell], v.orientation);
    b = apply_negpos(b, v.negpos);
    return color_orders > 1 ? apply_color_shuffle(b, v.color) : b;
  };
  auto key_of = [](const Image& b) {
    const auto s = b.samples();
    return std::hash<std::string_view>{}(std::string_view(reinterpret_cast<const char*>(s.data()), s.size()));
  };

  // Cells are visited in order, so the first unused match is the lowest cell.
  std::unordered_multimap<std::size_t, Variant> index;
  for (std::uint32_t cell = 0; cell < pb.blocks.size(); ++cell) {
    for (unsigned o = 0; o < 8; ++o) {
      for (int neg = 0; neg < 2; ++neg) {
        for (unsigned c = 0; c < color_orders; ++c) {
          const Variant v{cell, Orientation(o), neg != 0, c};
          index.emplace(key_of(render(v)), v);
        }
      }
    }
  }

  std::vector<Placement> truth(pb.blocks.size());
  std::vector<bool> used(pb.blocks.size(), false);
  for (std::uint32_t i = 0; i < cb.blocks.size(); ++i) {
    const auto [first, last] = index.equal_range(key_of(cb.blocks[i]));
    std::optional<Variant> best;
    for (auto it = first; it != last; ++it) {
      const Variant& v = it->second;
      if (used[v.cell]) continue;
      if (best && (best->cell < v.cell ||
                   (best->cell == v.cell && best->orientation.code() <= v.orientation.code()))) {
        continue;
      }
      if (render(v) == cb.blocks[i]) best = v;
    }
    if (!best) {
      fail(ErrorKind::Data, "ciphertext block " + std::to_string(i) +
                                " matches no plaintext block (lossy ciphertext? derive ground truth from the key)");
    }
    used[best->cell] = true;
    truth[best->cell] = Placement{i, best->orientation.inverse()};
  }
  return truth;
}

Assembly truth_assembly(const Puzzle& puzzle) {
  if (!puzzle.ground_truth) fail(ErrorKind::InvalidArgument, "puzzle has no ground truth");
  return Assembly{puzzle.grid.rows, puzzle.grid.cols, *puzzle.ground_truth};
}

Assembly greedy_assemble(const Puzzle& puzzle, bool orientation_search) {
  const std::size_t n = puzzle.pieces.size();
  const int rows = puzzle.grid.rows;
  const int cols = puzzle.grid.cols;
  if (n == 0) fail(ErrorKind::InvalidArgument, "puzzle has no pieces");
  if (n != static_cast<std::size_t>(rows) * cols) fail(ErrorKind::InvalidArgument, "piece count does not match grid");
  if (n == 1) return Assembly{1, 1, {Placement{0, Orientation::identity()}}};

  const int orients = orientation_search ? 8 : 1;
  const Compatibility compat(puzzle.pieces, orients);
  const std::size_t variants = compat.variants();

  // Virtual canvas large enough for any rows x cols window around the seed.
  const int cr = 2 * rows - 1;
  const int cc = 2 * cols - 1;
  constexpr std::size_t kEmpty = static_cast<std::size_t>(-1);
  std::vector<std::size_t> canvas(static_cast<std::size_t>(cr) * cc, kEmpty);
  std::vector<bool> placed(n, false);
  int min_r = rows - 1, max_r = rows - 1, min_c = cols - 1, max_c = cols - 1;

  auto put = [&](int r, int c, std::size_t variant) {
    canvas[static_cast<std::size_t>(r) * cc + c] = variant;
    placed[variant / orients] = true;
    min_r = std::min(min_r, r);
    max_r = std::max(max_r, r);
    min_c = std::min(min_c, c);
    max_c = std::max(max_c, c);
  };

  // Seed: lowest-cost ordered pair, ties by (piece a, piece b, relation, orientation a, orientation b).
  {
    std::uint64_t best = UINT64_MAX;
    std::size_t best_a = 0, best_b = 0;
    Relation best_rel = Relation::RightOf;
    for (std::size_t pa = 0; pa < n; ++pa) {
      for (std::size_t pb = 0; pb < n; ++pb) {
        if (pa == pb) continue;
        for (Relation rel : {Relation::RightOf, Relation::Below}) {
          if ((rel == Relation::RightOf && cols < 2) || (rel == Relation::Below && rows < 2)) continue;
          for (int oa = 0; oa < orients; ++oa) {
            for (int ob = 0; ob < orients; ++ob) {
              const std::size_t va = pa * orients + oa;
              const std::size_t vb = pb * orients + ob;
              const std::uint64_t cost = compat.cost(va, vb, rel);
              if (cost < best) {
                best = cost;
                best_a = va;
                best_b = vb;
                best_rel = rel;
              }
            }
          }
        }
      }
    }
    put(rows - 1, cols - 1, best_a);
    if (best_rel == Relation::RightOf) {
      put(rows - 1, cols, best_b);
    } else {
      put(rows, cols - 1, best_b);
    }
  }

  for (std::size_t step = 2; step < n; ++step) {
    std::uint64_t best_cost = 0;
    int best_k = 0;
    std::size_t best_variant = 0;
    int best_cell = -1;

    for (int r = 0; r < cr; ++r) {
      for (int c = 0; c < cc; ++c) {
        if (canvas[static_cast<std::size_t>(r) * cc + c] != kEmpty) continue;
        if (std::max(max_r, r) - std::min(min_r, r) >= rows || std::max(max_c, c) - std::min(min_c, c) >= cols) continue;

        std::size_t up = kEmpty, down = kEmpty, left = kEmpty, right = kEmpty;
        if (r > 0) up = canvas[static_cast<std::size_t>(r - 1) * cc + c];
        if (r + 1 < cr) down = canvas[static_cast<std::size_t>(r + 1) * cc + c];
        if (c > 0) left = canvas[static_cast<std::size_t>(r) * cc + c - 1];
        if (c + 1 < cc) right = canvas[static_cast<std::size_t>(r) * cc + c + 1];
        const int k = (up != kEmpty) + (down != kEmpty) + (left != kEmpty) + (right != kEmpty);
        if (k == 0) continue;
        const int cell = r * cc + c;

        for (std::size_t v = 0; v < variants; ++v) {
          if (placed[v / orients]) continue;
          std::uint64_t cost = 0;
          if (up != kEmpty) cost += compat.cost(up, v, Relation::Below);
          if (down != kEmpty) cost += compat.cost(v, down, Relation::Below);
          if (left != kEmpty) cost += compat.cost(left, v, Relation::RightOf);
          if (right != kEmpty) cost += compat.cost(v, right, Relation::RightOf);

          bool better = best_cell < 0 || mean_less(cost, k, best_cost, best_k);
          if (!better && !mean_less(best_cost, best_k, cost, k)) {
            // Equal mean cost: lowest piece, then cell, then orientation.
            const auto piece = v / orients, best_piece = best_variant / orients;
            better = piece < best_piece || (piece == best_piece && (cell < best_cell ||
                                                                    (cell == best_cell && v < best_variant)));
          }
          if (better) {
            best_cost = cost;
            best_k = k;
            best_variant = v;
            best_cell = cell;
          }
        }
      }
    }
    put(best_cell / cc, best_cell % cc, best_variant);
  }

  Assembly out{rows, cols, std::vector<Placement>(n)};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t v = canvas[static_cast<std::size_t>(min_r + r) * cc + (min_c + c)];
      out.cells[static_cast<std::size_t>(r) * cols + c] =
          Placement{static_cast<std::uint32_t>(v / orients), Orientation(static_cast<unsigned>(v % orients))};
    }
  }
  return out;
}

Metrics score_assembly(const Assembly& assembly, const Puzzle& puzzle, const ScoreOptions& options) {
  if (!puzzle.ground_truth) fail(ErrorKind::InvalidArgument, "score_assembly: puzzle has no ground truth");
  const auto& truth = *puzzle.ground_truth;
  const int rows = puzzle.grid.rows;
  const int cols = puzzle.grid.cols;
  const std::size_t n = truth.size();
  if (assembly.rows != rows || assembly.cols != cols || assembly.cells.size() != n) {
    fail(ErrorKind::InvalidArgument, "assembly does not match the puzzle grid");
  }

  // Per piece: home cell and the orientation that restores it.
  std::vector<int> home(n, -1);
  std::vector<Orientation> restore(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto p = truth[t].piece;
    if (p >= n || home[p] >= 0) fail(ErrorKind::InvalidArgument, "ground truth is not a bijection");
    home[p] = static_cast<int>(t);
    restore[p] = truth[t].orientation;
  }
  // Transform between a displayed cell's content and that piece's true content.
  std::vector<Orientation> shown(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& pl = assembly.cells[c];
    if (pl.piece >= n) fail(ErrorKind::InvalidArgument, "assembly references an unknown piece");
    shown[c] = pl.orientation.after(restore[pl.piece].inverse());
  }

  Metrics m;

  // Dc: under a global rotation by k quarter turns, true cell (r, c) is displayed at pos_k(r, c).
  std::vector<int> turns{0};
  if (options.dc_global_rotation) turns = rows == cols ? std::vector<int>{0, 1, 2, 3} : std::vector<int>{0, 2};
  for (int k : turns) {
    std::size_t correct = 0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        int dr = r, dc = c;
        switch (k) {
          case 1: dr = cols - 1 - c; dc = r; break;
          case 2: dr = rows - 1 - r; dc = cols - 1 - c; break;
          case 3: dr = c; dc = rows - 1 - r; break;
          default: break;
        }
        const std::size_t d = static_cast<std::size_t>(dr) * cols + dc;
        const std::size_t t = static_cast<std::size_t>(r) * cols + c;
        if (assembly.cells[d].piece == truth[t].piece && shown[d] == Orientation::rotation(k)) ++correct;
      }
    }
    m.dc = std::max(m.dc, static_cast<double>(correct) / static_cast<double>(n));
  }

  // Nc / Lc: a displayed adjacency is correct when both cells show their true
  // content under the same transform and the true offset maps onto the displayed one.
  auto correct_pair = [&](std::size_t a, std::size_t b, int drow, int dcol) {
    if (shown[a] != shown[b]) return false;
    const int ha = home[assembly.cells[a].piece];
    const int hb = home[assembly.cells[b].piece];
    const auto off = shown[a].map_offset(hb / cols - ha / cols, hb % cols - ha % cols);
    return off[0] == drow && off[1] == dcol;
  };
  DisjointSets components(n);
  std::size_t good = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t a = static_cast<std::size_t>(r) * cols + c;
      if (c + 1 < cols && correct_pair(a, a + 1, 0, 1)) {
        ++good;
        components.unite(a, a + 1);
      }
      if (r + 1 < rows && correct_pair(a, a + cols, 1, 0)) {
        ++good;
        components.unite(a, a + cols);
      }
    }
  }
  const std::size_t pairs = static_cast<std::size_t>(rows) * (cols - 1) + static_cast<std::size_t>(cols) * (rows - 1);
  m.nc = pairs == 0 ? 1.0 : static_cast<double>(good) / static_cast<double>(pairs);
  m.lc = static_cast<double>(components.largest()) / static_cast<double>(n);
  return m;
}

Image render_assembly(const Assembly& assembly, const Puzzle& puzzle) {
  std::vector<Image> blocks;
  blocks.reserve(assembly.cells.size());
  for (const auto& pl : assembly.cells) {
    if (pl.piece >= puzzle.pieces.size()) fail(ErrorKind::InvalidArgument, "assembly references an unknown piece");
    blocks.push_back(apply_orientation(puzzle.pieces[pl.piece], pl.orientation));
  }
  const BlockGrid grid{puzzle.grid.block_size, assembly.rows, assembly.cols};
  return merge_blocks(blocks, grid, puzzle.pieces.front().channels());
}

BruteForceResult brute_force_scramble(const Image& plain, const Image& cipher, const CipherConfig& cfg) {
  if (cfg.steps != StepSet(kScramble)) fail(ErrorKind::InvalidArgument, "brute force supports scramble-only configs");
  const Image work = cfg.scheme == Scheme::GrayscaleBased ? stack_planes(plain) : plain;
  if (!work.same_shape(cipher)) fail(ErrorKind::Data, "plaintext and ciphertext shapes differ");
  const Blocks pb = split_blocks(work, cfg.block_size);
  const Blocks cb = split_blocks(cipher, cfg.block_size);
  const std::size_t n = pb.blocks.size();
  if (n > kBruteForceMaxBlocks) {
    fail(ErrorKind::InvalidArgument, "brute force limited to " + std::to_string(kBruteForceMaxBlocks) + " blocks");
  }

  BruteForceResult out;
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  do {
    ++out.permutations_checked;
    bool match = true;
    for (std::size_t i = 0; i < n && match; ++i) match = cb.blocks[i] == pb.blocks[perm[i]];
    if (match) out.candidates.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace etcimg
