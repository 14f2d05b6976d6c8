#include "etcimg/cipher.hpp"

#include <charconv>
#include <map>

#include "etcimg/error.hpp"

namespace etcimg {

namespace {

constexpr std::array<std::array<int, 3>, 6> kChannelOrders = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

int parse_int(std::string_view key, std::string_view v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    fail(ErrorKind::Data, "sidecar: bad integer for " + std::string(key));
  }
  return out;
}

void check_divisible(const Image& img, int block_size) {
  if (img.width() % block_size != 0 || img.height() % block_size != 0) {
    fail(ErrorKind::Data, "image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                              " is not divisible by block size " + std::to_string(block_size) +
                              " (pad the image first)");
  }
}

}  // namespace

CipherConfig CipherConfig::defaults(Scheme scheme) {
  if (scheme == Scheme::Color) return {Scheme::Color, 16, StepSet::all()};
  return {Scheme::GrayscaleBased, 8, StepSet::all().without(kColorShuffle)};
}

void CipherConfig::validate(int channels) const {
  if (block_size < 1) fail(ErrorKind::InvalidArgument, "block size must be >= 1");
  if (scheme == Scheme::Color && channels != 3) {
    fail(ErrorKind::InvalidArgument, "the color scheme needs a 3-channel image");
  }
  if (steps.has(kColorShuffle) && (scheme != Scheme::Color || channels != 3)) {
    fail(ErrorKind::InvalidArgument, "color shuffling needs the color scheme and a 3-channel image");
  }
}

Orientation Orientation::inverse() const {
  if (flipped()) return *this;
  return rotation(-quarter_turns());
}

Orientation Orientation::after(Orientation first) const {
  // this = F^fa R^ra, first = F^fb R^rb, and R^r F = F R^-r.
  const int ra = quarter_turns();
  const int rb = first.quarter_turns();
  if (!first.flipped()) return Orientation(rotation(ra + rb).code() | (flipped() ? 4u : 0u));
  return Orientation(rotation(rb - ra).code() | (flipped() ? 0u : 4u));
}

std::array<int, 2> Orientation::map_offset(int drow, int dcol) const {
  for (int i = 0; i < quarter_turns(); ++i) {
    const int r = -dcol;
    dcol = drow;
    drow = r;
  }
  if (flipped()) dcol = -dcol;
  return {drow, dcol};
}

std::vector<std::uint32_t> invert_permutation(std::span<const std::uint32_t> perm) {
  std::vector<std::uint32_t> inv(perm.size(), 0);
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size() || seen[perm[i]]) fail(ErrorKind::InvalidArgument, "not a permutation");
    seen[perm[i]] = true;
    inv[perm[i]] = static_cast<std::uint32_t>(i);
  }
  return inv;
}

std::vector<Image> apply_scramble(std::span<const Image> blocks, std::span<const std::uint32_t> perm) {
  if (blocks.size() != perm.size()) fail(ErrorKind::InvalidArgument, "permutation length does not match block count");
  std::vector<Image> out;
  out.reserve(blocks.size());
  for (std::uint32_t src : perm) {
    if (src >= blocks.size()) fail(ErrorKind::InvalidArgument, "permutation index out of range");
    out.push_back(blocks[src]);
  }
  return out;
}

std::vector<Image> undo_scramble(std::span<const Image> blocks, std::span<const std::uint32_t> perm) {
  const auto inv = invert_permutation(perm);
  return apply_scramble(blocks, inv);
}

Image apply_orientation(const Image& block, Orientation o) {
  if (block.width() != block.height()) fail(ErrorKind::InvalidArgument, "orientation needs a square block");
  if (o == Orientation::identity()) return block;
  const int n = block.width();
  const int ch = block.channels();
  Image out(n, n, ch);
  for (int i = 0; i < n; ++i) {
    for (int j0 = 0; j0 < n; ++j0) {
      const int j = o.flipped() ? n - 1 - j0 : j0;
      int si = i;
      int sj = j;
      switch (o.quarter_turns()) {
        case 1: si = j; sj = n - 1 - i; break;
        case 2: si = n - 1 - i; sj = n - 1 - j; break;
        case 3: si = n - 1 - j; sj = i; break;
        default: break;
      }
      for (int c = 0; c < ch; ++c) out.at(j0, i, c) = block.at(sj, si, c);
    }
  }
  return out;
}

Image apply_negpos(const Image& block, bool invert) {
  if (!invert) return block;
  Image out = block;
  for (auto& s : out.samples()) s = static_cast<std::uint8_t>(255 - s);
  return out;
}

Image apply_color_shuffle(const Image& block, unsigned order) {
  if (block.channels() != 3) fail(ErrorKind::InvalidArgument, "color shuffling needs a 3-channel block");
  if (order >= kChannelOrders.size()) fail(ErrorKind::InvalidArgument, "color order index must be in [0, 6)");
  if (order == 0) return block;
  const auto& src = kChannelOrders[order];
  Image out(block.width(), block.height(), 3);
  auto in = block.samples();
  auto dst = out.samples();
  for (std::size_t p = 0; p < in.size(); p += 3) {
    dst[p] = in[p + src[0]];
    dst[p + 1] = in[p + src[1]];
    dst[p + 2] = in[p + src[2]];
  }
  return out;
}

unsigned inverse_color_shuffle(unsigned order) {
  if (order >= kChannelOrders.size()) fail(ErrorKind::InvalidArgument, "color order index must be in [0, 6)");
  std::array<int, 3> inv{};
  for (int k = 0; k < 3; ++k) inv[kChannelOrders[order][k]] = k;
  for (unsigned i = 0; i < kChannelOrders.size(); ++i) {
    if (kChannelOrders[i] == inv) return i;
  }
  return 0;  // unreachable: the six orders form a group
}

std::string CipherSidecar::serialize() const {
  std::string out;
  auto line = [&out](std::string_view k, const std::string& v) {
    out.append(k).append("=").append(v).append("\n");
  };
  line("version", std::to_string(version));
  line("scheme", std::string(scheme_name(scheme)));
  line("block_size", std::to_string(block_size));
  line("steps", steps.to_string());
  line("orig_w", std::to_string(orig_width));
  line("orig_h", std::to_string(orig_height));
  line("channels", std::to_string(channels));
  line("pad_r", std::to_string(pad_right));
  line("pad_b", std::to_string(pad_bottom));
  return out;
}

CipherSidecar CipherSidecar::parse(std::string_view text) {
  std::map<std::string, std::string, std::less<>> fields;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Data, "sidecar: expected key=value, got '" + std::string(line) + "'");
    fields[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  auto get = [&fields](std::string_view k) -> const std::string& {
    auto it = fields.find(k);
    if (it == fields.end()) fail(ErrorKind::Data, "sidecar: missing field " + std::string(k));
    return it->second;
  };

  CipherSidecar sc;
  sc.version = parse_int("version", get("version"));
  if (sc.version != kFormatVersion) fail(ErrorKind::Data, "sidecar: unsupported version " + std::to_string(sc.version));
  try {
    sc.scheme = parse_scheme(get("scheme"));
    sc.steps = StepSet::parse(get("steps"));
  } catch (const Error& e) {
    fail(ErrorKind::Data, std::string("sidecar: ") + e.what());
  }
  sc.block_size = parse_int("block_size", get("block_size"));
  sc.orig_width = parse_int("orig_w", get("orig_w"));
  sc.orig_height = parse_int("orig_h", get("orig_h"));
  sc.pad_right = parse_int("pad_r", get("pad_r"));
  sc.pad_bottom = parse_int("pad_b", get("pad_b"));
  if (fields.contains("channels")) sc.channels = parse_int("channels", get("channels"));
  if (sc.block_size < 1 || sc.orig_width < 1 || sc.orig_height < 1 || sc.pad_right < 0 || sc.pad_bottom < 0 ||
      (sc.channels != 1 && sc.channels != 3)) {
    fail(ErrorKind::Data, "sidecar: field out of range");
  }
  return sc;
}

KeyMaterial derive_key_material(MasterKey key, StepSet steps, std::size_t n_blocks) {
  KeyMaterial km;
  if (steps.has(kScramble)) km.permutation = gen_permutation(derive_step_seed(key, kTagScramble), n_blocks);
  if (steps.has(kRotateFlip)) {
    for (auto code : gen_symbols(derive_step_seed(key, kTagRotateFlip), n_blocks, 8)) {
      km.orientations.emplace_back(code);
    }
  }
  if (steps.has(kNegPos)) {
    for (auto bit : gen_symbols(derive_step_seed(key, kTagNegPos), n_blocks, 2)) {
      km.negpos.push_back(static_cast<std::uint8_t>(bit));
    }
  }
  if (steps.has(kColorShuffle)) {
    for (auto order : gen_symbols(derive_step_seed(key, kTagColorShuffle), n_blocks, 6)) {
      km.color_orders.push_back(static_cast<std::uint8_t>(order));
    }
  }
  return km;
}

Image stack_planes(const Image& img) {
  if (img.channels() == 1) return img;
  const int w = img.width();
  const int h = img.height();
  Image out(w, 3 * h, 1);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.at(x, c * h + y, 0) = img.at(x, y, c);
    }
  }
  return out;
}

Image unstack_planes(const Image& stacked, int channels) {
  if (stacked.channels() != 1) fail(ErrorKind::InvalidArgument, "stacked image must be single-channel");
  if (channels == 1) return stacked;
  if (channels != 3 || stacked.height() % 3 != 0) fail(ErrorKind::InvalidArgument, "stacked height must be 3*H");
  const int w = stacked.width();
  const int h = stacked.height() / 3;
  Image out(w, h, 3);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.at(x, y, c) = stacked.at(x, c * h + y, 0);
    }
  }
  return out;
}

Encrypted encrypt(const Image& img, MasterKey key, const CipherConfig& cfg) {
  if (img.empty()) fail(ErrorKind::InvalidArgument, "cannot encrypt an empty image");
  cfg.validate(img.channels());
  check_divisible(img, cfg.block_size);

  const Image work = cfg.scheme == Scheme::GrayscaleBased ? stack_planes(img) : img;
  Blocks split = split_blocks(work, cfg.block_size);
  const KeyMaterial km = derive_key_material(key, cfg.steps, split.blocks.size());

  std::vector<Image> blocks = km.permutation.empty() ? std::move(split.blocks)
                                                     : apply_scramble(split.blocks, km.permutation);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!km.orientations.empty()) blocks[i] = apply_orientation(blocks[i], km.orientations[i]);
    if (!km.negpos.empty()) blocks[i] = apply_negpos(blocks[i], km.negpos[i] != 0);
    if (!km.color_orders.empty()) blocks[i] = apply_color_shuffle(blocks[i], km.color_orders[i]);
  }

  CipherSidecar sc;
  sc.scheme = cfg.scheme;
  sc.block_size = cfg.block_size;
  sc.steps = cfg.steps;
  sc.orig_width = img.width();
  sc.orig_height = img.height();
  sc.channels = img.channels();
  return {merge_blocks(blocks, split.grid, work.channels()), sc};
}

Encrypted encrypt_padded(const Image& img, MasterKey key, const CipherConfig& cfg) {
  if (cfg.block_size < 1) fail(ErrorKind::InvalidArgument, "block size must be >= 1");
  Padded padded = pad_edges(img, cfg.block_size);
  Encrypted out = encrypt(padded.image, key, cfg);
  out.sidecar.orig_width = img.width();
  out.sidecar.orig_height = img.height();
  out.sidecar.pad_right = padded.pad_right;
  out.sidecar.pad_bottom = padded.pad_bottom;
  return out;
}

Image decrypt(const Image& cipher, MasterKey key, const CipherSidecar& sidecar) {
  if (sidecar.version != CipherSidecar::kFormatVersion) fail(ErrorKind::Data, "unsupported sidecar version");
  const CipherConfig cfg = sidecar.config();
  cfg.validate(sidecar.channels);

  const int w = sidecar.orig_width + sidecar.pad_right;
  const int h = sidecar.orig_height + sidecar.pad_bottom;
  const bool gray = cfg.scheme == Scheme::GrayscaleBased;
  const int expect_h = gray ? h * sidecar.channels : h;
  const int expect_ch = gray ? 1 : sidecar.channels;
  if (cipher.width() != w || cipher.height() != expect_h || cipher.channels() != expect_ch) {
    fail(ErrorKind::Data, "ciphertext is " + std::to_string(cipher.width()) + "x" + std::to_string(cipher.height()) +
                              "x" + std::to_string(cipher.channels()) + " but the sidecar expects " +
                              std::to_string(w) + "x" + std::to_string(expect_h) + "x" + std::to_string(expect_ch));
  }
  if (w % cfg.block_size != 0 || h % cfg.block_size != 0) fail(ErrorKind::Data, "sidecar geometry is not block aligned");

  Blocks split = split_blocks(cipher, cfg.block_size);
  const KeyMaterial km = derive_key_material(key, cfg.steps, split.blocks.size());
  std::vector<Image>& blocks = split.blocks;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!km.color_orders.empty()) blocks[i] = apply_color_shuffle(blocks[i], inverse_color_shuffle(km.color_orders[i]));
    if (!km.negpos.empty()) blocks[i] = apply_negpos(blocks[i], km.negpos[i] != 0);
    if (!km.orientations.empty()) blocks[i] = apply_orientation(blocks[i], km.orientations[i].inverse());
  }
  if (!km.permutation.empty()) blocks = undo_scramble(blocks, km.permutation);

  Image plain = merge_blocks(blocks, split.grid, cipher.channels());
  if (gray) plain = unstack_planes(plain, sidecar.channels);
  return crop(plain, sidecar.orig_width, sidecar.orig_height);
}

}  // namespace etcimg
