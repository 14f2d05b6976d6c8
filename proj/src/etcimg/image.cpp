#include "etcimg/image.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "etcimg/error.hpp"

namespace etcimg {

namespace {

void check_shape(int width, int height, int channels) {
  if (width <= 0 || height <= 0) {
    fail(ErrorKind::InvalidArgument,
         "image dimensions must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    fail(ErrorKind::InvalidArgument, "image must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads a decimal field.
  long field(const char* name) {
    skip_space();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) fail(ErrorKind::Data, std::string("PPM ") + name + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail(ErrorKind::Data, std::string("malformed PPM header: missing ") + name);
    return value;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) fail(ErrorKind::Data, "malformed PPM header after maxval");
    ++pos_;
  }

  std::size_t pos() const noexcept { return pos_; }

 private:
  static bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

Image::Image(int width, int height, int channels) : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_shape(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    fail(ErrorKind::InvalidArgument, "sample buffer length does not match image shape");
  }
}

BlockGrid BlockGrid::for_image(const Image& img, int block_size) {
  if (block_size < 1) fail(ErrorKind::InvalidArgument, "block size must be >= 1");
  if (img.width() % block_size != 0 || img.height() % block_size != 0) {
    fail(ErrorKind::Data, "image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                         " is not divisible by block size " + std::to_string(block_size));
  }
  return BlockGrid{block_size, img.height() / block_size, img.width() / block_size};
}

Image load_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    fail(ErrorKind::Data, "not a binary PPM/PGM (expected P5 or P6 magic)");
  }
  const int channels = bytes[1] == '6' ? 3 : 1;
  HeaderReader header(bytes);
  const long width = header.field("width");
  const long height = header.field("height");
  const long maxval = header.field("maxval");
  if (maxval != 255) fail(ErrorKind::Data, "unsupported PPM maxval " + std::to_string(maxval) + " (only 255)");
  if (width <= 0 || height <= 0) fail(ErrorKind::Data, "PPM dimensions must be positive");
  header.single_whitespace();

  const std::size_t payload = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - header.pos() < payload) fail(ErrorKind::Data, "truncated PPM payload");
  auto first = bytes.begin() + static_cast<std::ptrdiff_t>(header.pos());
  return Image(static_cast<int>(width), static_cast<int>(height), channels,
               std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(payload)));
}

std::vector<std::uint8_t> save_ppm(const Image& img) {
  if (img.empty()) fail(ErrorKind::InvalidArgument, "cannot save an empty image");
  const std::string header = std::string(img.channels() == 3 ? "P6" : "P5") + "\n" + std::to_string(img.width()) +
                             " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.samples().begin(), img.samples().end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

Image read_ppm_file(const std::string& path) { return load_ppm(read_file(path)); }

void write_ppm_file(const std::string& path, const Image& img) { write_file(path, save_ppm(img)); }

Blocks split_blocks(const Image& img, int block_size) {
  const BlockGrid grid = BlockGrid::for_image(img, block_size);
  const int ch = img.channels();
  const std::size_t row_bytes = static_cast<std::size_t>(block_size) * ch;
  Blocks out{{}, grid};
  out.blocks.reserve(static_cast<std::size_t>(grid.count()));
  for (int br = 0; br < grid.rows; ++br) {
    for (int bc = 0; bc < grid.cols; ++bc) {
      Image block(block_size, block_size, ch);
      for (int y = 0; y < block_size; ++y) {
        const std::uint8_t* src = img.pixel(bc * block_size, br * block_size + y);
        std::copy(src, src + row_bytes, block.pixel(0, y));
      }
      out.blocks.push_back(std::move(block));
    }
  }
  return out;
}

Image merge_blocks(std::span<const Image> blocks, const BlockGrid& grid, int channels) {
  if (grid.rows < 1 || grid.cols < 1 || grid.block_size < 1) fail(ErrorKind::InvalidArgument, "empty block grid");
  if (blocks.size() != static_cast<std::size_t>(grid.count())) {
    fail(ErrorKind::InvalidArgument, "block count " + std::to_string(blocks.size()) + " does not match grid " +
                                         std::to_string(grid.rows) + "x" + std::to_string(grid.cols));
  }
  const int b = grid.block_size;
  Image out(grid.cols * b, grid.rows * b, channels);
  const std::size_t row_bytes = static_cast<std::size_t>(b) * channels;
  for (int br = 0; br < grid.rows; ++br) {
    for (int bc = 0; bc < grid.cols; ++bc) {
      const Image& block = blocks[static_cast<std::size_t>(br) * grid.cols + bc];
      if (block.width() != b || block.height() != b || block.channels() != channels) {
        fail(ErrorKind::InvalidArgument, "block shape does not match grid");
      }
      for (int y = 0; y < b; ++y) {
        const std::uint8_t* src = block.pixel(0, y);
        std::copy(src, src + row_bytes, out.pixel(bc * b, br * b + y));
      }
    }
  }
  return out;
}

double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b)) fail(ErrorKind::InvalidArgument, "psnr: image shapes differ");
  const auto sa = a.samples();
  const auto sb = b.samples();
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const int d = static_cast<int>(sa[i]) - static_cast<int>(sb[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sse) / static_cast<double>(sa.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

bool is_psnr_infinite(double db) noexcept { return std::isinf(db) && db > 0; }

Padded pad_edges(const Image& img, int multiple) {
  if (multiple < 1) fail(ErrorKind::InvalidArgument, "padding multiple must be >= 1");
  const int pad_r = (multiple - img.width() % multiple) % multiple;
  const int pad_b = (multiple - img.height() % multiple) % multiple;
  if (pad_r == 0 && pad_b == 0) return {img, 0, 0};
  Image out(img.width() + pad_r, img.height() + pad_b, img.channels());
  for (int y = 0; y < out.height(); ++y) {
    const int sy = std::min(y, img.height() - 1);
    for (int x = 0; x < out.width(); ++x) {
      const int sx = std::min(x, img.width() - 1);
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return {std::move(out), pad_r, pad_b};
}

Image crop(const Image& img, int width, int height) {
  if (width < 1 || height < 1 || width > img.width() || height > img.height()) {
    fail(ErrorKind::InvalidArgument, "crop region outside image");
  }
  if (width == img.width() && height == img.height()) return img;
  Image out(width, height, img.channels());
  const std::size_t row_bytes = static_cast<std::size_t>(width) * img.channels();
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src = img.pixel(0, y);
    std::copy(src, src + row_bytes, out.pixel(0, y));
  }
  return out;
}

std::vector<double> luma(const Image& img) {
  std::vector<double> out(img.pixel_count());
  const auto s = img.samples();
  if (img.channels() == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s[i];
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = (299.0 * s[3 * i] + 587.0 * s[3 * i + 1] + 114.0 * s[3 * i + 2]) / 1000.0;
    }
  }
  return out;
}

}  // namespace etcimg
