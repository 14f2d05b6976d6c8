#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace etcimg {

/// 8-bit raster with 1 or 3 interleaved channels, stored row-major.
class Image {
 public:
  Image() = default;
  /// Zero-filled image. Throws InvalidArgument for non-positive sizes or bad channel count.
  Image(int width, int height, int channels);
  /// Takes ownership of `data`, which must hold exactly width*height*channels samples.
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }

  /// Pointer to the first sample of pixel (x, y).
  const std::uint8_t* pixel(int x, int y) const { return data_.data() + index(x, y, 0); }
  std::uint8_t* pixel(int x, int y) { return data_.data() + index(x, y, 0); }

  std::span<std::uint8_t> samples() noexcept { return data_; }
  std::span<const std::uint8_t> samples() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Tiling of an image into square blocks.
struct BlockGrid {
  int block_size = 0;
  int rows = 0;
  int cols = 0;

  int count() const noexcept { return rows * cols; }

  /// Throws a Data error unless both sides are multiples of block_size.
  static BlockGrid for_image(const Image& img, int block_size);

  friend bool operator==(const BlockGrid&, const BlockGrid&) = default;
};

struct Blocks {
  std::vector<Image> blocks;  // raster order by block position
  BlockGrid grid;
};

// Binary PPM (P6) / PGM (P5) with maxval 255.
Image load_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> save_ppm(const Image& img);

Image read_ppm_file(const std::string& path);
void write_ppm_file(const std::string& path, const Image& img);
std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

Blocks split_blocks(const Image& img, int block_size);
Image merge_blocks(std::span<const Image> blocks, const BlockGrid& grid, int channels);

/// Joint PSNR over all samples; +infinity when the images are identical.
double psnr(const Image& a, const Image& b);
bool is_psnr_infinite(double db) noexcept;

struct Padded {
  Image image;
  int pad_right = 0;
  int pad_bottom = 0;
};

/// Replicates the last column/row until both sides are multiples of `multiple`.
Padded pad_edges(const Image& img, int multiple);
/// Keeps the top-left width x height region.
Image crop(const Image& img, int width, int height);

/// Luma (BT.601 weights) as doubles in [0, 255], one per pixel.
std::vector<double> luma(const Image& img);

}  // namespace etcimg
