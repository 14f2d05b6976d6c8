#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "etcimg/image.hpp"

namespace etcimg {

enum class Subsampling { S420, S444 };

struct CodecParams {
  int quality = 85;  // 1..100
  Subsampling subsampling = Subsampling::S420;  // ignored for 1-channel input
  bool progressive = false;
  // Decoder-side chroma interpolation. Off by default: the interpolating
  // upsampler mixes chroma across MCU boundaries, which are block seams in a
  // scrambled image.
  bool fancy_upsampling = false;

  void validate() const;
};

/// Baseline JPEG codec. Implementations must be deterministic for fixed
/// input and params, and safe to call from several threads at once.
class JpegCodec {
 public:
  virtual ~JpegCodec() = default;
  virtual std::vector<std::uint8_t> encode(const Image& img, const CodecParams& params) const = 0;
  virtual Image decode(std::span<const std::uint8_t> jpeg, const CodecParams& params) const = 0;
};

/// libjpeg(-turbo) backed codec, ISLOW DCT, standard Huffman tables.
class LibjpegCodec final : public JpegCodec {
 public:
  std::vector<std::uint8_t> encode(const Image& img, const CodecParams& params) const override;
  Image decode(std::span<const std::uint8_t> jpeg, const CodecParams& params) const override;
};

const JpegCodec& default_codec();

/// Chroma subsampling of a JPEG stream, read from its frame header.
Subsampling probe_subsampling(std::span<const std::uint8_t> jpeg);

struct RoundTrip {
  Image decoded;
  std::size_t compressed_size = 0;
};

RoundTrip jpeg_roundtrip(const Image& img, const CodecParams& params, const JpegCodec& codec = default_codec());

}  // namespace etcimg
