#pragma once

// JPEG experiments on plain and encrypted images: rate-distortion sweeps and
// simulated provider recompression.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etcimg/cipher.hpp"
#include "etcimg/codec.hpp"

namespace etcimg {

struct RDPoint {
  int quality = 0;
  double bits_per_pixel = 0.0;  // compressed bits / (original width * height)
  double psnr_db = 0.0;         // end-to-end reconstruction vs. the original plaintext
};

struct RDCurves {
  std::vector<RDPoint> plain;
  std::vector<RDPoint> encrypted;
};

/// Plain path: jpeg -> decode -> PSNR. Encrypted path: encrypt (edge-padded
/// when the geometry needs it) -> jpeg -> decode -> decrypt -> PSNR.
/// `params.quality` is ignored; each entry of `qualities` is used instead.
RDCurves rd_curve(const Image& img, MasterKey key, const CipherConfig& cfg, std::span<const int> qualities,
                  const CodecParams& params, const JpegCodec& codec = default_codec());

/// Header "path,quality,bpp,psnr_db", plain rows first, six decimals.
std::string rd_csv(const RDCurves& curves);

struct RDSummary {
  double mean_psnr_gap_db = 0.0;    // mean(plain - encrypted)
  double mean_bpp_inflation = 0.0;  // mean(encrypted / plain - 1)
};

RDSummary summarize(const RDCurves& curves);

struct ProviderProfile {
  std::string name;
  int recompress_quality = 85;
  std::optional<Subsampling> forced_subsampling;  // keeps the source's when empty
};

/// Decode and re-encode as the profile dictates. Call repeatedly to model
/// several recompression generations.
std::vector<std::uint8_t> provider_recompress(std::span<const std::uint8_t> jpeg, const ProviderProfile& profile,
                                              const JpegCodec& codec = default_codec());

/// CSV "name,quality,subsampling" with subsampling one of 420, 444 or keep.
/// Blank lines and '#' comments are skipped; a header row starting with "name" is allowed.
std::vector<ProviderProfile> parse_profiles(std::string_view csv);

}  // namespace etcimg
