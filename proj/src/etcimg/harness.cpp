#include "etcimg/harness.hpp"

#include <charconv>
#include <cstdio>

#include "etcimg/error.hpp"

namespace etcimg {

namespace {

double bpp(std::size_t bytes, const Image& original) {
  return 8.0 * static_cast<double>(bytes) / static_cast<double>(original.pixel_count());
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

RDCurves rd_curve(const Image& img, MasterKey key, const CipherConfig& cfg, std::span<const int> qualities,
                  const CodecParams& params, const JpegCodec& codec) {
  if (qualities.empty()) fail(ErrorKind::InvalidArgument, "rd_curve: no qualities given");
  const Encrypted enc = encrypt_padded(img, key, cfg);
  RDCurves out;
  for (int q : qualities) {
    CodecParams p = params;
    p.quality = q;
    const RoundTrip plain = jpeg_roundtrip(img, p, codec);
    out.plain.push_back({q, bpp(plain.compressed_size, img), psnr(plain.decoded, img)});

    const RoundTrip cipher = jpeg_roundtrip(enc.image, p, codec);
    const Image restored = decrypt(cipher.decoded, key, enc.sidecar);
    out.encrypted.push_back({q, bpp(cipher.compressed_size, img), psnr(restored, img)});
  }
  return out;
}

std::string rd_csv(const RDCurves& curves) {
  std::string out = "path,quality,bpp,psnr_db\n";
  char line[128];
  auto emit = [&](const char* path, const std::vector<RDPoint>& pts) {
    for (const auto& p : pts) {
      // An exact reconstruction has infinite PSNR; printf spells it "inf".
      std::snprintf(line, sizeof line, "%s,%d,%.6f,%.6f\n", path, p.quality, p.bits_per_pixel, p.psnr_db);
      out += line;
    }
  };
  emit("plain", curves.plain);
  emit("encrypted", curves.encrypted);
  return out;
}

RDSummary summarize(const RDCurves& curves) {
  if (curves.plain.empty() || curves.plain.size() != curves.encrypted.size()) {
    fail(ErrorKind::InvalidArgument, "summarize: curves must be non-empty and the same length");
  }
  RDSummary s;
  for (std::size_t i = 0; i < curves.plain.size(); ++i) {
    s.mean_psnr_gap_db += curves.plain[i].psnr_db - curves.encrypted[i].psnr_db;
    s.mean_bpp_inflation += curves.encrypted[i].bits_per_pixel / curves.plain[i].bits_per_pixel - 1.0;
  }
  const auto n = static_cast<double>(curves.plain.size());
  s.mean_psnr_gap_db /= n;
  s.mean_bpp_inflation /= n;
  return s;
}

std::vector<std::uint8_t> provider_recompress(std::span<const std::uint8_t> jpeg, const ProviderProfile& profile,
                                              const JpegCodec& codec) {
  CodecParams p;
  p.quality = profile.recompress_quality;
  p.subsampling = profile.forced_subsampling.value_or(probe_subsampling(jpeg));
  const Image decoded = codec.decode(jpeg, p);
  return codec.encode(decoded, p);
}

std::vector<ProviderProfile> parse_profiles(std::string_view csv) {
  std::vector<ProviderProfile> out;
  int line_no = 0;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    std::string_view line = trim(csv.substr(0, nl));
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#' || line.starts_with("name,")) continue;

    std::string_view cols[3];
    for (int c = 0; c < 3; ++c) {
      const auto comma = line.find(',');
      if (c < 2 && comma == std::string_view::npos) {
        fail(ErrorKind::Data, "profiles line " + std::to_string(line_no) + ": expected name,quality,subsampling");
      }
      cols[c] = trim(line.substr(0, comma));
      line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    }
    ProviderProfile prof;
    prof.name = std::string(cols[0]);
    auto [ptr, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), prof.recompress_quality);
    if (ec != std::errc() || ptr != cols[1].data() + cols[1].size() || prof.recompress_quality < 1 ||
        prof.recompress_quality > 100) {
      fail(ErrorKind::Data, "profiles line " + std::to_string(line_no) + ": quality must be in 1..100");
    }
    if (cols[2] == "420") {
      prof.forced_subsampling = Subsampling::S420;
    } else if (cols[2] == "444") {
      prof.forced_subsampling = Subsampling::S444;
    } else if (cols[2] != "keep" && !cols[2].empty()) {
      fail(ErrorKind::Data, "profiles line " + std::to_string(line_no) + ": subsampling must be 420, 444 or keep");
    }
    out.push_back(std::move(prof));
  }
  return out;
}

}  // namespace etcimg
