#include <doctest.h>

#include <random>

#include "etcimg/codec.hpp"
#include "etcimg/error.hpp"
#include "etcimg/harness.hpp"
#include "support.hpp"

using namespace etcimg;

namespace {

const Image& astronaut() {
  static const Image img = read_ppm_file(testsupport::fixture("astronaut.ppm"));
  return img;
}

}  // namespace

TEST_CASE("flat gray image is near lossless at q100 4:4:4") {
  Image flat(64, 48, 3);
  for (auto& s : flat.samples()) s = 128;
  CodecParams p;
  p.quality = 100;
  p.subsampling = Subsampling::S444;
  const RoundTrip rt = jpeg_roundtrip(flat, p);
  CHECK(rt.decoded.same_shape(flat));
  CHECK(psnr(rt.decoded, flat) >= 50.0);
}

TEST_CASE("decoded dimensions match the input") {
  std::mt19937_64 rng(1);
  const int shapes[][3] = {{17, 9, 3}, {1, 1, 1}, {33, 65, 1}};
  for (const auto& s : shapes) {
    const Image img = testsupport::random_image(rng, s[0], s[1], s[2]);
    const RoundTrip rt = jpeg_roundtrip(img, CodecParams{});
    CHECK(rt.decoded.same_shape(img));
  }
}

TEST_CASE("size grows with quality") {
  CodecParams lo, hi;
  lo.quality = 50;
  hi.quality = 95;
  CHECK(jpeg_roundtrip(astronaut(), lo).compressed_size < jpeg_roundtrip(astronaut(), hi).compressed_size);
}

TEST_CASE("codec is deterministic and reports subsampling") {
  CodecParams p;
  const auto a = default_codec().encode(astronaut(), p);
  const auto b = default_codec().encode(astronaut(), p);
  CHECK(a == b);
  CHECK(probe_subsampling(a) == Subsampling::S420);
  p.subsampling = Subsampling::S444;
  CHECK(probe_subsampling(default_codec().encode(astronaut(), p)) == Subsampling::S444);
  p.progressive = true;
  const auto prog = default_codec().encode(astronaut(), p);
  CHECK(default_codec().decode(prog, p).same_shape(astronaut()));
}

TEST_CASE("codec errors") {
  const std::vector<std::uint8_t> junk{0xFF, 0xD8, 0x00, 0x01};
  try {
    default_codec().decode(junk, CodecParams{});
    FAIL("expected a codec error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Codec);
  }
  CodecParams bad;
  bad.quality = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("rd curves coincide when encryption is disabled") {
  const int qs[] = {50, 85};
  const CipherConfig none{Scheme::Color, 16, StepSet::none()};
  const RDCurves c = rd_curve(astronaut(), MasterKey{1}, none, qs, CodecParams{});
  REQUIRE(c.plain.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(c.plain[i].quality == c.encrypted[i].quality);
    CHECK(c.plain[i].bits_per_pixel == c.encrypted[i].bits_per_pixel);
    CHECK(c.plain[i].psnr_db == c.encrypted[i].psnr_db);
  }
  const RDSummary s = summarize(c);
  CHECK(s.mean_psnr_gap_db == 0.0);
  CHECK(s.mean_bpp_inflation == 0.0);
}

TEST_CASE("rd csv format") {
  RDCurves c;
  c.plain.push_back({50, 1.25, 30.5});
  c.encrypted.push_back({50, 1.5, 30.0});
  CHECK(rd_csv(c) == "path,quality,bpp,psnr_db\nplain,50,1.250000,30.500000\nencrypted,50,1.500000,30.000000\n");
}

TEST_CASE("aligned blocks beat misaligned ones at q85") {
  const int q[] = {85};
  const RDSummary aligned =
      summarize(rd_curve(astronaut(), MasterKey{1}, CipherConfig::defaults(Scheme::Color), q, CodecParams{}));
  const RDSummary misaligned =
      summarize(rd_curve(astronaut(), MasterKey{1}, CipherConfig{Scheme::Color, 17, StepSet::all()}, q, CodecParams{}));
  CHECK(aligned.mean_psnr_gap_db < misaligned.mean_psnr_gap_db);
}

TEST_CASE("provider recompression of an encrypted upload") {
  const MasterKey key{0x1234};
  const Encrypted e = encrypt(astronaut(), key, CipherConfig::defaults(Scheme::Color));
  CodecParams p;
  p.quality = 85;
  const auto upload = default_codec().encode(e.image, p);
  const ProviderProfile same{"same", 85, std::nullopt};

  const auto once = provider_recompress(upload, same);
  const auto twice = provider_recompress(once, same);
  const Image d1 = default_codec().decode(once, p);
  const Image d2 = default_codec().decode(twice, p);
  CHECK(d1.same_shape(e.image));
  CHECK(d2.same_shape(e.image));
  CHECK(probe_subsampling(once) == Subsampling::S420);

  const double p1 = psnr(decrypt(d1, key, e.sidecar), astronaut());
  const double p2 = psnr(decrypt(d2, key, e.sidecar), astronaut());
  CHECK(p1 >= 25.0);
  CHECK(std::abs(p1 - p2) <= 2.0);

  const ProviderProfile force444{"f", 90, Subsampling::S444};
  CHECK(probe_subsampling(provider_recompress(upload, force444)) == Subsampling::S444);
}

TEST_CASE("provider profiles csv") {
  const auto ps = parse_profiles("# comment\nname,quality,subsampling\na,85,420\n\nb,70,keep\nc,95,444\n");
  REQUIRE(ps.size() == 3);
  CHECK(ps[0].forced_subsampling == Subsampling::S420);
  CHECK(!ps[1].forced_subsampling);
  CHECK(ps[2].recompress_quality == 95);
  CHECK_THROWS_AS(parse_profiles("a,101,420\n"), Error);
  CHECK_THROWS_AS(parse_profiles("a,85,422\n"), Error);
}
