#include "etcimg/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <jpeglib.h>

#include "etcimg/error.hpp"

namespace etcimg {

namespace {

// libjpeg reports fatal errors through error_exit; we longjmp back out of the
// library and turn the message into a Codec error at the call site.
struct ErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void on_output_message(j_common_ptr) {}

// Everything touched between setjmp and a possible longjmp lives in plain C
// storage, so no destructors are skipped.
bool encode_raw(const Image& img, const CodecParams& params, unsigned char** out, unsigned long* out_size,
                char* message) {
  jpeg_compress_struct cinfo;
  ErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error_exit;
  err.pub.output_message = on_output_message;
  if (setjmp(err.jump)) {
    std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, out, out_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = img.channels();
  cinfo.in_color_space = img.channels() == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_set_quality(&cinfo, params.quality, TRUE);
  if (img.channels() == 3) {
    const int h = params.subsampling == Subsampling::S420 ? 2 : 1;
    cinfo.comp_info[0].h_samp_factor = h;
    cinfo.comp_info[0].v_samp_factor = h;
    for (int c = 1; c < 3; ++c) {
      cinfo.comp_info[c].h_samp_factor = 1;
      cinfo.comp_info[c].v_samp_factor = 1;
    }
  }
  if (params.progressive) jpeg_simple_progression(&cinfo);
  jpeg_start_compress(&cinfo, TRUE);
  const auto stride = static_cast<std::size_t>(img.width()) * img.channels();
  const unsigned char* base = img.samples().data();
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(base + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

struct DecodeHeader {
  int width = 0;
  int height = 0;
  int channels = 0;
};

// `pixels` is malloc'd by the callee on success.
bool decode_raw(std::span<const std::uint8_t> jpeg, const CodecParams& params, DecodeHeader* hdr,
                unsigned char** pixels, char* message) {
  jpeg_decompress_struct cinfo;
  ErrorManager err;
  unsigned char* volatile buffer = nullptr;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error_exit;
  err.pub.output_message = on_output_message;
  if (setjmp(err.jump)) {
    std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
    jpeg_destroy_decompress(&cinfo);
    std::free(buffer);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, jpeg.data(), static_cast<unsigned long>(jpeg.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  cinfo.do_fancy_upsampling = params.fancy_upsampling ? TRUE : FALSE;
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  hdr->width = static_cast<int>(cinfo.output_width);
  hdr->height = static_cast<int>(cinfo.output_height);
  hdr->channels = cinfo.output_components;
  const auto stride = static_cast<std::size_t>(hdr->width) * hdr->channels;
  buffer = static_cast<unsigned char*>(std::malloc(stride * hdr->height));
  if (buffer == nullptr) {
    std::snprintf(message, JMSG_LENGTH_MAX, "out of memory");
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = buffer + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  *pixels = buffer;
  return true;
}

}  // namespace

void CodecParams::validate() const {
  if (quality < 1 || quality > 100) fail(ErrorKind::InvalidArgument, "JPEG quality must be in 1..100");
}

std::vector<std::uint8_t> LibjpegCodec::encode(const Image& img, const CodecParams& params) const {
  params.validate();
  if (img.empty()) fail(ErrorKind::InvalidArgument, "cannot encode an empty image");
  unsigned char* out = nullptr;
  unsigned long size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = encode_raw(img, params, &out, &size, message);
  std::vector<std::uint8_t> bytes;
  if (ok) bytes.assign(out, out + size);
  std::free(out);
  if (!ok) fail(ErrorKind::Codec, std::string("JPEG encode failed: ") + message);
  return bytes;
}

Image LibjpegCodec::decode(std::span<const std::uint8_t> jpeg, const CodecParams& params) const {
  if (jpeg.empty()) fail(ErrorKind::Codec, "JPEG decode failed: empty input");
  DecodeHeader hdr;
  unsigned char* pixels = nullptr;
  char message[JMSG_LENGTH_MAX] = {};
  if (!decode_raw(jpeg, params, &hdr, &pixels, message)) {
    fail(ErrorKind::Codec, std::string("JPEG decode failed: ") + message);
  }
  const std::size_t n = static_cast<std::size_t>(hdr.width) * hdr.height * hdr.channels;
  std::vector<std::uint8_t> data(pixels, pixels + n);
  std::free(pixels);
  return Image(hdr.width, hdr.height, hdr.channels, std::move(data));
}

const JpegCodec& default_codec() {
  static const LibjpegCodec codec;
  return codec;
}

Subsampling probe_subsampling(std::span<const std::uint8_t> jpeg) {
  // Walk marker segments up to the first SOFn and read component 0's sampling factors.
  std::size_t i = 2;
  if (jpeg.size() < 4 || jpeg[0] != 0xFF || jpeg[1] != 0xD8) fail(ErrorKind::Codec, "not a JPEG stream");
  while (i + 4 <= jpeg.size()) {
    if (jpeg[i] != 0xFF) fail(ErrorKind::Codec, "corrupt JPEG marker stream");
    const std::uint8_t marker = jpeg[i + 1];
    if (marker == 0xFF) {
      ++i;
      continue;
    }
    const std::size_t len = (static_cast<std::size_t>(jpeg[i + 2]) << 8) | jpeg[i + 3];
    const bool sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 && marker != 0xCC;
    if (sof) {
      if (i + 4 + len - 2 > jpeg.size() || len < 11) fail(ErrorKind::Codec, "truncated JPEG frame header");
      const std::uint8_t components = jpeg[i + 9];
      if (components < 3) return Subsampling::S444;
      const std::uint8_t factors = jpeg[i + 11];
      return (factors >> 4) == 2 && (factors & 0xF) == 2 ? Subsampling::S420 : Subsampling::S444;
    }
    i += 2 + len;
  }
  fail(ErrorKind::Codec, "JPEG stream has no frame header");
}

RoundTrip jpeg_roundtrip(const Image& img, const CodecParams& params, const JpegCodec& codec) {
  const auto bytes = codec.encode(img, params);
  Image decoded = codec.decode(bytes, params);
  if (!decoded.same_shape(img)) fail(ErrorKind::Codec, "codec changed the image shape");
  return {std::move(decoded), bytes.size()};
}

}  // namespace etcimg
