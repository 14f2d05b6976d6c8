#include "etcimg.h"

#include <chrono>
#include <cstring>
#include <new>
#include <string>

#include "etcimg/cipher.hpp"
#include "etcimg/codec.hpp"
#include "etcimg/error.hpp"
#include "etcimg/harness.hpp"
#include "etcimg/learnable.hpp"
#include "etcimg/puzzle.hpp"

struct etcimg_image {
  etcimg::Image value;
};
struct etcimg_sidecar {
  etcimg::CipherSidecar value;
};
struct etcimg_buffer {
  std::vector<std::uint8_t> bytes;
};
struct etcimg_templates {
  std::vector<etcimg::Template> value;
};
struct etcimg_protected {
  std::vector<etcimg::ProtectedTemplate> value;
};
struct etcimg_model {
  etcimg::CentroidModel value;
};

namespace {

using etcimg::ErrorKind;

thread_local std::string g_last_error;

etcimg_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return ETCIMG_ERR_ARGUMENT;
    case ErrorKind::Data: return ETCIMG_ERR_DATA;
    case ErrorKind::Codec: return ETCIMG_ERR_CODEC;
    case ErrorKind::Io: return ETCIMG_ERR_IO;
  }
  return ETCIMG_ERR_INTERNAL;
}

// Exception barrier: nothing may propagate through the C ABI.
template <typename Fn>
etcimg_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ETCIMG_OK;
  } catch (const etcimg::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return ETCIMG_ERR_INTERNAL;
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) etcimg::fail(ErrorKind::InvalidArgument, std::string(what) + " must not be NULL");
}

etcimg::CipherConfig to_cpp(const etcimg_cipher_config& c) {
  if (c.scheme != ETCIMG_SCHEME_COLOR && c.scheme != ETCIMG_SCHEME_GRAY) {
    etcimg::fail(ErrorKind::InvalidArgument, "unknown scheme");
  }
  return {c.scheme == ETCIMG_SCHEME_COLOR ? etcimg::Scheme::Color : etcimg::Scheme::GrayscaleBased, c.block_size,
          etcimg::StepSet(c.steps)};
}

etcimg_cipher_config to_c(const etcimg::CipherConfig& c) {
  return {c.scheme == etcimg::Scheme::Color ? ETCIMG_SCHEME_COLOR : ETCIMG_SCHEME_GRAY, c.block_size, c.steps.bits()};
}

etcimg::Subsampling subsampling_of(int code) {
  if (code == 420) return etcimg::Subsampling::S420;
  if (code == 444) return etcimg::Subsampling::S444;
  etcimg::fail(ErrorKind::InvalidArgument, "subsampling must be 420 or 444");
}

etcimg::CodecParams to_cpp(const etcimg_codec_params& p) {
  etcimg::CodecParams out;
  out.quality = p.quality;
  out.subsampling = subsampling_of(p.subsampling);
  out.progressive = p.progressive != 0;
  out.fancy_upsampling = p.fancy_upsampling != 0;
  out.validate();
  return out;
}

etcimg_buffer* make_buffer(std::vector<std::uint8_t> bytes) { return new etcimg_buffer{std::move(bytes)}; }

etcimg_buffer* make_buffer(const std::string& text) {
  return new etcimg_buffer{std::vector<std::uint8_t>(text.begin(), text.end())};
}

std::string read_text(const char* path) {
  const auto bytes = etcimg::read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text(const char* path, const std::string& text) {
  etcimg::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

etcimg_attack_report run_attack(etcimg::Puzzle& puzzle, bool orientation_search, etcimg_image** assembled) {
  const auto t0 = std::chrono::steady_clock::now();
  const etcimg::Assembly a = etcimg::greedy_assemble(puzzle, orientation_search);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const etcimg::Metrics m = etcimg::score_assembly(a, puzzle);
  if (assembled != nullptr) *assembled = new etcimg_image{etcimg::render_assembly(a, puzzle)};
  return {m.dc, m.nc, m.lc, static_cast<int>(puzzle.pieces.size()), secs};
}

}  // namespace

extern "C" {

const char* etcimg_last_error(void) { return g_last_error.c_str(); }

const char* etcimg_version(void) { return "1.0.0"; }

int etcimg_sidecar_format_version(void) { return etcimg::CipherSidecar::kFormatVersion; }

const uint8_t* etcimg_buffer_data(const etcimg_buffer* buf) { return buf ? buf->bytes.data() : nullptr; }

size_t etcimg_buffer_size(const etcimg_buffer* buf) { return buf ? buf->bytes.size() : 0; }

void etcimg_buffer_free(etcimg_buffer* buf) { delete buf; }

etcimg_status etcimg_image_create(int width, int height, int channels, const uint8_t* data, etcimg_image** out) {
  return guarded([&] {
    require(out, "out");
    etcimg::Image img(width, height, channels);
    if (data != nullptr) std::memcpy(img.samples().data(), data, img.samples().size());
    *out = new etcimg_image{std::move(img)};
  });
}

etcimg_status etcimg_image_load(const char* path, etcimg_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new etcimg_image{etcimg::read_ppm_file(path)};
  });
}

etcimg_status etcimg_image_decode_ppm(const uint8_t* bytes, size_t size, etcimg_image** out) {
  return guarded([&] {
    require(bytes, "bytes");
    require(out, "out");
    *out = new etcimg_image{etcimg::load_ppm(std::span(bytes, size))};
  });
}

etcimg_status etcimg_image_save(const etcimg_image* img, const char* path) {
  return guarded([&] {
    require(img, "img");
    require(path, "path");
    etcimg::write_ppm_file(path, img->value);
  });
}

etcimg_status etcimg_image_encode_ppm(const etcimg_image* img, etcimg_buffer** out) {
  return guarded([&] {
    require(img, "img");
    require(out, "out");
    *out = make_buffer(etcimg::save_ppm(img->value));
  });
}

int etcimg_image_width(const etcimg_image* img) { return img ? img->value.width() : 0; }
int etcimg_image_height(const etcimg_image* img) { return img ? img->value.height() : 0; }
int etcimg_image_channels(const etcimg_image* img) { return img ? img->value.channels() : 0; }
const uint8_t* etcimg_image_data(const etcimg_image* img) { return img ? img->value.samples().data() : nullptr; }

int etcimg_image_equal(const etcimg_image* a, const etcimg_image* b) {
  return a != nullptr && b != nullptr && a->value == b->value;
}

void etcimg_image_free(etcimg_image* img) { delete img; }

etcimg_status etcimg_psnr(const etcimg_image* a, const etcimg_image* b, double* out_db) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out_db, "out_db");
    *out_db = etcimg::psnr(a->value, b->value);
  });
}

etcimg_status etcimg_key_parse(const char* hex, uint64_t* out) {
  return guarded([&] {
    require(hex, "hex");
    require(out, "out");
    *out = etcimg::MasterKey::parse(hex).seed;
  });
}

void etcimg_key_format(uint64_t key, char out[17]) {
  const std::string hex = etcimg::MasterKey{key}.to_hex();
  std::memcpy(out, hex.c_str(), 17);
}

etcimg_status etcimg_steps_parse(const char* text, unsigned* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = etcimg::StepSet::parse(text).bits();
  });
}

etcimg_status etcimg_scheme_parse(const char* text, etcimg_scheme* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = etcimg::parse_scheme(text) == etcimg::Scheme::Color ? ETCIMG_SCHEME_COLOR : ETCIMG_SCHEME_GRAY;
  });
}

etcimg_status etcimg_keyspace_bits(size_t n_blocks, unsigned steps, etcimg_scheme scheme, double* out_bits) {
  return guarded([&] {
    require(out_bits, "out_bits");
    const auto s = scheme == ETCIMG_SCHEME_COLOR ? etcimg::Scheme::Color : etcimg::Scheme::GrayscaleBased;
    *out_bits = etcimg::keyspace_bits(n_blocks, etcimg::StepSet(steps), s);
  });
}

etcimg_cipher_config etcimg_default_config(etcimg_scheme scheme) {
  return to_c(etcimg::CipherConfig::defaults(scheme == ETCIMG_SCHEME_COLOR ? etcimg::Scheme::Color
                                                                          : etcimg::Scheme::GrayscaleBased));
}

etcimg_status etcimg_encrypt(const etcimg_image* img, uint64_t key, const etcimg_cipher_config* cfg, int pad,
                             etcimg_image** out_cipher, etcimg_sidecar** out_sidecar) {
  return guarded([&] {
    require(img, "img");
    require(cfg, "cfg");
    require(out_cipher, "out_cipher");
    require(out_sidecar, "out_sidecar");
    const auto c = to_cpp(*cfg);
    etcimg::Encrypted enc = pad ? etcimg::encrypt_padded(img->value, etcimg::MasterKey{key}, c)
                                : etcimg::encrypt(img->value, etcimg::MasterKey{key}, c);
    auto* sc = new etcimg_sidecar{enc.sidecar};
    *out_cipher = new etcimg_image{std::move(enc.image)};
    *out_sidecar = sc;
  });
}

etcimg_status etcimg_decrypt(const etcimg_image* cipher, uint64_t key, const etcimg_sidecar* sidecar,
                             etcimg_image** out_plain) {
  return guarded([&] {
    require(cipher, "cipher");
    require(sidecar, "sidecar");
    require(out_plain, "out_plain");
    *out_plain = new etcimg_image{etcimg::decrypt(cipher->value, etcimg::MasterKey{key}, sidecar->value)};
  });
}

etcimg_status etcimg_sidecar_load(const char* path, etcimg_sidecar** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new etcimg_sidecar{etcimg::CipherSidecar::parse(read_text(path))};
  });
}

etcimg_status etcimg_sidecar_parse(const char* text, etcimg_sidecar** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new etcimg_sidecar{etcimg::CipherSidecar::parse(text)};
  });
}

etcimg_status etcimg_sidecar_save(const etcimg_sidecar* sidecar, const char* path) {
  return guarded([&] {
    require(sidecar, "sidecar");
    require(path, "path");
    write_text(path, sidecar->value.serialize());
  });
}

etcimg_status etcimg_sidecar_serialize(const etcimg_sidecar* sidecar, etcimg_buffer** out) {
  return guarded([&] {
    require(sidecar, "sidecar");
    require(out, "out");
    *out = make_buffer(sidecar->value.serialize());
  });
}

void etcimg_sidecar_config(const etcimg_sidecar* sidecar, etcimg_cipher_config* out) {
  if (sidecar != nullptr && out != nullptr) *out = to_c(sidecar->value.config());
}

void etcimg_sidecar_free(etcimg_sidecar* sidecar) { delete sidecar; }

etcimg_codec_params etcimg_default_codec_params(void) {
  const etcimg::CodecParams p;
  return {p.quality, p.subsampling == etcimg::Subsampling::S420 ? 420 : 444, p.progressive ? 1 : 0,
          p.fancy_upsampling ? 1 : 0};
}

etcimg_status etcimg_jpeg_encode(const etcimg_image* img, const etcimg_codec_params* params, etcimg_buffer** out) {
  return guarded([&] {
    require(img, "img");
    require(params, "params");
    require(out, "out");
    *out = make_buffer(etcimg::default_codec().encode(img->value, to_cpp(*params)));
  });
}

etcimg_status etcimg_jpeg_decode(const uint8_t* bytes, size_t size, const etcimg_codec_params* params,
                                 etcimg_image** out) {
  return guarded([&] {
    require(bytes, "bytes");
    require(out, "out");
    const etcimg::CodecParams p = params ? to_cpp(*params) : etcimg::CodecParams{};
    *out = new etcimg_image{etcimg::default_codec().decode(std::span(bytes, size), p)};
  });
}

etcimg_status etcimg_rd_curve(const etcimg_image* img, uint64_t key, const etcimg_cipher_config* cfg,
                              const int* qualities, size_t n_qualities, const etcimg_codec_params* params,
                              etcimg_rd_point* plain, etcimg_rd_point* encrypted) {
  return guarded([&] {
    require(img, "img");
    require(cfg, "cfg");
    require(qualities, "qualities");
    require(params, "params");
    require(plain, "plain");
    require(encrypted, "encrypted");
    const auto curves = etcimg::rd_curve(img->value, etcimg::MasterKey{key}, to_cpp(*cfg),
                                         std::span(qualities, n_qualities), to_cpp(*params));
    for (size_t i = 0; i < n_qualities; ++i) {
      plain[i] = {curves.plain[i].quality, curves.plain[i].bits_per_pixel, curves.plain[i].psnr_db};
      encrypted[i] = {curves.encrypted[i].quality, curves.encrypted[i].bits_per_pixel, curves.encrypted[i].psnr_db};
    }
  });
}

etcimg_status etcimg_rd_csv(const etcimg_rd_point* plain, const etcimg_rd_point* encrypted, size_t n,
                            etcimg_buffer** out) {
  return guarded([&] {
    require(plain, "plain");
    require(encrypted, "encrypted");
    require(out, "out");
    etcimg::RDCurves curves;
    for (size_t i = 0; i < n; ++i) {
      curves.plain.push_back({plain[i].quality, plain[i].bpp, plain[i].psnr_db});
      curves.encrypted.push_back({encrypted[i].quality, encrypted[i].bpp, encrypted[i].psnr_db});
    }
    *out = make_buffer(etcimg::rd_csv(curves));
  });
}

etcimg_status etcimg_provider_recompress(const uint8_t* jpeg, size_t size, int quality, int subsampling,
                                         etcimg_buffer** out) {
  return guarded([&] {
    require(jpeg, "jpeg");
    require(out, "out");
    etcimg::ProviderProfile profile{"custom", quality, std::nullopt};
    if (subsampling != 0) profile.forced_subsampling = subsampling_of(subsampling);
    if (quality < 1 || quality > 100) etcimg::fail(ErrorKind::InvalidArgument, "quality must be in 1..100");
    *out = make_buffer(etcimg::provider_recompress(std::span(jpeg, size), profile));
  });
}

etcimg_status etcimg_profile_lookup(const char* path, const char* name, int* quality, int* subsampling) {
  return guarded([&] {
    require(path, "path");
    require(name, "name");
    require(quality, "quality");
    require(subsampling, "subsampling");
    for (const auto& p : etcimg::parse_profiles(read_text(path))) {
      if (p.name != name) continue;
      *quality = p.recompress_quality;
      *subsampling = !p.forced_subsampling ? 0 : *p.forced_subsampling == etcimg::Subsampling::S420 ? 420 : 444;
      return;
    }
    etcimg::fail(ErrorKind::Data, std::string("no provider profile named '") + name + "'");
  });
}

etcimg_status etcimg_attack(const etcimg_image* cipher, const etcimg_image* plain, int block_size,
                            int orientation_search, etcimg_attack_report* report, etcimg_image** assembled) {
  return guarded([&] {
    require(cipher, "cipher");
    require(plain, "plain");
    require(report, "report");
    const etcimg::Image& c = cipher->value;
    etcimg::Image p = plain->value;
    if (c.channels() == 1 && p.channels() == 3 && c.width() == p.width() && c.height() == 3 * p.height()) {
      p = etcimg::stack_planes(p);
    }
    etcimg::Puzzle puzzle = etcimg::make_puzzle(c, block_size);
    puzzle.ground_truth = etcimg::ground_truth_by_matching(p, c, block_size);
    *report = run_attack(puzzle, orientation_search != 0, assembled);
  });
}

etcimg_status etcimg_attack_keyed(const etcimg_image* cipher, uint64_t key, const etcimg_sidecar* sidecar,
                                  int orientation_search, etcimg_attack_report* report, etcimg_image** assembled) {
  return guarded([&] {
    require(cipher, "cipher");
    require(sidecar, "sidecar");
    require(report, "report");
    etcimg::Puzzle puzzle = etcimg::make_puzzle(cipher->value, sidecar->value.block_size);
    puzzle.ground_truth = etcimg::ground_truth_from_key(etcimg::MasterKey{key}, sidecar->value.steps,
                                                        puzzle.pieces.size());
    *report = run_attack(puzzle, orientation_search != 0, assembled);
  });
}

etcimg_status etcimg_brute_force_scramble(const etcimg_image* plain, const etcimg_image* cipher,
                                          const etcimg_cipher_config* cfg, uint32_t* candidates,
                                          size_t max_candidates, size_t* n_candidates, uint64_t* n_checked) {
  return guarded([&] {
    require(plain, "plain");
    require(cipher, "cipher");
    require(cfg, "cfg");
    require(n_candidates, "n_candidates");
    const auto r = etcimg::brute_force_scramble(plain->value, cipher->value, to_cpp(*cfg));
    *n_candidates = r.candidates.size();
    if (n_checked != nullptr) *n_checked = r.permutations_checked;
    if (candidates != nullptr) {
      for (size_t i = 0; i < r.candidates.size() && i < max_candidates; ++i) {
        std::copy(r.candidates[i].begin(), r.candidates[i].end(), candidates + i * r.candidates[i].size());
      }
    }
  });
}

etcimg_status etcimg_templates_load(const char* path, etcimg_templates** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new etcimg_templates{etcimg::templates_from_csv(read_text(path))};
  });
}

etcimg_status etcimg_templates_save(const etcimg_templates* set, const char* path) {
  return guarded([&] {
    require(set, "set");
    require(path, "path");
    write_text(path, etcimg::templates_to_csv(std::span<const etcimg::Template>(set->value)));
  });
}

etcimg_status etcimg_templates_extract(const etcimg_image* const* samples, size_t n_samples, size_t dim,
                                       int64_t client_id, const int64_t* labels, etcimg_templates** out) {
  return guarded([&] {
    require(samples, "samples");
    require(out, "out");
    std::vector<etcimg::Template> ts;
    for (size_t i = 0; i < n_samples; ++i) {
      require(samples[i], "sample");
      std::optional<std::int64_t> label;
      if (labels != nullptr) label = labels[i];
      ts.push_back(etcimg::extract_template(samples[i]->value, dim, client_id, label));
    }
    *out = new etcimg_templates{std::move(ts)};
  });
}

size_t etcimg_templates_count(const etcimg_templates* set) { return set ? set->value.size() : 0; }

size_t etcimg_templates_dim(const etcimg_templates* set) {
  return set && !set->value.empty() ? set->value.front().values.size() : 0;
}

void etcimg_templates_free(etcimg_templates* set) { delete set; }

etcimg_status etcimg_protect(const etcimg_templates* set, uint64_t key, etcimg_protected** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    *out = new etcimg_protected{etcimg::protect_templates(set->value, etcimg::MasterKey{key})};
  });
}

etcimg_status etcimg_protected_load(const char* path, etcimg_protected** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new etcimg_protected{etcimg::protected_from_csv(read_text(path))};
  });
}

etcimg_status etcimg_protected_save(const etcimg_protected* set, const char* path) {
  return guarded([&] {
    require(set, "set");
    require(path, "path");
    write_text(path, etcimg::templates_to_csv(std::span<const etcimg::ProtectedTemplate>(set->value)));
  });
}

size_t etcimg_protected_count(const etcimg_protected* set) { return set ? set->value.size() : 0; }

void etcimg_protected_free(etcimg_protected* set) { delete set; }

etcimg_status etcimg_enroll(const etcimg_protected* set, etcimg_model** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    *out = new etcimg_model{etcimg::enroll(set->value)};
  });
}

etcimg_status etcimg_model_load(const char* path, etcimg_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new etcimg_model{etcimg::model_from_csv(read_text(path))};
  });
}

etcimg_status etcimg_model_save(const etcimg_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    write_text(path, etcimg::model_to_csv(model->value));
  });
}

size_t etcimg_model_classes(const etcimg_model* model) { return model ? model->value.labels().size() : 0; }

void etcimg_model_free(etcimg_model* model) { delete model; }

etcimg_status etcimg_classify(const etcimg_model* model, const etcimg_protected* queries, int64_t* labels,
                              double* distances) {
  return guarded([&] {
    require(model, "model");
    require(queries, "queries");
    require(labels, "labels");
    require(distances, "distances");
    for (size_t i = 0; i < queries->value.size(); ++i) {
      const auto p = etcimg::classify(queries->value[i], model->value);
      labels[i] = p.label;
      distances[i] = p.distance;
    }
  });
}

}  // extern "C"
