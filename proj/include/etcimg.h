/*
 * etcimg: block scrambling-based image encryption for Encryption-then-
 * Compression systems, with JPEG rate-distortion, jigsaw-attack and
 * template-protection harnesses.
 *
 * Plain C interface over opaque handles. Every function that can fail returns
 * an etcimg_status; on failure etcimg_last_error() describes the problem for
 * the calling thread. Objects returned through an out-parameter belong to the
 * caller and must be released with the matching *_free function.
 */
#ifndef ETCIMG_H
#define ETCIMG_H

#include <stddef.h>
#include <stdint.h>

#if defined(ETCIMG_BUILDING)
#define ETCIMG_API __attribute__((visibility("default")))
#else
#define ETCIMG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum etcimg_status {
  ETCIMG_OK = 0,
  ETCIMG_ERR_ARGUMENT = 1, /* bad parameter or unusable configuration */
  ETCIMG_ERR_DATA = 2,     /* malformed or inconsistent input data */
  ETCIMG_ERR_CODEC = 3,    /* JPEG codec failure */
  ETCIMG_ERR_IO = 4,       /* file could not be read or written */
  ETCIMG_ERR_INTERNAL = 5
} etcimg_status;

typedef struct etcimg_image etcimg_image;
typedef struct etcimg_sidecar etcimg_sidecar;
typedef struct etcimg_buffer etcimg_buffer;
typedef struct etcimg_templates etcimg_templates;
typedef struct etcimg_protected etcimg_protected;
typedef struct etcimg_model etcimg_model;

ETCIMG_API const char* etcimg_last_error(void);
ETCIMG_API const char* etcimg_version(void);
/* Version written into cipher sidecar files. */
ETCIMG_API int etcimg_sidecar_format_version(void);

/* ---- byte buffers ------------------------------------------------------ */

ETCIMG_API const uint8_t* etcimg_buffer_data(const etcimg_buffer* buf);
ETCIMG_API size_t etcimg_buffer_size(const etcimg_buffer* buf);
ETCIMG_API void etcimg_buffer_free(etcimg_buffer* buf);

/* ---- images (8-bit, 1 or 3 interleaved channels) ----------------------- */

/* `data` may be NULL for a zero-filled image; otherwise it holds w*h*ch samples. */
ETCIMG_API etcimg_status etcimg_image_create(int width, int height, int channels, const uint8_t* data,
                                             etcimg_image** out);
/* Binary PPM (P6) or PGM (P5), maxval 255. */
ETCIMG_API etcimg_status etcimg_image_load(const char* path, etcimg_image** out);
ETCIMG_API etcimg_status etcimg_image_decode_ppm(const uint8_t* bytes, size_t size, etcimg_image** out);
ETCIMG_API etcimg_status etcimg_image_save(const etcimg_image* img, const char* path);
ETCIMG_API etcimg_status etcimg_image_encode_ppm(const etcimg_image* img, etcimg_buffer** out);
ETCIMG_API int etcimg_image_width(const etcimg_image* img);
ETCIMG_API int etcimg_image_height(const etcimg_image* img);
ETCIMG_API int etcimg_image_channels(const etcimg_image* img);
ETCIMG_API const uint8_t* etcimg_image_data(const etcimg_image* img);
ETCIMG_API int etcimg_image_equal(const etcimg_image* a, const etcimg_image* b);
ETCIMG_API void etcimg_image_free(etcimg_image* img);

/* Joint PSNR over all samples in dB; +INFINITY for identical images. */
ETCIMG_API etcimg_status etcimg_psnr(const etcimg_image* a, const etcimg_image* b, double* out_db);

/* ---- keys and key space ------------------------------------------------ */

enum {
  ETCIMG_STEP_SCRAMBLE = 1u << 0,
  ETCIMG_STEP_ROTATE_FLIP = 1u << 1,
  ETCIMG_STEP_NEGPOS = 1u << 2,
  ETCIMG_STEP_COLOR_SHUFFLE = 1u << 3,
  ETCIMG_STEPS_ALL = 0xFu
};

typedef enum etcimg_scheme { ETCIMG_SCHEME_COLOR = 0, ETCIMG_SCHEME_GRAY = 1 } etcimg_scheme;

/* 16 hex digits. */
ETCIMG_API etcimg_status etcimg_key_parse(const char* hex, uint64_t* out);
/* Writes 16 lowercase hex digits and a NUL into out[17]. */
ETCIMG_API void etcimg_key_format(uint64_t key, char out[17]);
/* Comma list of s,r,n,c; "" is the empty set. */
ETCIMG_API etcimg_status etcimg_steps_parse(const char* text, unsigned* out);
ETCIMG_API etcimg_status etcimg_scheme_parse(const char* text, etcimg_scheme* out);
ETCIMG_API etcimg_status etcimg_keyspace_bits(size_t n_blocks, unsigned steps, etcimg_scheme scheme, double* out_bits);

/* ---- cipher ------------------------------------------------------------ */

typedef struct etcimg_cipher_config {
  etcimg_scheme scheme;
  int block_size;
  unsigned steps;
} etcimg_cipher_config;

/* 16x16 blocks and all four steps for color; 8x8 and steps s,r,n for gray. */
ETCIMG_API etcimg_cipher_config etcimg_default_config(etcimg_scheme scheme);

/* With pad != 0 the image is edge-replicated to a multiple of the block
 * size first; otherwise non-divisible dimensions fail with ETCIMG_ERR_DATA. */
ETCIMG_API etcimg_status etcimg_encrypt(const etcimg_image* img, uint64_t key, const etcimg_cipher_config* cfg,
                                        int pad, etcimg_image** out_cipher, etcimg_sidecar** out_sidecar);
ETCIMG_API etcimg_status etcimg_decrypt(const etcimg_image* cipher, uint64_t key, const etcimg_sidecar* sidecar,
                                        etcimg_image** out_plain);

/* Sidecar: flat key=value text (version, scheme, block_size, steps, orig_w,
 * orig_h, channels, pad_r, pad_b). */
ETCIMG_API etcimg_status etcimg_sidecar_load(const char* path, etcimg_sidecar** out);
ETCIMG_API etcimg_status etcimg_sidecar_parse(const char* text, etcimg_sidecar** out);
ETCIMG_API etcimg_status etcimg_sidecar_save(const etcimg_sidecar* sidecar, const char* path);
ETCIMG_API etcimg_status etcimg_sidecar_serialize(const etcimg_sidecar* sidecar, etcimg_buffer** out);
ETCIMG_API void etcimg_sidecar_config(const etcimg_sidecar* sidecar, etcimg_cipher_config* out);
ETCIMG_API void etcimg_sidecar_free(etcimg_sidecar* sidecar);

/* ---- JPEG harness ------------------------------------------------------ */

typedef struct etcimg_codec_params {
  int quality;          /* 1..100 */
  int subsampling;      /* 420 or 444 */
  int progressive;      /* non-zero for progressive JPEG */
  int fancy_upsampling; /* non-zero for interpolated chroma upsampling on decode */
} etcimg_codec_params;

/* Quality 85, 4:2:0, baseline, replicated chroma upsampling. */
ETCIMG_API etcimg_codec_params etcimg_default_codec_params(void);

ETCIMG_API etcimg_status etcimg_jpeg_encode(const etcimg_image* img, const etcimg_codec_params* params,
                                            etcimg_buffer** out);
ETCIMG_API etcimg_status etcimg_jpeg_decode(const uint8_t* bytes, size_t size, const etcimg_codec_params* params,
                                            etcimg_image** out);

typedef struct etcimg_rd_point {
  int quality;
  double bpp;
  double psnr_db;
} etcimg_rd_point;

/* Fills n_qualities points into each of plain[] and encrypted[]. */
ETCIMG_API etcimg_status etcimg_rd_curve(const etcimg_image* img, uint64_t key, const etcimg_cipher_config* cfg,
                                         const int* qualities, size_t n_qualities, const etcimg_codec_params* params,
                                         etcimg_rd_point* plain, etcimg_rd_point* encrypted);
/* CSV "path,quality,bpp,psnr_db", plain rows then encrypted rows. */
ETCIMG_API etcimg_status etcimg_rd_csv(const etcimg_rd_point* plain, const etcimg_rd_point* encrypted, size_t n,
                                       etcimg_buffer** out);

/* Decode and re-encode at `quality`; subsampling 420/444 forces it, 0 keeps the source's. */
ETCIMG_API etcimg_status etcimg_provider_recompress(const uint8_t* jpeg, size_t size, int quality, int subsampling,
                                                    etcimg_buffer** out);

/* Looks up `name` in a provider profile CSV ("name,quality,subsampling",
 * subsampling 420, 444 or keep). Writes subsampling 0 for keep. */
ETCIMG_API etcimg_status etcimg_profile_lookup(const char* path, const char* name, int* quality, int* subsampling);

/* ---- jigsaw attack ----------------------------------------------------- */

typedef struct etcimg_attack_report {
  double dc;
  double nc;
  double lc;
  int n_pieces;
  double seconds; /* solver wall time */
} etcimg_attack_report;

/* Ground truth by exact block matching against the plaintext (plane-stacked
 * automatically when the ciphertext is grayscale-based). `assembled` may be NULL. */
ETCIMG_API etcimg_status etcimg_attack(const etcimg_image* cipher, const etcimg_image* plain, int block_size,
                                       int orientation_search, etcimg_attack_report* report,
                                       etcimg_image** assembled);
/* Ground truth from the key and sidecar; works on lossy ciphertext. */
ETCIMG_API etcimg_status etcimg_attack_keyed(const etcimg_image* cipher, uint64_t key, const etcimg_sidecar* sidecar,
                                             int orientation_search, etcimg_attack_report* report,
                                             etcimg_image** assembled);

/* Exhaustive search over block permutations for scramble-only configs (at
 * most 10 blocks). Up to max_candidates permutations of n_blocks entries are
 * written row by row into `candidates`. */
ETCIMG_API etcimg_status etcimg_brute_force_scramble(const etcimg_image* plain, const etcimg_image* cipher,
                                                     const etcimg_cipher_config* cfg, uint32_t* candidates,
                                                     size_t max_candidates, size_t* n_candidates,
                                                     uint64_t* n_checked);

/* ---- template protection ----------------------------------------------- */

/* CSV "client_id,label,v0,...". */
ETCIMG_API etcimg_status etcimg_templates_load(const char* path, etcimg_templates** out);
ETCIMG_API etcimg_status etcimg_templates_save(const etcimg_templates* set, const char* path);
/* One template per sample; labels may be NULL. */
ETCIMG_API etcimg_status etcimg_templates_extract(const etcimg_image* const* samples, size_t n_samples, size_t dim,
                                                  int64_t client_id, const int64_t* labels, etcimg_templates** out);
ETCIMG_API size_t etcimg_templates_count(const etcimg_templates* set);
ETCIMG_API size_t etcimg_templates_dim(const etcimg_templates* set);
ETCIMG_API void etcimg_templates_free(etcimg_templates* set);

ETCIMG_API etcimg_status etcimg_protect(const etcimg_templates* set, uint64_t key, etcimg_protected** out);

ETCIMG_API etcimg_status etcimg_protected_load(const char* path, etcimg_protected** out);
ETCIMG_API etcimg_status etcimg_protected_save(const etcimg_protected* set, const char* path);
ETCIMG_API size_t etcimg_protected_count(const etcimg_protected* set);
ETCIMG_API void etcimg_protected_free(etcimg_protected* set);

/* Server side: nearest-centroid model over protected templates. */
ETCIMG_API etcimg_status etcimg_enroll(const etcimg_protected* set, etcimg_model** out);
/* CSV "label,v0,...", one centroid per row. */
ETCIMG_API etcimg_status etcimg_model_load(const char* path, etcimg_model** out);
ETCIMG_API etcimg_status etcimg_model_save(const etcimg_model* model, const char* path);
ETCIMG_API size_t etcimg_model_classes(const etcimg_model* model);
ETCIMG_API void etcimg_model_free(etcimg_model* model);

/* Writes one label and distance per query (arrays of etcimg_protected_count(queries)). */
ETCIMG_API etcimg_status etcimg_classify(const etcimg_model* model, const etcimg_protected* queries,
                                         int64_t* labels, double* distances);

#ifdef __cplusplus
}
#endif

#endif /* ETCIMG_H */
