/* Exercises the public C header from a C translation unit. */
#include <etcimg.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: EXPECT(%s) failed (%s)\n", __FILE__,    \
              __LINE__, #cond, etcimg_last_error());                  \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static etcimg_image* pattern(int w, int h) {
  uint8_t* px = malloc((size_t)w * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) px[((size_t)y * w + x) * 3 + c] = (uint8_t)((7 * x + 13 * y + 51 * c + x * y) % 256);
  etcimg_image* img = NULL;
  EXPECT(etcimg_image_create(w, h, 3, px, &img) == ETCIMG_OK);
  free(px);
  return img;
}

static void test_keys(void) {
  uint64_t key = 0;
  char hex[17];
  EXPECT(etcimg_key_parse("0123456789abcdef", &key) == ETCIMG_OK);
  EXPECT(key == 0x0123456789abcdefull);
  etcimg_key_format(key, hex);
  EXPECT(strcmp(hex, "0123456789abcdef") == 0);
  EXPECT(etcimg_key_parse("xyz", &key) == ETCIMG_ERR_ARGUMENT);
  EXPECT(strlen(etcimg_last_error()) > 0);

  unsigned steps = 0;
  EXPECT(etcimg_steps_parse("s,c", &steps) == ETCIMG_OK);
  EXPECT(steps == (ETCIMG_STEP_SCRAMBLE | ETCIMG_STEP_COLOR_SHUFFLE));

  double bits = 0;
  EXPECT(etcimg_keyspace_bits(4, ETCIMG_STEP_SCRAMBLE, ETCIMG_SCHEME_COLOR, &bits) == ETCIMG_OK);
  EXPECT(fabs(bits - 4.584962500721156) < 1e-12);
  EXPECT(etcimg_keyspace_bits(4, ETCIMG_STEPS_ALL, ETCIMG_SCHEME_GRAY, &bits) == ETCIMG_ERR_ARGUMENT);
}

static void test_cipher(void) {
  etcimg_image* img = pattern(40, 24);
  etcimg_cipher_config cfg = etcimg_default_config(ETCIMG_SCHEME_COLOR);
  EXPECT(cfg.block_size == 16 && cfg.steps == ETCIMG_STEPS_ALL);

  etcimg_image* cipher = NULL;
  etcimg_sidecar* sc = NULL;
  EXPECT(etcimg_encrypt(img, 42, &cfg, 0, &cipher, &sc) == ETCIMG_ERR_DATA);
  EXPECT(etcimg_encrypt(img, 42, &cfg, 1, &cipher, &sc) == ETCIMG_OK);
  EXPECT(etcimg_image_width(cipher) == 48 && etcimg_image_height(cipher) == 32);

  etcimg_buffer* text = NULL;
  EXPECT(etcimg_sidecar_serialize(sc, &text) == ETCIMG_OK);
  char* copy = calloc(etcimg_buffer_size(text) + 1, 1);
  memcpy(copy, etcimg_buffer_data(text), etcimg_buffer_size(text));
  etcimg_sidecar* sc2 = NULL;
  EXPECT(etcimg_sidecar_parse(copy, &sc2) == ETCIMG_OK);
  etcimg_cipher_config back;
  etcimg_sidecar_config(sc2, &back);
  EXPECT(back.block_size == 16 && back.scheme == ETCIMG_SCHEME_COLOR);

  etcimg_image* plain = NULL;
  EXPECT(etcimg_decrypt(cipher, 42, sc2, &plain) == ETCIMG_OK);
  EXPECT(etcimg_image_equal(plain, img));
  double db = 0;
  EXPECT(etcimg_psnr(plain, img, &db) == ETCIMG_OK && isinf(db));

  etcimg_image* wrong = NULL;
  EXPECT(etcimg_decrypt(cipher, 43, sc2, &wrong) == ETCIMG_OK);
  EXPECT(!etcimg_image_equal(wrong, img));

  EXPECT(etcimg_sidecar_parse("garbage", &sc2) != ETCIMG_OK);
  EXPECT(etcimg_encrypt(NULL, 1, &cfg, 0, &cipher, &sc) == ETCIMG_ERR_ARGUMENT);

  etcimg_image_free(wrong);
  etcimg_image_free(plain);
  etcimg_sidecar_free(sc2);
  free(copy);
  etcimg_buffer_free(text);
  etcimg_sidecar_free(sc);
  etcimg_image_free(cipher);
  etcimg_image_free(img);
}

static void test_ppm(void) {
  const uint8_t bytes[] = {'P', '5', '\n', '1', ' ', '1', '\n', '2', '5', '5', '\n', 7};
  etcimg_image* img = NULL;
  EXPECT(etcimg_image_decode_ppm(bytes, sizeof bytes, &img) == ETCIMG_OK);
  EXPECT(etcimg_image_channels(img) == 1 && etcimg_image_data(img)[0] == 7);
  etcimg_buffer* out = NULL;
  EXPECT(etcimg_image_encode_ppm(img, &out) == ETCIMG_OK);
  EXPECT(etcimg_buffer_size(out) == sizeof bytes && memcmp(etcimg_buffer_data(out), bytes, sizeof bytes) == 0);
  EXPECT(etcimg_image_decode_ppm(bytes, 5, &img) == ETCIMG_ERR_DATA);
  EXPECT(etcimg_image_load("/nonexistent/x.ppm", &img) == ETCIMG_ERR_IO);
  etcimg_buffer_free(out);
  etcimg_image_free(img);
}

static void test_jpeg(void) {
  etcimg_image* img = pattern(64, 64);
  etcimg_codec_params p = etcimg_default_codec_params();
  EXPECT(p.quality == 85 && p.subsampling == 420 && p.fancy_upsampling == 0);
  etcimg_buffer* jpeg = NULL;
  EXPECT(etcimg_jpeg_encode(img, &p, &jpeg) == ETCIMG_OK);
  etcimg_image* dec = NULL;
  EXPECT(etcimg_jpeg_decode(etcimg_buffer_data(jpeg), etcimg_buffer_size(jpeg), &p, &dec) == ETCIMG_OK);
  EXPECT(etcimg_image_width(dec) == 64);
  etcimg_buffer* again = NULL;
  EXPECT(etcimg_provider_recompress(etcimg_buffer_data(jpeg), etcimg_buffer_size(jpeg), 70, 0, &again) == ETCIMG_OK);
  const uint8_t junk[] = {0xFF, 0xD8, 0xFF};
  EXPECT(etcimg_jpeg_decode(junk, sizeof junk, &p, &dec) == ETCIMG_ERR_CODEC);
  p.subsampling = 422;
  EXPECT(etcimg_jpeg_encode(img, &p, &jpeg) == ETCIMG_ERR_ARGUMENT);

  etcimg_cipher_config cfg = etcimg_default_config(ETCIMG_SCHEME_COLOR);
  cfg.steps = 0;
  const int qs[] = {50, 90};
  etcimg_rd_point plain[2], enc[2];
  p = etcimg_default_codec_params();
  EXPECT(etcimg_rd_curve(img, 1, &cfg, qs, 2, &p, plain, enc) == ETCIMG_OK);
  EXPECT(plain[1].psnr_db == enc[1].psnr_db && plain[0].bpp == enc[0].bpp);
  etcimg_buffer* csv = NULL;
  EXPECT(etcimg_rd_csv(plain, enc, 2, &csv) == ETCIMG_OK);
  EXPECT(strncmp((const char*)etcimg_buffer_data(csv), "path,quality,bpp,psnr_db\nplain,50,", 34) == 0);

  etcimg_buffer_free(csv);
  etcimg_buffer_free(again);
  etcimg_image_free(dec);
  etcimg_buffer_free(jpeg);
  etcimg_image_free(img);
}

static void test_attack(void) {
  etcimg_image* img = pattern(32, 32);
  etcimg_cipher_config cfg = {ETCIMG_SCHEME_COLOR, 16, ETCIMG_STEP_SCRAMBLE};
  etcimg_image* cipher = NULL;
  etcimg_sidecar* sc = NULL;
  EXPECT(etcimg_encrypt(img, 5, &cfg, 0, &cipher, &sc) == ETCIMG_OK);

  etcimg_attack_report r, rk;
  etcimg_image* assembled = NULL;
  EXPECT(etcimg_attack(cipher, img, 16, 0, &r, &assembled) == ETCIMG_OK);
  EXPECT(r.n_pieces == 4 && etcimg_image_width(assembled) == 32);
  EXPECT(etcimg_attack_keyed(cipher, 5, sc, 0, &rk, NULL) == ETCIMG_OK);
  EXPECT(r.dc == rk.dc && r.nc == rk.nc && r.lc == rk.lc);

  uint32_t perms[4 * 2];
  size_t n = 0;
  uint64_t checked = 0;
  EXPECT(etcimg_brute_force_scramble(img, cipher, &cfg, perms, 2, &n, &checked) == ETCIMG_OK);
  EXPECT(n == 1 && checked <= 24);

  etcimg_image* gray = NULL;
  etcimg_sidecar* gsc = NULL;
  etcimg_cipher_config gcfg = etcimg_default_config(ETCIMG_SCHEME_GRAY);
  EXPECT(etcimg_encrypt(img, 5, &gcfg, 0, &gray, &gsc) == ETCIMG_OK);
  EXPECT(etcimg_attack(gray, img, 8, 0, &r, NULL) == ETCIMG_OK);
  EXPECT(r.n_pieces == 48);
  EXPECT(etcimg_attack(gray, img, 16, 0, &r, NULL) == ETCIMG_ERR_DATA);

  etcimg_sidecar_free(gsc);
  etcimg_image_free(gray);
  etcimg_image_free(assembled);
  etcimg_sidecar_free(sc);
  etcimg_image_free(cipher);
  etcimg_image_free(img);
}

static void test_templates(void) {
  etcimg_image* samples[4];
  int64_t labels[4] = {0, 0, 1, 1};
  for (int i = 0; i < 4; ++i) {
    uint8_t px[16 * 16];
    for (int k = 0; k < 16 * 16; ++k) px[k] = (uint8_t)(i < 2 ? 20 + i * 3 + k % 5 : 200 - i * 3 - k % 7);
    EXPECT(etcimg_image_create(16, 16, 1, px, &samples[i]) == ETCIMG_OK);
  }
  etcimg_templates* t = NULL;
  EXPECT(etcimg_templates_extract((const etcimg_image* const*)samples, 4, 16, 3, labels, &t) == ETCIMG_OK);
  EXPECT(etcimg_templates_count(t) == 4 && etcimg_templates_dim(t) == 16);

  etcimg_protected* p = NULL;
  EXPECT(etcimg_protect(t, 99, &p) == ETCIMG_OK);
  etcimg_model* m = NULL;
  EXPECT(etcimg_enroll(p, &m) == ETCIMG_OK);
  EXPECT(etcimg_model_classes(m) == 2);
  int64_t out[4];
  double dist[4];
  EXPECT(etcimg_classify(m, p, out, dist) == ETCIMG_OK);
  for (int i = 0; i < 4; ++i) EXPECT(out[i] == labels[i]);

  for (int i = 0; i < 4; ++i) etcimg_image_free(samples[i]);
  etcimg_model_free(m);
  etcimg_protected_free(p);
  etcimg_templates_free(t);
}

int main(void) {
  EXPECT(etcimg_sidecar_format_version() == 1);
  EXPECT(strlen(etcimg_version()) > 0);
  test_keys();
  test_cipher();
  test_ppm();
  test_jpeg();
  test_attack();
  test_templates();
  /* Free functions accept NULL. */
  etcimg_image_free(NULL);
  etcimg_buffer_free(NULL);
  etcimg_model_free(NULL);
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  puts("capi: all checks passed");
  return 0;
}
