// etcimg: command-line front end over the C API.
#include <etcimg.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kCodec = 3 };

// Carries a status out of a subcommand body to main's exit-code mapping.
struct Failure {
  int code;
  std::string message;
};

int exit_code(etcimg_status st) {
  switch (st) {
    case ETCIMG_OK: return kOk;
    case ETCIMG_ERR_ARGUMENT: return kUsage;
    case ETCIMG_ERR_CODEC: return kCodec;
    default: return kData;
  }
}

void check(etcimg_status st) {
  if (st != ETCIMG_OK) throw Failure{exit_code(st), etcimg_last_error()};
}

[[noreturn]] void usage(const std::string& msg) { throw Failure{kUsage, msg}; }

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ImagePtr = std::unique_ptr<etcimg_image, Deleter<etcimg_image, etcimg_image_free>>;
using SidecarPtr = std::unique_ptr<etcimg_sidecar, Deleter<etcimg_sidecar, etcimg_sidecar_free>>;
using BufferPtr = std::unique_ptr<etcimg_buffer, Deleter<etcimg_buffer, etcimg_buffer_free>>;
using TemplatesPtr = std::unique_ptr<etcimg_templates, Deleter<etcimg_templates, etcimg_templates_free>>;
using ProtectedPtr = std::unique_ptr<etcimg_protected, Deleter<etcimg_protected, etcimg_protected_free>>;
using ModelPtr = std::unique_ptr<etcimg_model, Deleter<etcimg_model, etcimg_model_free>>;

ImagePtr load_image(const std::string& path) {
  etcimg_image* img = nullptr;
  check(etcimg_image_load(path.c_str(), &img));
  return ImagePtr(img);
}

std::vector<uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kData, "cannot open " + path};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const uint8_t* data, size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size))) {
    throw Failure{kData, "cannot write " + path};
  }
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
  } else {
    write_bytes(path, reinterpret_cast<const uint8_t*>(text.data()), text.size());
  }
}

std::string steps_string(unsigned bits) {
  static const char* names[] = {"s", "r", "n", "c"};
  std::string out;
  for (int i = 0; i < 4; ++i) {
    if (!(bits & (1u << i))) continue;
    if (!out.empty()) out += ',';
    out += names[i];
  }
  return out;
}

struct KeyOptions {
  std::string hex;
  std::string file;

  void add(CLI::App* cmd) {
    auto* k = cmd->add_option("--key", hex, "Master key, 16 hex digits");
    auto* f = cmd->add_option("--key-file", file, "File holding the master key");
    k->excludes(f);
  }

  bool given() const { return !hex.empty() || !file.empty(); }

  uint64_t resolve() const {
    if (!given()) usage("a key is required: pass --key HEX or --key-file PATH");
    std::string text = hex;
    if (!file.empty()) {
      const auto bytes = read_bytes(file);
      text.assign(bytes.begin(), bytes.end());
    }
    uint64_t key = 0;
    const etcimg_status st = etcimg_key_parse(text.c_str(), &key);
    if (st != ETCIMG_OK) usage(etcimg_last_error());
    return key;
  }
};

struct ConfigOptions {
  std::string scheme = "color";
  int block_size = 0;
  std::string steps;
  bool steps_given = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--scheme", scheme, "color or gray")->capture_default_str();
    cmd->add_option("--block-size", block_size, "Block side in pixels (default 16 color, 8 gray)");
    cmd->add_option("--steps", steps, "Subset of s,r,n,c (default: all for the scheme)")
        ->each([this](const std::string&) { steps_given = true; });
  }

  etcimg_cipher_config resolve() const {
    etcimg_scheme s = ETCIMG_SCHEME_COLOR;
    if (etcimg_scheme_parse(scheme.c_str(), &s) != ETCIMG_OK) usage(etcimg_last_error());
    etcimg_cipher_config cfg = etcimg_default_config(s);
    if (block_size != 0) cfg.block_size = block_size;
    if (steps_given && etcimg_steps_parse(steps.c_str(), &cfg.steps) != ETCIMG_OK) usage(etcimg_last_error());
    return cfg;
  }
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage("bad integer list '" + text + "'");
    }
  }
  if (out.empty()) usage("empty integer list");
  return out;
}

int parse_subsampling(const std::string& s, bool allow_keep) {
  if (s == "420") return 420;
  if (s == "444") return 444;
  if (allow_keep && s == "keep") return 0;
  usage("subsampling must be 420 or 444" + std::string(allow_keep ? " or keep" : ""));
}

std::string format_row(const char* fmt, double a, double b, double c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block scrambling-based image encryption for Encryption-then-Compression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", [] { return "etcimg " + std::string(etcimg_version()) +
                                                "\nsidecar format " + std::to_string(etcimg_sidecar_format_version()); });

  // encrypt
  auto* enc = app.add_subcommand("encrypt", "Encrypt a PPM image; writes the ciphertext and a sidecar");
  KeyOptions enc_key;
  ConfigOptions enc_cfg;
  std::string enc_in, enc_out, enc_sidecar;
  bool enc_pad = false;
  enc_key.add(enc);
  enc_cfg.add(enc);
  enc->add_option("--in", enc_in, "Plaintext PPM/PGM")->required();
  enc->add_option("--out", enc_out, "Ciphertext PPM/PGM")->required();
  enc->add_option("--sidecar", enc_sidecar, "Sidecar path (default: <out>.sidecar)");
  enc->add_flag("--pad", enc_pad, "Edge-replicate to a multiple of the block size");

  // keygen
  auto* kg = app.add_subcommand("keygen", "Write a fresh random master key (use one per image)");
  std::string kg_out;
  kg->add_option("--out", kg_out, "Key file (default stdout)");

  // decrypt
  auto* dec = app.add_subcommand("decrypt", "Decrypt a ciphertext with its sidecar");
  KeyOptions dec_key;
  std::string dec_in, dec_out, dec_sidecar;
  dec_key.add(dec);
  dec->add_option("--in", dec_in, "Ciphertext PPM/PGM")->required();
  dec->add_option("--out", dec_out, "Recovered PPM")->required();
  dec->add_option("--sidecar", dec_sidecar, "Sidecar path (default: <in>.sidecar)");

  // compress / decompress
  auto* cmp = app.add_subcommand("compress", "JPEG-encode a PPM/PGM image");
  std::string cmp_in, cmp_out, cmp_sub = "420";
  int cmp_quality = 85;
  bool cmp_progressive = false;
  cmp->add_option("--in", cmp_in)->required();
  cmp->add_option("--out", cmp_out)->required();
  cmp->add_option("--quality", cmp_quality)->capture_default_str();
  cmp->add_option("--subsampling", cmp_sub, "420 or 444")->capture_default_str();
  cmp->add_flag("--progressive", cmp_progressive);

  auto* dcm = app.add_subcommand("decompress", "Decode a JPEG to PPM/PGM");
  std::string dcm_in, dcm_out;
  bool dcm_fancy = false;
  dcm->add_option("--in", dcm_in)->required();
  dcm->add_option("--out", dcm_out)->required();
  dcm->add_flag("--fancy-upsampling", dcm_fancy, "Interpolate chroma instead of replicating it");

  // recompress
  auto* rec = app.add_subcommand("recompress", "Simulate a provider decoding and re-encoding an upload");
  std::string rec_in, rec_out, rec_profiles, rec_profile, rec_sub = "keep";
  int rec_quality = 0, rec_generations = 1;
  rec->add_option("--in", rec_in, "Uploaded JPEG")->required();
  rec->add_option("--out", rec_out, "JPEG as served back")->required();
  rec->add_option("--profiles", rec_profiles, "Provider profile CSV");
  rec->add_option("--profile", rec_profile, "Profile name in --profiles");
  rec->add_option("--quality", rec_quality, "Recompression quality (instead of a profile)");
  rec->add_option("--subsampling", rec_sub, "420, 444 or keep")->capture_default_str();
  rec->add_option("--generations", rec_generations, "Number of recompression passes")->capture_default_str();

  // rd-curve
  auto* rd = app.add_subcommand("rd-curve", "Rate-distortion CSV for plain and encrypted paths");
  KeyOptions rd_key;
  ConfigOptions rd_cfg;
  std::string rd_in, rd_out, rd_qualities = "50,70,85,95", rd_sub = "420";
  bool rd_fancy = false;
  rd_key.add(rd);
  rd_cfg.add(rd);
  rd->add_option("--in", rd_in, "Plaintext PPM")->required();
  rd->add_option("--out", rd_out, "CSV path (default stdout)");
  rd->add_option("--qualities", rd_qualities, "Comma list of JPEG qualities")->capture_default_str();
  rd->add_option("--subsampling", rd_sub, "420 or 444")->capture_default_str();
  rd->add_flag("--fancy-upsampling", rd_fancy, "Interpolate chroma on decode");

  // attack
  auto* atk = app.add_subcommand("attack", "Reassemble a ciphertext as a jigsaw puzzle and score it");
  KeyOptions atk_key;
  std::string atk_in, atk_plain, atk_sidecar, atk_report, atk_assembled;
  int atk_block = 0;
  bool atk_orient = false;
  atk_key.add(atk);
  atk->add_option("--in", atk_in, "Ciphertext PPM/PGM")->required();
  atk->add_option("--plain", atk_plain, "Plaintext for ground truth by block matching");
  atk->add_option("--sidecar", atk_sidecar, "Sidecar; with --key gives ground truth from the key");
  atk->add_option("--block-size", atk_block, "Piece size (default: the sidecar's)");
  atk->add_flag("--orientation-search", atk_orient, "Let the solver try all 8 orientations per piece");
  atk->add_option("--report", atk_report, "CSV report path (default stdout)");
  atk->add_option("--assembled", atk_assembled, "Write the assembled image here");

  // keyspace
  auto* ks = app.add_subcommand("keyspace", "Key-space size in bits for a geometry and step set");
  ConfigOptions ks_cfg;
  int ks_w = 0, ks_h = 0;
  ks_cfg.add(ks);
  ks->add_option("--width", ks_w)->required();
  ks->add_option("--height", ks_h)->required();

  // bruteforce
  auto* bf = app.add_subcommand("bruteforce", "Known-plaintext search over block permutations (scramble-only)");
  std::string bf_plain, bf_cipher;
  int bf_block = 16;
  bf->add_option("--plain", bf_plain)->required();
  bf->add_option("--cipher", bf_cipher)->required();
  bf->add_option("--block-size", bf_block)->capture_default_str();

  // extract
  auto* ext = app.add_subcommand("extract", "Block-mean templates from sample images");
  std::vector<std::string> ext_in;
  std::vector<int64_t> ext_labels;
  std::string ext_out;
  size_t ext_dim = 16;
  int64_t ext_client = 0;
  ext->add_option("--in", ext_in, "Sample images")->required();
  ext->add_option("--labels", ext_labels, "One class label per sample");
  ext->add_option("--dim", ext_dim)->capture_default_str();
  ext->add_option("--client-id", ext_client)->capture_default_str();
  ext->add_option("--out", ext_out, "Template CSV (default stdout)");

  // protect
  auto* pro = app.add_subcommand("protect", "Apply the keyed orthogonal transform to a template CSV");
  KeyOptions pro_key;
  std::string pro_in, pro_out;
  pro_key.add(pro);
  pro->add_option("--in", pro_in, "Template CSV")->required();
  pro->add_option("--out", pro_out, "Protected CSV")->required();

  // enroll
  auto* enr = app.add_subcommand("enroll", "Fit a nearest-centroid model on protected templates");
  std::string enr_in, enr_out;
  enr->add_option("--in", enr_in, "Labelled protected CSV")->required();
  enr->add_option("--model", enr_out, "Model CSV")->required();

  // classify
  auto* cls = app.add_subcommand("classify", "Classify protected queries against a model");
  std::string cls_model, cls_in, cls_out;
  cls->add_option("--model", cls_model, "Model CSV")->required();
  cls->add_option("--in", cls_in, "Protected query CSV")->required();
  cls->add_option("--out", cls_out, "Result CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*kg) {
      std::random_device rd;
      const uint64_t key = (static_cast<uint64_t>(rd()) << 32) ^ rd();
      char hex[17];
      etcimg_key_format(key, hex);
      emit(kg_out, std::string(hex) + "\n");
    } else if (*enc) {
      const uint64_t key = enc_key.resolve();
      const etcimg_cipher_config cfg = enc_cfg.resolve();
      ImagePtr img = load_image(enc_in);
      etcimg_image* c = nullptr;
      etcimg_sidecar* s = nullptr;
      check(etcimg_encrypt(img.get(), key, &cfg, enc_pad ? 1 : 0, &c, &s));
      ImagePtr cipher(c);
      SidecarPtr sidecar(s);
      check(etcimg_image_save(cipher.get(), enc_out.c_str()));
      check(etcimg_sidecar_save(sidecar.get(), (enc_sidecar.empty() ? enc_out + ".sidecar" : enc_sidecar).c_str()));
    } else if (*dec) {
      const uint64_t key = dec_key.resolve();
      ImagePtr cipher = load_image(dec_in);
      etcimg_sidecar* s = nullptr;
      check(etcimg_sidecar_load((dec_sidecar.empty() ? dec_in + ".sidecar" : dec_sidecar).c_str(), &s));
      SidecarPtr sidecar(s);
      etcimg_image* p = nullptr;
      check(etcimg_decrypt(cipher.get(), key, sidecar.get(), &p));
      ImagePtr plain(p);
      check(etcimg_image_save(plain.get(), dec_out.c_str()));
    } else if (*cmp) {
      etcimg_codec_params params = etcimg_default_codec_params();
      params.quality = cmp_quality;
      params.subsampling = parse_subsampling(cmp_sub, false);
      params.progressive = cmp_progressive ? 1 : 0;
      ImagePtr img = load_image(cmp_in);
      etcimg_buffer* b = nullptr;
      check(etcimg_jpeg_encode(img.get(), &params, &b));
      BufferPtr jpeg(b);
      write_bytes(cmp_out, etcimg_buffer_data(jpeg.get()), etcimg_buffer_size(jpeg.get()));
    } else if (*dcm) {
      etcimg_codec_params params = etcimg_default_codec_params();
      params.fancy_upsampling = dcm_fancy ? 1 : 0;
      const auto bytes = read_bytes(dcm_in);
      etcimg_image* i = nullptr;
      check(etcimg_jpeg_decode(bytes.data(), bytes.size(), &params, &i));
      ImagePtr img(i);
      check(etcimg_image_save(img.get(), dcm_out.c_str()));
    } else if (*rec) {
      int quality = rec_quality;
      int sub = parse_subsampling(rec_sub, true);
      if (!rec_profile.empty()) {
        if (rec_profiles.empty()) usage("--profile needs --profiles");
        if (rec_quality != 0) usage("--quality and --profile are exclusive");
        check(etcimg_profile_lookup(rec_profiles.c_str(), rec_profile.c_str(), &quality, &sub));
      } else if (quality == 0) {
        usage("pass --quality or --profiles with --profile");
      }
      if (rec_generations < 1) usage("--generations must be >= 1");
      std::vector<uint8_t> bytes = read_bytes(rec_in);
      for (int g = 0; g < rec_generations; ++g) {
        etcimg_buffer* b = nullptr;
        check(etcimg_provider_recompress(bytes.data(), bytes.size(), quality, sub, &b));
        BufferPtr out(b);
        bytes.assign(etcimg_buffer_data(out.get()), etcimg_buffer_data(out.get()) + etcimg_buffer_size(out.get()));
      }
      write_bytes(rec_out, bytes.data(), bytes.size());
    } else if (*rd) {
      const uint64_t key = rd_key.resolve();
      const etcimg_cipher_config cfg = rd_cfg.resolve();
      const std::vector<int> qualities = parse_int_list(rd_qualities);
      etcimg_codec_params params = etcimg_default_codec_params();
      params.subsampling = parse_subsampling(rd_sub, false);
      params.fancy_upsampling = rd_fancy ? 1 : 0;
      ImagePtr img = load_image(rd_in);
      std::vector<etcimg_rd_point> plain(qualities.size()), encrypted(qualities.size());
      check(etcimg_rd_curve(img.get(), key, &cfg, qualities.data(), qualities.size(), &params, plain.data(),
                            encrypted.data()));
      etcimg_buffer* b = nullptr;
      check(etcimg_rd_csv(plain.data(), encrypted.data(), qualities.size(), &b));
      BufferPtr csv(b);
      emit(rd_out, std::string(reinterpret_cast<const char*>(etcimg_buffer_data(csv.get())), etcimg_buffer_size(csv.get())));
    } else if (*atk) {
      ImagePtr cipher = load_image(atk_in);
      SidecarPtr sidecar;
      std::string steps = "";
      if (!atk_sidecar.empty()) {
        etcimg_sidecar* s = nullptr;
        check(etcimg_sidecar_load(atk_sidecar.c_str(), &s));
        sidecar.reset(s);
        etcimg_cipher_config cfg{};
        etcimg_sidecar_config(sidecar.get(), &cfg);
        steps = steps_string(cfg.steps);
        if (atk_block == 0) atk_block = cfg.block_size;
      }
      etcimg_attack_report report{};
      etcimg_image* assembled = nullptr;
      etcimg_image** want = atk_assembled.empty() ? nullptr : &assembled;
      if (!atk_plain.empty()) {
        if (atk_block == 0) usage("--block-size is required without --sidecar");
        ImagePtr plain = load_image(atk_plain);
        check(etcimg_attack(cipher.get(), plain.get(), atk_block, atk_orient ? 1 : 0, &report, want));
      } else if (sidecar && atk_key.given()) {
        if (atk_block != 0) {
          etcimg_cipher_config cfg{};
          etcimg_sidecar_config(sidecar.get(), &cfg);
          if (cfg.block_size != atk_block) usage("--block-size disagrees with the sidecar");
        }
        check(etcimg_attack_keyed(cipher.get(), atk_key.resolve(), sidecar.get(), atk_orient ? 1 : 0, &report, want));
      } else {
        usage("ground truth needed: pass --plain, or --sidecar with a key");
      }
      ImagePtr assembled_ptr(assembled);
      if (assembled_ptr) check(etcimg_image_save(assembled_ptr.get(), atk_assembled.c_str()));
      std::string csv = "steps,block_size,n_pieces,dc,nc,lc\n\"" + steps + "\"," + std::to_string(atk_block) + "," +
                        std::to_string(report.n_pieces) + "," + format_row("%.6f,%.6f,%.6f", report.dc, report.nc, report.lc) +
                        "\n";
      emit(atk_report, csv);
      std::fprintf(stderr, "solver time %.3f s\n", report.seconds);
    } else if (*ks) {
      const etcimg_cipher_config cfg = ks_cfg.resolve();
      if (ks_w <= 0 || ks_h <= 0 || cfg.block_size <= 0) usage("width, height and block size must be positive");
      if (ks_w % cfg.block_size != 0 || ks_h % cfg.block_size != 0) usage("image sides must be multiples of the block size");
      size_t n = static_cast<size_t>(ks_w / cfg.block_size) * static_cast<size_t>(ks_h / cfg.block_size);
      // The grayscale-based scheme encrypts the W x 3H plane stack.
      if (cfg.scheme == ETCIMG_SCHEME_GRAY) n *= 3;
      double bits = 0.0;
      check(etcimg_keyspace_bits(n, cfg.steps, cfg.scheme, &bits));
      char line[128];
      std::snprintf(line, sizeof line, "n_blocks=%zu\nkeyspace_bits=%.6f\n", n, bits);
      std::cout << line;
    } else if (*bf) {
      ImagePtr plain = load_image(bf_plain);
      ImagePtr cipher = load_image(bf_cipher);
      etcimg_cipher_config cfg = etcimg_default_config(etcimg_image_channels(plain.get()) == 3 ? ETCIMG_SCHEME_COLOR
                                                                                              : ETCIMG_SCHEME_GRAY);
      cfg.block_size = bf_block;
      cfg.steps = ETCIMG_STEP_SCRAMBLE;
      const size_t n = static_cast<size_t>(etcimg_image_width(plain.get()) / bf_block) *
                       static_cast<size_t>(etcimg_image_height(plain.get()) / bf_block);
      size_t found = 0;
      uint64_t checked = 0;
      check(etcimg_brute_force_scramble(plain.get(), cipher.get(), &cfg, nullptr, 0, &found, &checked));
      std::vector<uint32_t> perms(found * n);
      check(etcimg_brute_force_scramble(plain.get(), cipher.get(), &cfg, perms.data(), found, &found, &checked));
      std::cout << "checked=" << checked << "\ncandidates=" << found << "\n";
      for (size_t i = 0; i < found; ++i) {
        for (size_t j = 0; j < n; ++j) std::cout << (j ? "," : "") << perms[i * n + j];
        std::cout << "\n";
      }
    } else if (*ext) {
      if (!ext_labels.empty() && ext_labels.size() != ext_in.size()) usage("need one --labels entry per --in sample");
      std::vector<ImagePtr> owned;
      std::vector<const etcimg_image*> samples;
      for (const auto& path : ext_in) {
        owned.push_back(load_image(path));
        samples.push_back(owned.back().get());
      }
      etcimg_templates* t = nullptr;
      check(etcimg_templates_extract(samples.data(), samples.size(), ext_dim, ext_client,
                                     ext_labels.empty() ? nullptr : ext_labels.data(), &t));
      TemplatesPtr templates(t);
      if (ext_out.empty() || ext_out == "-") ext_out = "/dev/stdout";
      check(etcimg_templates_save(templates.get(), ext_out.c_str()));
    } else if (*pro) {
      const uint64_t key = pro_key.resolve();
      etcimg_templates* t = nullptr;
      check(etcimg_templates_load(pro_in.c_str(), &t));
      TemplatesPtr templates(t);
      etcimg_protected* p = nullptr;
      check(etcimg_protect(templates.get(), key, &p));
      ProtectedPtr prot(p);
      check(etcimg_protected_save(prot.get(), pro_out.c_str()));
    } else if (*enr) {
      etcimg_protected* p = nullptr;
      check(etcimg_protected_load(enr_in.c_str(), &p));
      ProtectedPtr prot(p);
      etcimg_model* m = nullptr;
      check(etcimg_enroll(prot.get(), &m));
      ModelPtr model(m);
      check(etcimg_model_save(model.get(), enr_out.c_str()));
    } else if (*cls) {
      etcimg_model* m = nullptr;
      check(etcimg_model_load(cls_model.c_str(), &m));
      ModelPtr model(m);
      etcimg_protected* q = nullptr;
      check(etcimg_protected_load(cls_in.c_str(), &q));
      ProtectedPtr queries(q);
      const size_t n = etcimg_protected_count(queries.get());
      std::vector<int64_t> labels(n);
      std::vector<double> distances(n);
      check(etcimg_classify(model.get(), queries.get(), labels.data(), distances.data()));
      std::string csv = "index,label,distance\n";
      char line[96];
      for (size_t i = 0; i < n; ++i) {
        std::snprintf(line, sizeof line, "%zu,%lld,%.17g\n", i, static_cast<long long>(labels[i]), distances[i]);
        csv += line;
      }
      emit(cls_out, csv);
    }
  } catch (const Failure& f) {
    std::cerr << "etcimg: " << f.message << "\n";
    if (f.code == kUsage) std::cerr << "run with --help for usage\n";
    return f.code;
  }
  return kOk;
}
