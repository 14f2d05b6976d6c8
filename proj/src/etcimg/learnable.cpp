#include "etcimg/learnable.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "etcimg/error.hpp"

namespace etcimg {

namespace {

constexpr int kMaxTransformRetries = 16;

std::size_t near_square_rows(std::size_t d) {
  std::size_t best = 1;
  for (std::size_t r = 1; r * r <= d; ++r) {
    if (d % r == 0) best = r;
  }
  return best;
}

// Fills a d x d matrix with standard normals; empty result if a column is
// numerically dependent on the ones before it.
std::vector<double> draw_orthogonal(std::uint64_t seed, std::size_t d) {
  StepStream stream(seed);
  const std::size_t count = d * d;
  std::vector<double> a(count);
  for (std::size_t i = 0; i < count; i += 2) {
    const double u1 = (static_cast<double>(stream.next()) + 1.0) * 0x1p-64;
    const double u2 = (static_cast<double>(stream.next()) + 1.0) * 0x1p-64;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    a[i] = radius * std::cos(angle);
    if (i + 1 < count) a[i + 1] = radius * std::sin(angle);
  }

  // Modified Gram-Schmidt on columns, left to right.
  std::vector<double> q(count);
  std::vector<double> v(d);
  for (std::size_t j = 0; j < d; ++j) {
    double original = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      v[r] = a[r * d + j];
      original += v[r] * v[r];
    }
    for (std::size_t i = 0; i < j; ++i) {
      double dot = 0.0;
      for (std::size_t r = 0; r < d; ++r) dot += q[r * d + i] * v[r];
      for (std::size_t r = 0; r < d; ++r) v[r] -= dot * q[r * d + i];
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < d; ++r) norm += v[r] * v[r];
    norm = std::sqrt(norm);
    if (!(norm > 1e-10 * std::sqrt(original))) return {};
    const double sign = v[j] < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < d; ++r) q[r * d + j] = sign * v[r] / norm;
  }
  return q;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, int line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::Data, "CSV line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

// Calls fn(fields, line_no) for each non-empty line after the header.
template <typename Fn>
void for_each_row(std::string_view csv, std::string_view header_start, Fn fn) {
  int line_no = 0;
  bool seen_header = false;
  std::size_t width = 0;  // field count of the header, when there is one
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    const std::string_view line = trim(csv.substr(0, nl));
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!seen_header) {
      seen_header = true;
      if (line.starts_with(header_start)) {
        width = split_csv_line(line).size();
        continue;
      }
    }
    const auto fields = split_csv_line(line);
    if (width != 0 && fields.size() != width) {
      fail(ErrorKind::Data, "CSV line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " fields");
    }
    fn(fields, line_no);
  }
}

void append_value(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

template <typename T>
std::string to_csv(std::span<const T> ts) {
  const std::size_t d = ts.empty() ? 0 : ts.front().values.size();
  std::string out = "client_id,label";
  for (std::size_t i = 0; i < d; ++i) out += ",v" + std::to_string(i);
  out += '\n';
  for (const auto& t : ts) {
    if (t.values.size() != d) fail(ErrorKind::InvalidArgument, "templates have different dimensions");
    out += std::to_string(t.client_id);
    out += ',';
    if (t.label) out += std::to_string(*t.label);
    for (double v : t.values) {
      out += ',';
      append_value(out, v);
    }
    out += '\n';
  }
  return out;
}

template <typename T>
std::vector<T> from_csv(std::string_view csv) {
  std::vector<T> out;
  for_each_row(csv, "client_id", [&](const std::vector<std::string_view>& f, int line_no) {
    if (f.size() < 3) fail(ErrorKind::Data, "CSV line " + std::to_string(line_no) + ": need client_id,label,v0...");
    T t;
    t.client_id = parse_number<std::int64_t>(f[0], line_no);
    if (!f[1].empty()) t.label = parse_number<std::int64_t>(f[1], line_no);
    for (std::size_t i = 2; i < f.size(); ++i) t.values.push_back(parse_number<double>(f[i], line_no));
    if (!out.empty() && out.front().values.size() != t.values.size()) {
      fail(ErrorKind::Data, "CSV line " + std::to_string(line_no) + ": template dimension mismatch");
    }
    out.push_back(std::move(t));
  });
  return out;
}

}  // namespace

Template extract_template(const Image& sample, std::size_t d, std::int64_t client_id,
                          std::optional<std::int64_t> label) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "template dimension must be >= 1");
  if (d > sample.pixel_count()) fail(ErrorKind::InvalidArgument, "template dimension exceeds the pixel count");
  const auto w = static_cast<std::size_t>(sample.width());
  const auto h = static_cast<std::size_t>(sample.height());
  const std::size_t small = near_square_rows(d);
  const std::size_t large = d / small;
  std::size_t rows = w >= h ? small : large;
  std::size_t cols = w >= h ? large : small;
  if (rows > h || cols > w) std::swap(rows, cols);
  if (rows > h || cols > w) {
    fail(ErrorKind::InvalidArgument, "cannot split a " + std::to_string(w) + "x" + std::to_string(h) + " image into " +
                                         std::to_string(d) + " cells");
  }

  const std::vector<double> y = luma(sample);
  Template t;
  t.client_id = client_id;
  t.label = label;
  t.values.reserve(d);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t y0 = r * h / rows, y1 = (r + 1) * h / rows;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t x0 = c * w / cols, x1 = (c + 1) * w / cols;
      double sum = 0.0;
      for (std::size_t yy = y0; yy < y1; ++yy) {
        for (std::size_t xx = x0; xx < x1; ++xx) sum += y[yy * w + xx];
      }
      t.values.push_back(sum / static_cast<double>((y1 - y0) * (x1 - x0)) / 255.0);
    }
  }
  return t;
}

OrthogonalTransform OrthogonalTransform::from_key(MasterKey key, std::size_t d) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "transform dimension must be >= 1");
  for (int attempt = 0; attempt < kMaxTransformRetries; ++attempt) {
    auto q = draw_orthogonal(derive_step_seed(key, kTagTemplate + static_cast<std::uint32_t>(attempt)), d);
    if (!q.empty()) return OrthogonalTransform(d, std::move(q));
  }
  fail(ErrorKind::Data, "could not draw a full-rank matrix from this key");
}

std::vector<double> OrthogonalTransform::apply(std::span<const double> x) const {
  if (x.size() != dim_) fail(ErrorKind::Data, "template dimension does not match the transform");
  std::vector<double> out(dim_, 0.0);
  for (std::size_t r = 0; r < dim_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) acc += q_[r * dim_ + c] * x[c];
    out[r] = acc;
  }
  return out;
}

ProtectedTemplate protect_template(const Template& t, MasterKey key) {
  if (t.values.empty()) fail(ErrorKind::InvalidArgument, "cannot protect an empty template");
  const auto q = OrthogonalTransform::from_key(key, t.values.size());
  ProtectedTemplate p;
  p.values = q.apply(t.values);
  p.label = t.label;
  p.client_id = t.client_id;
  return p;
}

std::vector<ProtectedTemplate> protect_templates(std::span<const Template> ts, MasterKey key) {
  std::vector<ProtectedTemplate> out;
  if (ts.empty()) return out;
  const auto q = OrthogonalTransform::from_key(key, ts.front().values.size());
  out.reserve(ts.size());
  for (const auto& t : ts) {
    ProtectedTemplate p;
    p.values = q.apply(t.values);
    p.label = t.label;
    p.client_id = t.client_id;
    out.push_back(std::move(p));
  }
  return out;
}

CentroidModel CentroidModel::fit(std::span<const std::vector<double>> vectors, std::span<const std::int64_t> labels) {
  if (vectors.size() != labels.size()) fail(ErrorKind::InvalidArgument, "one label per vector required");
  if (vectors.empty()) fail(ErrorKind::Data, "no templates to enroll");
  const std::size_t d = vectors.front().size();
  std::map<std::int64_t, std::pair<std::vector<double>, std::size_t>> sums;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d || d == 0) fail(ErrorKind::Data, "template dimension mismatch");
    auto& [sum, count] = sums[labels[i]];
    if (sum.empty()) sum.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) sum[k] += vectors[i][k];
    ++count;
  }
  if (sums.size() < 2) fail(ErrorKind::Data, "enrollment needs at least two classes");
  CentroidModel m;
  for (auto& [label, acc] : sums) {
    auto& [sum, count] = acc;
    for (double& v : sum) v /= static_cast<double>(count);
    m.labels_.push_back(label);
    m.centroids_.push_back(std::move(sum));
  }
  return m;
}

CentroidModel CentroidModel::from_centroids(std::vector<std::int64_t> labels, std::vector<std::vector<double>> centroids) {
  if (labels.size() != centroids.size()) fail(ErrorKind::Data, "one label per centroid required");
  std::map<std::int64_t, std::vector<double>> sorted;
  const std::size_t d = centroids.empty() ? 0 : centroids.front().size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (centroids[i].size() != d || d == 0) fail(ErrorKind::Data, "centroid dimension mismatch");
    if (!sorted.emplace(labels[i], std::move(centroids[i])).second) fail(ErrorKind::Data, "duplicate class label");
  }
  CentroidModel m;
  for (auto& [label, c] : sorted) {
    m.labels_.push_back(label);
    m.centroids_.push_back(std::move(c));
  }
  return m;
}

Prediction CentroidModel::nearest(std::span<const double> x) const {
  if (empty()) fail(ErrorKind::Data, "model has no classes");
  if (x.size() != dim()) fail(ErrorKind::Data, "query dimension does not match the model");
  Prediction best{labels_.front(), INFINITY};
  double best_sq = INFINITY;
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double diff = x[k] - centroids_[c][k];
      sq += diff * diff;
    }
    if (sq < best_sq) {
      best_sq = sq;
      best.label = labels_[c];
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

CentroidModel enroll(std::span<const ProtectedTemplate> templates) {
  std::vector<std::vector<double>> vectors;
  std::vector<std::int64_t> labels;
  vectors.reserve(templates.size());
  for (const auto& t : templates) {
    if (!t.label) fail(ErrorKind::Data, "enrollment templates must be labelled");
    vectors.push_back(t.values);
    labels.push_back(*t.label);
  }
  return CentroidModel::fit(vectors, labels);
}

Prediction classify(const ProtectedTemplate& query, const CentroidModel& model) { return model.nearest(query.values); }

std::string templates_to_csv(std::span<const Template> ts) { return to_csv(ts); }
std::string templates_to_csv(std::span<const ProtectedTemplate> ts) { return to_csv(ts); }
std::vector<Template> templates_from_csv(std::string_view csv) { return from_csv<Template>(csv); }
std::vector<ProtectedTemplate> protected_from_csv(std::string_view csv) { return from_csv<ProtectedTemplate>(csv); }

std::string model_to_csv(const CentroidModel& model) {
  std::string out = "label";
  for (std::size_t i = 0; i < model.dim(); ++i) out += ",v" + std::to_string(i);
  out += '\n';
  for (std::size_t c = 0; c < model.labels().size(); ++c) {
    out += std::to_string(model.labels()[c]);
    for (double v : model.centroids()[c]) {
      out += ',';
      append_value(out, v);
    }
    out += '\n';
  }
  return out;
}

CentroidModel model_from_csv(std::string_view csv) {
  std::vector<std::int64_t> labels;
  std::vector<std::vector<double>> centroids;
  for_each_row(csv, "label", [&](const std::vector<std::string_view>& f, int line_no) {
    if (f.size() < 2) fail(ErrorKind::Data, "model line " + std::to_string(line_no) + ": need label,v0...");
    labels.push_back(parse_number<std::int64_t>(f[0], line_no));
    std::vector<double> c;
    for (std::size_t i = 1; i < f.size(); ++i) c.push_back(parse_number<double>(f[i], line_no));
    centroids.push_back(std::move(c));
  });
  return CentroidModel::from_centroids(std::move(labels), std::move(centroids));
}

}  // namespace etcimg
