#pragma once

// Learnable encryption for template-based recognition.
//
// A client extracts a feature vector (template) from each sample and
// protects it with a keyed random orthogonal matrix Q before upload. Q is an
// isometry, so Euclidean distances and therefore nearest-centroid decisions
// are the same in the protected domain as in the plain one. The server side
// (enroll, classify) only ever sees ProtectedTemplate values and never a key.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etcimg/image.hpp"
#include "etcimg/keyschedule.hpp"

namespace etcimg {

struct TemplateFields {
  std::vector<double> values;
  std::optional<std::int64_t> label;
  std::int64_t client_id = 0;
};

struct Template : TemplateFields {};
struct ProtectedTemplate : TemplateFields {};

/// Grayscale cell means over a near-square grid of d cells, scaled to [0, 1].
Template extract_template(const Image& sample, std::size_t d, std::int64_t client_id = 0,
                          std::optional<std::int64_t> label = std::nullopt);

/// d x d orthogonal matrix drawn from a key.
///
/// Entries are standard normals from the key's template stream (Box-Muller on
/// consecutive draws, u = (draw + 1) / 2^64, filled row-major). Columns are
/// then orthonormalized left to right by modified Gram-Schmidt, and each
/// column is negated if needed so the diagonal is non-negative.
class OrthogonalTransform {
 public:
  static OrthogonalTransform from_key(MasterKey key, std::size_t d);

  std::size_t dim() const noexcept { return dim_; }
  double at(std::size_t row, std::size_t col) const { return q_[row * dim_ + col]; }
  std::vector<double> apply(std::span<const double> x) const;

 private:
  OrthogonalTransform(std::size_t dim, std::vector<double> q) : dim_(dim), q_(std::move(q)) {}

  std::size_t dim_;
  std::vector<double> q_;  // row-major
};

ProtectedTemplate protect_template(const Template& t, MasterKey key);
std::vector<ProtectedTemplate> protect_templates(std::span<const Template> ts, MasterKey key);

struct Prediction {
  std::int64_t label = 0;
  double distance = 0.0;
};

class CentroidModel {
 public:
  CentroidModel() = default;
  /// Per-class means. Needs at least two classes and equal dimensions.
  static CentroidModel fit(std::span<const std::vector<double>> vectors, std::span<const std::int64_t> labels);
  static CentroidModel from_centroids(std::vector<std::int64_t> labels, std::vector<std::vector<double>> centroids);

  /// Nearest centroid by Euclidean distance, ties to the lowest label.
  Prediction nearest(std::span<const double> x) const;

  const std::vector<std::int64_t>& labels() const noexcept { return labels_; }
  const std::vector<std::vector<double>>& centroids() const noexcept { return centroids_; }
  std::size_t dim() const noexcept { return centroids_.empty() ? 0 : centroids_.front().size(); }
  bool empty() const noexcept { return labels_.empty(); }

 private:
  std::vector<std::int64_t> labels_;  // ascending
  std::vector<std::vector<double>> centroids_;
};

CentroidModel enroll(std::span<const ProtectedTemplate> templates);
Prediction classify(const ProtectedTemplate& query, const CentroidModel& model);

// Template CSV: header "client_id,label,v0,...,v{d-1}", empty label when absent,
// values printed with 17 significant digits.
std::string templates_to_csv(std::span<const Template> ts);
std::string templates_to_csv(std::span<const ProtectedTemplate> ts);
std::vector<Template> templates_from_csv(std::string_view csv);
std::vector<ProtectedTemplate> protected_from_csv(std::string_view csv);

// Model CSV: header "label,v0,...,v{d-1}", one centroid per row.
std::string model_to_csv(const CentroidModel& model);
CentroidModel model_from_csv(std::string_view csv);

}  // namespace etcimg
