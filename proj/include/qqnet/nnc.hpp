#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qqnet {

enum class Metric { Euclidean, EuclideanStandardized };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric m);

/// One-nearest-neighbour classifier over fixed-length feature vectors.
/// The standardised metric z-scores every dimension with the training mean
/// and standard deviation (floored at 1e-12). Ties go to the lowest
/// training index.
class NearestNeighbour {
 public:
  NearestNeighbour(std::vector<std::vector<double>> features, std::vector<std::string> labels,
                   Metric metric);

  const std::string& classify(std::span<const double> query) const;
  /// Index of the nearest training item.
  std::size_t nearest(std::span<const double> query) const;

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  double distance2(std::span<const double> a, std::span<const double> b) const;

  std::vector<std::vector<double>> features_;
  std::vector<std::string> labels_;
  Metric metric_;
  std::size_t dim_ = 0;
  std::vector<double> inv_std_;  // 1/std per dimension (standardised metric)
};

struct LabeledVector {
  std::span<const double> values;
  std::string label;
};

/// Label of the minimal-distance training item.
std::string nnc_classify(std::span<const LabeledVector> train, std::span<const double> query,
                         Metric metric = Metric::EuclideanStandardized);

}  // namespace qqnet
