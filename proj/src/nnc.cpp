#include "qqnet/nnc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qqnet/image.hpp"

namespace qqnet {

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "euclidean_standardized") return Metric::EuclideanStandardized;
  throw InvalidArgument("unknown metric '" + std::string(name) +
                        "' (expected euclidean or euclidean_standardized)");
}

std::string_view metric_name(Metric m) {
  return m == Metric::Euclidean ? "euclidean" : "euclidean_standardized";
}

NearestNeighbour::NearestNeighbour(std::vector<std::vector<double>> features,
                                   std::vector<std::string> labels, Metric metric)
    : features_(std::move(features)), labels_(std::move(labels)), metric_(metric) {
  if (features_.empty()) throw InvalidArgument("nearest neighbour: empty training set");
  if (features_.size() != labels_.size()) {
    throw InvalidArgument("nearest neighbour: feature and label counts differ");
  }
  dim_ = features_.front().size();
  for (const auto& f : features_) {
    if (f.size() != dim_) throw InvalidArgument("nearest neighbour: dimension mismatch");
  }
  if (metric_ == Metric::EuclideanStandardized) {
    const auto n = static_cast<double>(features_.size());
    inv_std_.assign(dim_, 0.0);
    for (std::size_t j = 0; j < dim_; ++j) {
      double mean = 0.0;
      for (const auto& f : features_) mean += f[j];
      mean /= n;
      double var = 0.0;
      for (const auto& f : features_) var += (f[j] - mean) * (f[j] - mean);
      const double sd = std::sqrt(var / n);
      inv_std_[j] = 1.0 / std::max(sd, 1e-12);
    }
  }
}

double NearestNeighbour::distance2(std::span<const double> a, std::span<const double> b) const {
  double acc = 0.0;
  if (metric_ == Metric::Euclidean) {
    for (std::size_t j = 0; j < dim_; ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
  } else {
    // The mean cancels in the difference of two z-scores.
    for (std::size_t j = 0; j < dim_; ++j) {
      const double d = (a[j] - b[j]) * inv_std_[j];
      acc += d * d;
    }
  }
  return acc;
}

std::size_t NearestNeighbour::nearest(std::span<const double> query) const {
  if (query.size() != dim_) throw InvalidArgument("nearest neighbour: query dimension mismatch");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const double d = distance2(features_[i], query);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

const std::string& NearestNeighbour::classify(std::span<const double> query) const {
  return labels_[nearest(query)];
}

std::string nnc_classify(std::span<const LabeledVector> train, std::span<const double> query,
                         Metric metric) {
  std::vector<std::vector<double>> features;
  std::vector<std::string> labels;
  features.reserve(train.size());
  for (const auto& t : train) {
    features.emplace_back(t.values.begin(), t.values.end());
    labels.push_back(t.label);
  }
  return NearestNeighbour(std::move(features), std::move(labels), metric).classify(query);
}

}  // namespace qqnet
