// Support vector clustering: Gaussian-kernel minimum enclosing sphere in
// feature space, bounded support vectors as outliers, and contour-based
// cluster labeling.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sky/error.hpp"
#include "sky/point.hpp"

namespace sky {

struct SvcParams {
  double q = 1.0;  // kernel width: K(x,y) = exp(-q |x-y|^2)
  double C = 1.0;  // soft-margin bound on the coefficients
  double tolerance = 1e-6;
  std::size_t max_iterations = 100000;
  int segment_samples = 20;  // m: contour samples per labeling segment
  bool record_objective = false;
};

enum class SvcPointClass : std::uint8_t { interior, support, bounded };

struct SvcModel {
  std::vector<Point> points;
  std::vector<double> beta;  // in [0, C], summing to 1
  std::vector<SvcPointClass> classes;
  double q = 1.0;
  double C = 1.0;
  double radius = 0.0;             // R: feature distance of the support vectors
  double quadratic_term = 0.0;     // beta' K beta, cached for R(x)
  double dual_objective = 0.0;     // W = 1 - beta' K beta
  double tolerance = 1e-6;
  std::size_t iterations = 0;
  std::vector<double> objective_history;  // only when requested

  std::size_t support_count() const;
  std::size_t bounded_count() const;
};

// Maximizes the dual W = sum_i beta_i K_ii - sum_ij beta_i beta_j K_ij over
// the simplex-box {0 <= beta <= C, sum beta = 1} by pairwise coordinate
// ascent on the most KKT-violating pair, with closed-form 2-variable steps.
SvcModel svc_train(std::span<const Point> points, const SvcParams& params);

// Feature-space distance of x from the sphere center:
// R(x)^2 = K(x,x) - 2 sum_i beta_i K(x_i,x) + beta' K beta.
double svc_feature_distance(const SvcModel& model, std::span<const double> x);

// Connected components of non-outlier points; i~j iff every sampled point
// of the segment [x_i, x_j] stays inside the sphere. Outliers get -1.
std::vector<int> svc_label_clusters(const SvcModel& model, int segment_samples = 20);

}  // namespace sky
