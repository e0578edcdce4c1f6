#include "sky/svc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sky/error.hpp"

namespace sky {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

}  // namespace

std::size_t SvcModel::support_count() const {
  return std::size_t(std::count(classes.begin(), classes.end(), SvcPointClass::support));
}

std::size_t SvcModel::bounded_count() const {
  return std::size_t(std::count(classes.begin(), classes.end(), SvcPointClass::bounded));
}

SvcModel svc_train(std::span<const Point> points, const SvcParams& params) {
  const std::size_t n = points.size();
  if (n < 1) fail(Errc::empty_input, "no training points");
  if (!(params.q > 0.0)) fail(Errc::bad_params, "q must be positive");
  if (params.C < 1.0 / double(n))
    fail(Errc::infeasible_c, "C < 1/N leaves no feasible coefficient vector");
  if (params.segment_samples < 1) fail(Errc::bad_params, "segment samples must be at least 1");
  const std::size_t dims = points[0].size();
  for (const Point& p : points)
    if (p.size() != dims) fail(Errc::dimension_mismatch, "point arity differs");

  // Gaussian kernel matrix; K_ii = 1.
  std::vector<double> kernel(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double kij = std::exp(-params.q * sq_dist(points[i], points[j]));
      kernel[i * n + j] = kij;
      kernel[j * n + i] = kij;
    }
  }

  const double C = params.C;
  std::vector<double> beta(n, 1.0 / double(n));
  // g_i = 2 (K beta)_i, the gradient of the quadratic term.
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += kernel[i * n + j] * beta[j];
    g[i] = 2.0 * s;
  }

  auto quadratic = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += beta[i] * g[i];
    return 0.5 * s;  // beta' K beta
  };

  SvcModel model;
  if (params.record_objective) model.objective_history.push_back(1.0 - quadratic());

  std::size_t iter = 0;
  bool converged = false;
  for (; iter < params.max_iterations; ++iter) {
    // Most violating pair: raise the coefficient with the smallest
    // gradient, lower the one with the largest.
    std::size_t up = n, down = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (beta[i] < C && (up == n || g[i] < g[up])) up = i;
      if (beta[i] > 0.0 && (down == n || g[i] > g[down])) down = i;
    }
    if (up == n || down == n) {
      converged = true;  // fully pinned (C == 1/N)
      break;
    }
    const double violation = (g[down] - g[up]) / 2.0;
    if (violation <= params.tolerance) {
      converged = true;
      break;
    }
    const double eta = 2.0 * (1.0 - kernel[up * n + down]);
    const double bound = std::min(C - beta[up], beta[down]);
    double delta = eta > 1e-15 ? (g[down] - g[up]) / (2.0 * eta) : bound;
    bool hit_upper = false, hit_lower = false;
    if (delta >= bound) {
      delta = bound;
      hit_upper = bound == C - beta[up];
      hit_lower = bound == beta[down];
    }
    // Exact pinning keeps the beta = 0 / beta = C classifications crisp.
    beta[up] = hit_upper ? C : beta[up] + delta;
    beta[down] = hit_lower ? 0.0 : beta[down] - delta;
    for (std::size_t i = 0; i < n; ++i)
      g[i] += 2.0 * delta * (kernel[i * n + up] - kernel[i * n + down]);
    if (params.record_objective) model.objective_history.push_back(1.0 - quadratic());
  }
  if (!converged) fail(Errc::no_convergence, "no convergence in " + std::to_string(params.max_iterations) + " iterations");

  model.points.assign(points.begin(), points.end());
  model.beta = beta;
  model.q = params.q;
  model.C = C;
  model.tolerance = params.tolerance;
  model.iterations = iter;
  model.quadratic_term = quadratic();
  model.dual_objective = 1.0 - model.quadratic_term;

  // Feature distance per training point from the gradient:
  // R(x_i)^2 = 1 - g_i + beta' K beta.
  std::vector<double> r2(n);
  for (std::size_t i = 0; i < n; ++i) r2[i] = std::max(0.0, 1.0 - g[i] + model.quadratic_term);

  // Sphere radius: mean over the unbounded support vectors, which sit on
  // the sphere; if everything is pinned, fall back to all positive
  // coefficients.
  double r_sum = 0.0;
  std::size_t r_cnt = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] > 0.0 && beta[i] < C) {
      r_sum += std::sqrt(r2[i]);
      ++r_cnt;
    }
  }
  if (r_cnt == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (beta[i] > 0.0) {
        r_sum += std::sqrt(r2[i]);
        ++r_cnt;
      }
    }
  }
  model.radius = r_cnt ? r_sum / double(r_cnt) : 0.0;

  // beta = C alone does not make an outlier: the point must also sit
  // strictly outside the sphere (the N=1, C=1 corner pins beta at C while
  // the point is on the sphere).
  const double outside = model.radius + std::max(10.0 * params.tolerance, 1e-9);
  model.classes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] == 0.0)
      model.classes[i] = SvcPointClass::interior;
    else if (beta[i] == C && std::sqrt(r2[i]) > outside)
      model.classes[i] = SvcPointClass::bounded;
    else
      model.classes[i] = SvcPointClass::support;
  }
  return model;
}

double svc_feature_distance(const SvcModel& model, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < model.points.size(); ++i)
    s += model.beta[i] * std::exp(-model.q * sq_dist(model.points[i], x));
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * s + model.quadratic_term));
}

std::vector<int> svc_label_clusters(const SvcModel& model, int segment_samples) {
  const std::size_t n = model.points.size();
  std::vector<int> labels(n, -1);
  if (segment_samples < 1) fail(Errc::bad_params, "segment samples must be at least 1");

  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < n; ++i)
    if (model.classes[i] != SvcPointClass::bounded) inside.push_back(i);

  // Sphere membership with the solver's own tolerance: support vectors sit
  // on the boundary only up to that accuracy.
  const double r_ok = model.radius + std::max(10.0 * model.tolerance, 1e-9);

  std::vector<std::size_t> parent(inside.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  const std::size_t dims = n ? model.points[0].size() : 0;
  Point probe(dims);
  for (std::size_t a = 0; a < inside.size(); ++a) {
    for (std::size_t b = a + 1; b < inside.size(); ++b) {
      if (find(a) == find(b)) continue;
      const Point& pa = model.points[inside[a]];
      const Point& pb = model.points[inside[b]];
      bool connected = true;
      for (int s = 1; s <= segment_samples && connected; ++s) {
        const double t = double(s) / double(segment_samples + 1);
        for (std::size_t d = 0; d < dims; ++d) probe[d] = pa[d] + t * (pb[d] - pa[d]);
        connected = svc_feature_distance(model, probe) <= r_ok;
      }
      if (connected) {
        std::size_t ra = find(a), rb = find(b);
        parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }

  // Component labels in order of first appearance.
  std::vector<int> component_label(inside.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    std::size_t r = find(i);
    if (component_label[r] < 0) component_label[r] = next++;
    labels[inside[i]] = component_label[r];
  }
  return labels;
}

}  // namespace sky
