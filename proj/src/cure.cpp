#include "sky/cure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

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

std::vector<std::size_t> draw_sample(std::size_t population, std::size_t size, std::uint64_t seed) {
  return reservoir_sample(population, size, seed);
}

namespace {

struct Working {
  std::vector<std::size_t> members;  // ascending sample indices
  std::vector<Point> reps;
  Point centroid;
  bool alive = true;
};

// Greedy farthest-point traversal: first the point farthest from the
// centroid, then repeatedly the one maximizing the minimum distance to the
// chosen set; finally shrink each toward the centroid by alpha.
void refresh_representatives(Working& c, std::span<const Point> sample, std::size_t max_reps,
                             double alpha) {
  const std::size_t take = std::min(max_reps, c.members.size());
  std::vector<std::size_t> chosen;
  chosen.reserve(take);
  std::vector<double> min_d(c.members.size(), std::numeric_limits<double>::infinity());
  for (std::size_t round = 0; round < take; ++round) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      const Point& p = sample[c.members[i]];
      double d = round == 0 ? sq_dist(p, c.centroid) : min_d[i];
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    chosen.push_back(best);
    const Point& picked = sample[c.members[best]];
    min_d[best] = -1.0;  // never re-picked
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      if (min_d[i] < 0.0) continue;
      min_d[i] = std::min(min_d[i], sq_dist(sample[c.members[i]], picked));
    }
  }
  c.reps.clear();
  c.reps.reserve(chosen.size());
  for (std::size_t idx : chosen) {
    Point rep = sample[c.members[idx]];
    // (1-a)p + a*c rather than p + a*(c-p): alpha = 1 collapses exactly.
    for (std::size_t d = 0; d < rep.size(); ++d)
      rep[d] = (1.0 - alpha) * rep[d] + alpha * c.centroid[d];
    c.reps.push_back(std::move(rep));
  }
}

double cluster_sq_dist(const Working& a, const Working& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& ra : a.reps)
    for (const Point& rb : b.reps) best = std::min(best, sq_dist(ra, rb));
  return best;
}

}  // namespace

std::vector<CureCluster> cure_cluster(std::span<const Point> sample, const CureParams& params) {
  if (sample.empty()) fail(Errc::empty_input, "empty sample");
  if (params.k < 1 || params.k > sample.size()) fail(Errc::bad_params, "k out of range");
  if (params.representatives < 1) fail(Errc::bad_params, "need at least one representative");
  if (params.alpha < 0.0 || params.alpha > 1.0) fail(Errc::bad_params, "alpha must be in [0, 1]");
  const std::size_t dims = sample[0].size();
  for (const Point& p : sample)
    if (p.size() != dims) fail(Errc::dimension_mismatch, "sample arity differs");

  std::vector<Working> clusters(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    clusters[i].members = {i};
    clusters[i].centroid = sample[i];
    refresh_representatives(clusters[i], sample, params.representatives, params.alpha);
  }

  // Cached nearest neighbor per cluster; recomputed only when the cached
  // partner merged away.
  const std::size_t n = clusters.size();
  std::vector<std::size_t> nn(n);
  std::vector<double> nn_d(n, std::numeric_limits<double>::infinity());
  auto recompute_nn = [&](std::size_t a) {
    nn_d[a] = std::numeric_limits<double>::infinity();
    nn[a] = a;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a || !clusters[b].alive) continue;
      double d = cluster_sq_dist(clusters[a], clusters[b]);
      if (d < nn_d[a]) {
        nn_d[a] = d;
        nn[a] = b;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) recompute_nn(i);

  std::size_t alive = clusters.size();
  while (alive > params.k) {
    std::size_t best_i = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!clusters[i].alive) continue;
      if (nn_d[i] < best) {
        best = nn_d[i];
        best_i = i;
      }
    }
    const std::size_t best_a = std::min(best_i, nn[best_i]);
    const std::size_t best_b = std::max(best_i, nn[best_i]);

    Working& dst = clusters[best_a];
    Working& src = clusters[best_b];
    const double na = double(dst.members.size()), nb = double(src.members.size());
    for (std::size_t d = 0; d < dims; ++d)
      dst.centroid[d] = (dst.centroid[d] * na + src.centroid[d] * nb) / (na + nb);
    std::vector<std::size_t> merged;
    merged.reserve(dst.members.size() + src.members.size());
    std::merge(dst.members.begin(), dst.members.end(), src.members.begin(), src.members.end(),
               std::back_inserter(merged));
    dst.members = std::move(merged);
    src.alive = false;
    refresh_representatives(dst, sample, params.representatives, params.alpha);
    --alive;

    recompute_nn(best_a);
    for (std::size_t i = 0; i < n; ++i) {
      if (!clusters[i].alive || i == best_a) continue;
      if (nn[i] == best_a || nn[i] == best_b) {
        recompute_nn(i);
      } else {
        // The merged cluster may have moved closer than the cached partner.
        double d = cluster_sq_dist(clusters[i], clusters[best_a]);
        if (d < nn_d[i]) {
          nn_d[i] = d;
          nn[i] = best_a;
        }
      }
    }
  }

  std::vector<CureCluster> out;
  out.reserve(params.k);
  for (auto& c : clusters) {
    if (!c.alive) continue;
    out.push_back(CureCluster{std::move(c.members), std::move(c.reps), std::move(c.centroid)});
  }
  return out;
}

std::vector<int> cure_label(std::span<const Point> points, std::span<const CureCluster> clusters) {
  std::vector<int> labels(points.size(), -1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      for (const Point& rep : clusters[c].representatives) {
        double d = sq_dist(points[i], rep);
        if (d < best) {
          best = d;
          labels[i] = int(c);
        }
      }
    }
  }
  return labels;
}

}  // namespace sky
