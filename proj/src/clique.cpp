#include "sky/clique.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sky/error.hpp"

namespace sky {

int GridBounds::cell_of(double value, std::size_t dim) const {
  if (width[dim] <= 0.0) return 0;  // degenerate dimension: single occupied cell
  int c = int(std::floor((value - lo[dim]) / width[dim]));
  return std::clamp(c, 0, xi - 1);
}

GridBounds GridBounds::fit(std::span<const Point> data, int xi) {
  GridBounds g;
  g.xi = xi;
  const std::size_t dims = data[0].size();
  g.lo.assign(dims, 0.0);
  g.width.assign(dims, 0.0);
  for (std::size_t d = 0; d < dims; ++d) {
    double mn = data[0][d], mx = data[0][d];
    for (const Point& p : data) {
      mn = std::min(mn, p[d]);
      mx = std::max(mx, p[d]);
    }
    g.lo[d] = mn;
    g.width[d] = (mx - mn) / double(xi);
  }
  return g;
}

namespace {

using Key = std::vector<int>;

struct SubspaceKey {
  std::vector<std::size_t> dims;

  bool operator<(const SubspaceKey& o) const { return dims < o.dims; }
};

}  // namespace

std::vector<SubspaceUnits> clique_dense_units(std::span<const Point> data, const CliqueParams& params) {
  if (params.xi < 1) fail(Errc::bad_params, "xi must be at least 1");
  if (!(params.tau > 0.0) || !(params.tau < 1.0)) fail(Errc::bad_params, "tau must be in (0, 1)");
  if (data.empty()) fail(Errc::empty_input, "no data");
  const std::size_t dims = data[0].size();
  for (const Point& p : data)
    if (p.size() != dims) fail(Errc::dimension_mismatch, "point arity differs");

  const GridBounds grid = GridBounds::fit(data, params.xi);
  const double n_total = double(data.size());
  auto is_dense = [&](std::uint64_t count) { return double(count) > params.tau * n_total; };

  // Cell index per point per dimension, computed once.
  std::vector<std::vector<int>> cells(data.size(), std::vector<int>(dims));
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t d = 0; d < dims; ++d) cells[i][d] = grid.cell_of(data[i][d], d);

  // Level 1: direct counting per dimension.
  std::map<SubspaceKey, std::map<Key, std::uint64_t>> dense;  // subspace -> cells -> count
  for (std::size_t d = 0; d < dims; ++d) {
    std::vector<std::uint64_t> counts(params.xi, 0);
    for (std::size_t i = 0; i < data.size(); ++i) ++counts[cells[i][d]];
    std::map<Key, std::uint64_t> here;
    for (int c = 0; c < params.xi; ++c)
      if (is_dense(counts[c])) here[{c}] = counts[c];
    if (!here.empty()) dense[SubspaceKey{{d}}] = std::move(here);
  }

  // Levels q+1: apriori join of q-dimensional dense units sharing their
  // first q-1 dimensions and cells, pruned by monotonicity, then counted.
  std::vector<SubspaceKey> current;
  for (const auto& [key, _] : dense)
    if (key.dims.size() == 1) current.push_back(key);

  for (std::size_t q = 1; q < dims && !current.empty(); ++q) {
    // Candidate units grouped by candidate subspace.
    std::map<SubspaceKey, std::set<Key>> candidates;
    for (std::size_t a = 0; a < current.size(); ++a) {
      for (std::size_t b = a + 1; b < current.size(); ++b) {
        const auto& da = current[a].dims;
        const auto& db = current[b].dims;
        if (!std::equal(da.begin(), da.end() - 1, db.begin(), db.end() - 1)) continue;
        if (da.back() >= db.back()) continue;
        SubspaceKey joined;
        joined.dims = da;
        joined.dims.push_back(db.back());
        const auto& ua = dense[current[a]];
        const auto& ub = dense[current[b]];
        for (const auto& [ca, _] : ua) {
          for (const auto& [cb, _ignored] : ub) {
            if (!std::equal(ca.begin(), ca.end() - 1, cb.begin(), cb.end() - 1)) continue;
            Key cand = ca;
            cand.push_back(cb.back());
            candidates[joined].insert(std::move(cand));
          }
        }
      }
    }

    // Monotonicity pruning: every q-dimensional projection must be dense.
    for (auto& [sub, cands] : candidates) {
      for (auto it = cands.begin(); it != cands.end();) {
        bool ok = true;
        for (std::size_t drop = 0; drop + 1 < sub.dims.size() && ok; ++drop) {
          // Dropping the last dimension reproduces a join parent; check all
          // the others.
          SubspaceKey proj;
          Key proj_cells;
          for (std::size_t i = 0; i < sub.dims.size(); ++i) {
            if (i == drop) continue;
            proj.dims.push_back(sub.dims[i]);
            proj_cells.push_back((*it)[i]);
          }
          auto found = dense.find(proj);
          ok = found != dense.end() && found->second.contains(proj_cells);
        }
        it = ok ? std::next(it) : cands.erase(it);
      }
    }

    // Counting pass, one scan per candidate subspace.
    std::vector<SubspaceKey> next;
    for (auto& [sub, cands] : candidates) {
      if (cands.empty()) continue;
      std::map<Key, std::uint64_t> counts;
      for (const Key& c : cands) counts[c] = 0;
      Key probe(sub.dims.size());
      for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < sub.dims.size(); ++j) probe[j] = cells[i][sub.dims[j]];
        auto it = counts.find(probe);
        if (it != counts.end()) ++it->second;
      }
      std::map<Key, std::uint64_t> here;
      for (const auto& [c, cnt] : counts)
        if (is_dense(cnt)) here[c] = cnt;
      if (!here.empty()) {
        dense[sub] = std::move(here);
        next.push_back(sub);
      }
    }
    current = std::move(next);
  }

  std::vector<SubspaceUnits> out;
  for (const auto& [sub, units] : dense) {
    SubspaceUnits s;
    s.dims = sub.dims;
    for (const auto& [c, cnt] : units) s.units.push_back(GridUnit{c, cnt});
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const SubspaceUnits& a, const SubspaceUnits& b) {
    return a.dims.size() != b.dims.size() ? a.dims.size() < b.dims.size() : a.dims < b.dims;
  });
  return out;
}

std::vector<std::vector<std::size_t>> clique_identify_clusters(const SubspaceUnits& subspace) {
  const std::size_t n = subspace.units.size();
  std::map<Key, std::size_t> where;
  for (std::size_t i = 0; i < n; ++i) where[subspace.units[i].cells] = i;

  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::size_t i = 0; i < n; ++i) {
    Key probe = subspace.units[i].cells;
    for (std::size_t d = 0; d < probe.size(); ++d) {
      for (int step : {-1, +1}) {
        probe[d] += step;
        auto it = where.find(probe);
        if (it != where.end()) {
          std::size_t ra = find(i), rb = find(it->second);
          if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
        }
        probe[d] -= step;
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [_, members] : groups) out.push_back(std::move(members));
  return out;
}

namespace {

// Every cell tuple inside `rect` with coordinate `value` in dimension
// `fixed_dim` must be present in `have` for the slab to be extendable.
bool slab_full(const Region& rect, std::size_t fixed_dim, int value, const std::set<Key>& have) {
  Key probe(rect.size());
  probe[fixed_dim] = value;
  // Odometer over the other dimensions.
  std::vector<int> at(rect.size());
  for (std::size_t d = 0; d < rect.size(); ++d) at[d] = rect[d].first;
  while (true) {
    for (std::size_t d = 0; d < rect.size(); ++d) probe[d] = d == fixed_dim ? value : at[d];
    if (!have.contains(probe)) return false;
    std::size_t d = 0;
    for (; d < rect.size(); ++d) {
      if (d == fixed_dim) continue;
      if (++at[d] <= rect[d].second) break;
      at[d] = rect[d].first;
    }
    if (d >= rect.size()) return true;  // odometer wrapped
  }
}

void units_in(const Region& rect, std::vector<Key>& out) {
  out.clear();
  std::vector<int> at(rect.size());
  for (std::size_t d = 0; d < rect.size(); ++d) at[d] = rect[d].first;
  while (true) {
    out.emplace_back(at.begin(), at.end());
    std::size_t d = 0;
    for (; d < rect.size(); ++d) {
      if (++at[d] <= rect[d].second) break;
      at[d] = rect[d].first;
    }
    if (d >= rect.size()) return;
  }
}

}  // namespace

std::vector<Region> clique_minimal_description(const SubspaceUnits& subspace,
                                               std::span<const std::size_t> cluster) {
  std::set<Key> have;
  for (std::size_t idx : cluster) have.insert(subspace.units[idx].cells);
  const std::size_t q = subspace.dims.size();

  std::set<Key> covered;
  std::vector<Region> regions;
  for (const Key& start : have) {  // lexicographic order
    if (covered.contains(start)) continue;
    Region rect(q);
    for (std::size_t d = 0; d < q; ++d) rect[d] = {start[d], start[d]};
    // Grow dimension by dimension, both directions, while the slab stays
    // inside the cluster.
    for (std::size_t d = 0; d < q; ++d) {
      while (slab_full(rect, d, rect[d].first - 1, have)) --rect[d].first;
      while (slab_full(rect, d, rect[d].second + 1, have)) ++rect[d].second;
    }
    std::vector<Key> cells;
    units_in(rect, cells);
    for (const Key& c : cells) covered.insert(c);
    regions.push_back(std::move(rect));
  }

  // Redundancy sweep: drop regions whose units all appear in other kept
  // regions.
  std::vector<bool> keep(regions.size(), true);
  std::vector<Key> cells;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    std::map<Key, int> owners;
    for (std::size_t s = 0; s < regions.size(); ++s) {
      if (!keep[s] || s == r) continue;
      units_in(regions[s], cells);
      for (const Key& c : cells) owners[c] = 1;
    }
    units_in(regions[r], cells);
    bool redundant = true;
    for (const Key& c : cells) {
      if (!owners.contains(c)) {
        redundant = false;
        break;
      }
    }
    if (redundant) keep[r] = false;
  }
  std::vector<Region> out;
  for (std::size_t r = 0; r < regions.size(); ++r)
    if (keep[r]) out.push_back(std::move(regions[r]));
  return out;
}

}  // namespace sky
