#pragma once

// Reference computations that share no code with the library: they only read
// point payloads and tree tables, and compute answers by other means.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "cat0lab/space.hpp"

namespace oracle {

/// Hyperbolic distance in the disk from the cosh formula.
inline double disk_distance(std::complex<double> x, std::complex<double> y) {
  const double num = 2.0 * std::norm(x - y);
  const double den = (1.0 - std::norm(x)) * (1.0 - std::norm(y));
  return std::acosh(1.0 + num / den);
}

/// Length of the radial segment [0, r e^{i phi}] under the metric
/// 2|dz| / (1 - |z|^2), by composite Simpson quadrature.
inline double disk_radial_length(double r, int intervals = 20000) {
  auto f = [](double s) { return 2.0 / (1.0 - s * s); };
  const double h = r / intervals;
  double sum = f(0.0) + f(r);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return sum * h / 3.0;
}

/// Shortest-path distance between two tree points on the graph obtained by
/// splitting every edge at the query offsets and into `pieces` equal parts.
inline double tree_distance(const cat0lab::MetricTree& tree, const cat0lab::TreePoint& a,
                            const cat0lab::TreePoint& b, int pieces = 4) {
  // Vertex ids: tree nodes first, then interior cut points.
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(tree.node_count());
  std::map<std::pair<std::size_t, double>, std::size_t> cut_id;
  for (std::size_t e = 0; e < tree.edge_count(); ++e) {
    const auto& ed = tree.edge(e);
    std::vector<double> cuts{0.0, ed.length};
    for (int k = 1; k < pieces; ++k) cuts.push_back(ed.length * k / pieces);
    for (const auto* p : {&a, &b})
      if (!p->on_node() && static_cast<std::size_t>(p->edge) == e) cuts.push_back(p->offset);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<std::size_t> ids;
    for (double c : cuts) {
      if (c == 0.0) {
        ids.push_back(ed.a);
      } else if (c == ed.length) {
        ids.push_back(ed.b);
      } else {
        cut_id[{e, c}] = adj.size();
        ids.push_back(adj.size());
        adj.emplace_back();
      }
    }
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      const double w = cuts[i + 1] - cuts[i];
      adj[ids[i]].push_back({ids[i + 1], w});
      adj[ids[i + 1]].push_back({ids[i], w});
    }
  }
  auto vertex = [&](const cat0lab::TreePoint& p) {
    return p.on_node() ? static_cast<std::size_t>(p.node)
                       : cut_id.at({static_cast<std::size_t>(p.edge), p.offset});
  };
  std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[vertex(a)] = 0.0;
  queue.push({0.0, vertex(a)});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u])
      if (d + w < dist[v]) {
        dist[v] = d + w;
        queue.push({dist[v], v});
      }
  }
  return dist[vertex(b)];
}

/// Euclidean midpoint modulus for eps, r = 1, by grid search over
/// z = 0, x = rho1 (on the positive axis), y = rho2 e^{i beta}.
inline double euclidean_modulus_grid(double eps, int radial = 200, int angular = 720) {
  double best = 0.0;
  for (int i = 0; i <= radial; ++i) {
    const double r1 = static_cast<double>(i) / radial;
    for (int j = 0; j <= radial; ++j) {
      const double r2 = static_cast<double>(j) / radial;
      for (int k = 0; k < angular; ++k) {
        const double beta = 2.0 * M_PI * k / angular;
        const std::complex<double> x(r1, 0.0);
        const std::complex<double> y = std::polar(r2, beta);
        if (std::abs(x - y) < eps) continue;
        best = std::max(best, std::abs(0.5 * (x + y)));
      }
    }
  }
  return 1.0 - best;
}

/// Sets {t in [0,1] : g(t) <= 0} located by a fine sign scan refined with
/// bisection. Returns the boundary points between sign changes.
inline std::vector<double> sign_changes(const std::function<double(double)>& g, int grid = 100000) {
  std::vector<double> out;
  double prev_t = 0.0;
  double prev = g(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double t = static_cast<double>(i) / grid;
    const double v = g(t);
    if ((prev <= 0.0) != (v <= 0.0)) {
      double lo = prev_t, hi = t;
      const bool lo_inside = prev <= 0.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) <= 0.0) == lo_inside)
          lo = mid;
        else
          hi = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    prev_t = t;
    prev = v;
  }
  return out;
}

/// Largest singular value of a row-major n x n matrix by power iteration on
/// A^T A.
inline double spectral_norm(const std::vector<double>& a, std::size_t n, int iters = 2000) {
  std::vector<double> v(n, 1.0), w(n);
  for (std::size_t i = 0; i < n; ++i) v[i] += 0.1 * static_cast<double>(i);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> av(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) av[i] += a[i * n + j] * v[j];
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[j] += a[i * n + j] * av[i];
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = norm;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return std::sqrt(lambda);
}

}  // namespace oracle
