#pragma once

// Slow, independent reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "stabilikit/geometry.hpp"

namespace oracle {

using stabilikit::Point2;

// O(n^3) hull: a pair (a, b) is a hull edge when every other point lies on its
// left, and points on the line lie within the segment. Returns the distinct
// endpoints of such edges, sorted lexicographically.
inline std::vector<Point2> brute_force_hull(std::span<const Point2> in) {
  std::vector<Point2> pts(in.begin(), in.end());
  const auto lex = [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  };
  std::sort(pts.begin(), pts.end(), lex);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Point2> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const Point2 a = pts[i];
      const Point2 b = pts[j];
      bool edge = true;
      for (std::size_t k = 0; k < pts.size() && edge; ++k) {
        if (k == i || k == j) continue;
        const double c = stabilikit::cross(b - a, pts[k] - a);
        if (c < 0) edge = false;
        if (c == 0) {
          const double t = stabilikit::dot(pts[k] - a, b - a) / stabilikit::dot(b - a, b - a);
          if (t < 0 || t > 1) edge = false;
        }
      }
      if (edge) {
        out.push_back(a);
        out.push_back(b);
      }
    }
  }
  std::sort(out.begin(), out.end(), lex);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Distance to the polygon outline: dense sampling of every edge, then a
// ternary search around the best sample (distance along a segment is convex
// in the parameter). Signed by a winding-angle inside test.
inline double grid_signed_distance(const Point2& p, std::span<const Point2> poly,
                                   int samples_per_edge) {
  double best = INFINITY;
  double winding = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    const auto dist = [&](double t) {
      return std::hypot(p.x - (a.x + t * (b.x - a.x)), p.y - (a.y + t * (b.y - a.y)));
    };
    int best_k = 0;
    double edge_best = INFINITY;
    for (int k = 0; k <= samples_per_edge; ++k) {
      const double d = dist(static_cast<double>(k) / samples_per_edge);
      if (d < edge_best) {
        edge_best = d;
        best_k = k;
      }
    }
    double lo = std::max(0.0, static_cast<double>(best_k - 1) / samples_per_edge);
    double hi = std::min(1.0, static_cast<double>(best_k + 1) / samples_per_edge);
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3;
      const double m2 = hi - (hi - lo) / 3;
      if (dist(m1) < dist(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    best = std::min({best, edge_best, dist(0.5 * (lo + hi))});
    winding += std::atan2(stabilikit::cross(a - p, b - p), stabilikit::dot(a - p, b - p));
  }
  return std::abs(winding) > std::numbers::pi ? best : -best;
}

// Ray-casting inside test, independent of the library's convex test.
inline bool inside(const Point2& p, std::span<const Point2> poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2 a = poly[i];
    const Point2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      in = !in;
    }
  }
  return in;
}

// Pixel-count IoU: cells of size `cell` over the joint bounding box, each
// counted by its centre.
inline double pixel_iou(std::span<const Point2> a, std::span<const Point2> b, double cell) {
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (auto poly : {a, b}) {
    for (const auto& p : poly) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  }
  long inter = 0;
  long uni = 0;
  for (double y = y0 + cell / 2; y < y1; y += cell) {
    for (double x = x0 + cell / 2; x < x1; x += cell) {
      const bool ia = inside({x, y}, a);
      const bool ib = inside({x, y}, b);
      inter += (ia && ib) ? 1 : 0;
      uni += (ia || ib) ? 1 : 0;
    }
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// Amplitude of the `freq` component of x (sampled at fs) by a direct DFT over
// the samples [begin, end).
inline double dft_amplitude(std::span<const double> x, double freq, double fs, std::size_t begin,
                            std::size_t end) {
  std::complex<double> acc = 0.0;
  for (std::size_t n = begin; n < end; ++n) {
    acc += x[n] * std::polar(1.0, -2.0 * std::numbers::pi * freq * static_cast<double>(n) / fs);
  }
  return 2.0 * std::abs(acc) / static_cast<double>(end - begin);
}

}  // namespace oracle
