#include <algorithm>
#include <cmath>
#include <deque>

#include "sqfn/errors.hpp"
#include "sqfn/operators.hpp"

namespace sqfn {
namespace {

// Summed-area table of a row-major n0 x n1 array (n1 = 1 in one dimension),
// with a zero border row and column.
class AreaSums {
 public:
  AreaSums(std::span<const double> v, std::size_t n0, std::size_t n1)
      : n1_(n1), s_((n0 + 1) * (n1 + 1), 0.0) {
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j < n1; ++j)
        s_[(i + 1) * (n1 + 1) + j + 1] = v[i * n1 + j] + s_[i * (n1 + 1) + j + 1] +
                                         s_[(i + 1) * (n1 + 1) + j] - s_[i * (n1 + 1) + j];
  }
  // Sum over rows [a0, b0] and columns [a1, b1], inclusive.
  double rect(std::size_t a0, std::size_t b0, std::size_t a1, std::size_t b1) const {
    auto at = [&](std::size_t i, std::size_t j) { return s_[i * (n1_ + 1) + j]; };
    return at(b0 + 1, b1 + 1) - at(a0, b1 + 1) - at(b0 + 1, a1) + at(a0, a1);
  }

 private:
  std::size_t n1_;
  std::vector<double> s_;
};

// Trapezoid integral over the node rectangle [a0, b0] x [a1, b1] (h^n included).
double trapezoid(const AreaSums& s, int dim, double h, std::size_t a0, std::size_t b0,
                 std::size_t a1, std::size_t b1) {
  if (dim == 1) {
    if (a0 == b0) return 0.0;
    return h * (s.rect(a0, b0, 0, 0) - 0.5 * (s.rect(a0, a0, 0, 0) + s.rect(b0, b0, 0, 0)));
  }
  if (a0 == b0 || a1 == b1) return 0.0;
  double all = s.rect(a0, b0, a1, b1);
  double edges = s.rect(a0, a0, a1, b1) + s.rect(b0, b0, a1, b1) + s.rect(a0, b0, a1, a1) +
                 s.rect(a0, b0, b1, b1);
  double corners = s.rect(a0, a0, a1, a1) + s.rect(a0, a0, b1, b1) + s.rect(b0, b0, a1, a1) +
                   s.rect(b0, b0, b1, b1);
  return h * h * (all - 0.5 * edges + 0.25 * corners);
}

// Sparse table for range maxima on one row.
class RangeMax {
 public:
  explicit RangeMax(std::span<const double> v) {
    std::size_t n = v.size();
    levels_.emplace_back(v.begin(), v.end());
    for (std::size_t w = 1; 2 * w <= n; w *= 2) {
      const auto& prev = levels_.back();
      std::vector<double> next(n - 2 * w + 1);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::max(prev[i], prev[i + w]);
      levels_.push_back(std::move(next));
    }
  }
  double query(std::size_t a, std::size_t b) const {
    std::size_t len = b - a + 1;
    std::size_t k = 0;
    while ((std::size_t{2} << k) <= len) ++k;
    return std::max(levels_[k][a], levels_[k][b + 1 - (std::size_t{1} << k)]);
  }

 private:
  std::vector<std::vector<double>> levels_;
};

}  // namespace

SampledFunction hl_maximal(const SampledFunction& f, const CubeFamily& family) {
  const Grid& g = f.grid();
  const int dim = g.dim();
  const double h = g.spacing();
  const std::size_t n = g.per_axis();
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f[i]);
  AreaSums sums(a, n, dim == 1 ? 1 : n);
  SampledFunction out(g);

  if (family.kind() == CubeFamily::Kind::centered) {
    long R = static_cast<long>(family.max_radius_nodes());
    long last = static_cast<long>(n) - 1;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      auto mi = g.multi_index(idx);
      long i0 = static_cast<long>(mi[0]), i1 = static_cast<long>(mi[1]);
      double best = a[idx];
      for (long r = 1; r <= R; ++r) {
        auto lo0 = static_cast<std::size_t>(std::max(0L, i0 - r));
        auto hi0 = static_cast<std::size_t>(std::min(last, i0 + r));
        double vol = 2.0 * static_cast<double>(r) * h;
        double integral;
        if (dim == 1) {
          integral = trapezoid(sums, 1, h, lo0, hi0, 0, 0);
        } else {
          auto lo1 = static_cast<std::size_t>(std::max(0L, i1 - r));
          auto hi1 = static_cast<std::size_t>(std::min(last, i1 + r));
          integral = trapezoid(sums, 2, h, lo0, hi0, lo1, hi1);
          vol *= vol;
        }
        best = std::max(best, integral / vol);
      }
      out[idx] = best;
    }
    return out;
  }

  for (const Box& cube : family.cubes()) {
    auto r0 = g.aligned_range(0, cube.lo(0), cube.hi(0));
    std::array<std::size_t, 2> r1{0, 0};
    if (dim == 2) r1 = g.aligned_range(1, cube.lo(1), cube.hi(1));
    double avg = trapezoid(sums, dim, h, r0[0], r0[1], r1[0], r1[1]) / cube.volume();
    for (std::size_t i = r0[0]; i <= r0[1]; ++i)
      for (std::size_t j = r1[0]; j <= r1[1]; ++j) {
        std::size_t idx = g.index(i, j);
        out[idx] = std::max(out[idx], avg);
      }
  }
  return out;
}

SampledFunction nt_maximal(const Profile& phi, const SampledFunction& f, const ScaleGrid& scales) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const std::size_t n = g.per_axis();
  SampledFunction out(g);
  for (double t : scales.nodes()) {
    SampledFunction u = apply_P(phi, t, f);
    for (double& v : u.values()) v = std::abs(v);
    // Largest node offset k with k h < t.
    long r = static_cast<long>(std::ceil(t / h - 1e-9)) - 1;
    r = std::clamp(r, 0L, static_cast<long>(n) - 1);
    if (g.dim() == 1) {
      // Sliding window maximum over [i - r, i + r].
      std::deque<std::size_t> dq;
      std::size_t next = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(r));
        while (next <= hi) {
          while (!dq.empty() && u[dq.back()] <= u[next]) dq.pop_back();
          dq.push_back(next++);
        }
        std::size_t lo = i >= static_cast<std::size_t>(r) ? i - static_cast<std::size_t>(r) : 0;
        while (dq.front() < lo) dq.pop_front();
        out[i] = std::max(out[i], u[dq.front()]);
      }
      continue;
    }
    std::vector<RangeMax> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rows.emplace_back(u.values().subspan(i * n, n));
    double tt = t / h;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double best = 0.0;
        long lo_row = std::max(0L, static_cast<long>(i) - r);
        long hi_row = std::min(static_cast<long>(n) - 1, static_cast<long>(i) + r);
        for (long row = lo_row; row <= hi_row; ++row) {
          double dy = static_cast<double>(row - static_cast<long>(i));
          double c2 = tt * tt - dy * dy;
          if (c2 <= 0.0) continue;
          long c = static_cast<long>(std::ceil(std::sqrt(c2) - 1e-9)) - 1;
          if (c < 0) continue;
          long a = std::max(0L, static_cast<long>(j) - c);
          long b = std::min(static_cast<long>(n) - 1, static_cast<long>(j) + c);
          best = std::max(best, rows[static_cast<std::size_t>(row)].query(
                                    static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
        }
        std::size_t idx = i * n + j;
        out[idx] = std::max(out[idx], best);
      }
    }
  }
  return out;
}

}  // namespace sqfn
