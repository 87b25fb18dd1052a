#pragma once

// Discrete gradient / divergence, their multidirectional (rotated) versions,
// the spectral left inverse of the gradient and the orthogonal projection onto
// the range of the gradient.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tvis/grid.hpp"
#include "tvis/spectral.hpp"

namespace tvis {

/// L directions theta_k = pi k / (2L), k = 0..L-1, and the normalization
/// d_L = 1 / sum_k (cos theta_k + sin theta_k).
class AngleSet {
public:
  explicit AngleSet(std::size_t directions) : cos_(directions), sin_(directions) {
    if (directions == 0) throw std::invalid_argument("AngleSet: need at least one direction");
    double sum = 0.0;
    for (std::size_t k = 0; k < directions; ++k) {
      const double theta = angle(k, directions);
      // theta_0 = 0 exactly, keep the L = 1 case free of round-off.
      cos_[k] = k == 0 ? 1.0 : std::cos(theta);
      sin_[k] = k == 0 ? 0.0 : std::sin(theta);
      sum += cos_[k] + sin_[k];
    }
    d_ = 1.0 / sum;
  }

  static double angle(std::size_t k, std::size_t directions) {
    return std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(directions));
  }

  std::size_t size() const { return cos_.size(); }
  double theta(std::size_t k) const { return angle(k, size()); }
  double cos(std::size_t k) const { return cos_[k]; }
  double sin(std::size_t k) const { return sin_[k]; }
  double normalization() const { return d_; }

private:
  std::vector<double> cos_, sin_;
  double d_ = 1.0;
};

/// (f_x, f_y): backward differences along rows (n) and columns (m).
inline Field gradient(const Image& f, Boundary boundary = Boundary::periodic) {
  const std::size_t N = f.rows(), M = f.cols();
  Field g(N, M, 1);
  auto fx = g.x(0);
  auto fy = g.y(0);
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t up = n > 0 ? n - 1 : (boundary == Boundary::periodic ? N - 1 : 0);
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t left = m > 0 ? m - 1 : (boundary == Boundary::periodic ? M - 1 : 0);
      fx[n * M + m] = f(n, m) - f(up, m);
      fy[n * M + m] = f(n, m) - f(n, left);
    }
  }
  return g;
}

namespace detail {

/// Divergence of the pair (vx, vy), negative adjoint of gradient().
inline Image divergence_pair(std::span<const double> vx, std::span<const double> vy,
                             std::size_t N, std::size_t M, Boundary boundary) {
  Image out(N, M);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t i = n * M + m;
      double dx, dy;
      if (boundary == Boundary::periodic) {
        const std::size_t down = n + 1 < N ? n + 1 : 0;
        const std::size_t right = m + 1 < M ? m + 1 : 0;
        dx = vx[down * M + m] - vx[i];
        dy = vy[n * M + right] - vy[i];
      } else {
        if (n == 0) dx = vx[M + m];
        else if (n + 1 < N) dx = vx[(n + 1) * M + m] - vx[i];
        else dx = -vx[i];
        if (m == 0) dy = vy[n * M + 1];
        else if (m + 1 < M) dy = vy[i + 1] - vy[i];
        else dy = -vy[i];
      }
      out[i] = dx + dy;
    }
  }
  return out;
}

}  // namespace detail

inline Image divergence(const Field& v, Boundary boundary = Boundary::periodic) {
  if (v.directions() != 1) throw ShapeError("divergence: expected a 2-channel field");
  return detail::divergence_pair(v.x(0), v.y(0), v.rows(), v.cols(), boundary);
}

/// Multidirectional gradient: channel pair k is grad f rotated through theta_k.
inline Field mdg(const Image& f, const AngleSet& angles, Boundary boundary = Boundary::periodic) {
  const Field g = gradient(f, boundary);
  const auto fx = g.x(0);
  const auto fy = g.y(0);
  Field v(f.rows(), f.cols(), angles.size());
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const double c = angles.cos(k), s = angles.sin(k);
    auto vx = v.x(k);
    auto vy = v.y(k);
    for (std::size_t i = 0; i < fx.size(); ++i) {
      vx[i] = c * fx[i] + s * fy[i];
      vy[i] = c * fy[i] - s * fx[i];
    }
  }
  return v;
}

/// Multidirectional divergence: div of the sum of the back-rotated channel pairs.
/// Satisfies <mdg(u), v> = <u, -mdd(v)> and mdd(mdg(u)) = L div(grad u).
inline Image mdd(const Field& v, const AngleSet& angles, Boundary boundary = Boundary::periodic) {
  if (v.directions() != angles.size()) throw ShapeError("mdd: field has wrong channel count");
  std::vector<double> ux(v.plane(), 0.0), uy(v.plane(), 0.0);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const double c = angles.cos(k), s = angles.sin(k);
    const auto vx = v.x(k);
    const auto vy = v.y(k);
    for (std::size_t i = 0; i < ux.size(); ++i) {
      ux[i] += c * vx[i] - s * vy[i];
      uy[i] += s * vx[i] + c * vy[i];
    }
  }
  return detail::divergence_pair(ux, uy, v.rows(), v.cols(), boundary);
}

/// Left inverse of mdg on the zero-mean space, with cached transform plans.
///   integrate(v) = (1/L) T^{-1}{ T{mdd(v)} .* W_i }
/// where T is the DFT (periodic) or the type-II DCT (replicative, L = 1 only).
/// One instance per execution context.
class Integrator {
public:
  Integrator(std::size_t rows, std::size_t cols, const AngleSet& angles,
             Boundary boundary = Boundary::periodic)
      : angles_(angles), boundary_(boundary),
        wi_(integration_filter(rows, cols, boundary)) {
    if (boundary == Boundary::replicative) {
      if (angles.size() != 1)
        throw std::invalid_argument("integrate: replicative boundary supports L = 1 only");
      cosine_.emplace(rows, cols);
    } else {
      fourier_.emplace(rows, cols);
    }
    const double inv_l = 1.0 / static_cast<double>(angles.size());
    for (Complex& c : wi_.coeffs.values()) c *= inv_l;
  }

  const AngleSet& angles() const { return angles_; }
  Boundary boundary() const { return boundary_; }

  Image integrate(const Field& v) {
    const Image d = mdd(v, angles_, boundary_);
    return fourier_ ? fourier_->filter(d, wi_.coeffs) : cosine_->filter(d, wi_.coeffs);
  }

  Field project(const Field& v) { return mdg(integrate(v), angles_, boundary_); }

private:
  AngleSet angles_;
  Boundary boundary_;
  SpectralFilter wi_;  // W_i / L
  std::optional<FourierPlan> fourier_;
  std::optional<CosinePlan> cosine_;
};

inline Image integrate(const Field& v, const AngleSet& angles, Boundary boundary = Boundary::periodic) {
  return Integrator(v.rows(), v.cols(), angles, boundary).integrate(v);
}

/// Orthogonal projection onto range(mdg): mdg(integrate(v)).
inline Field project_onto_range(const Field& v, const AngleSet& angles,
                                Boundary boundary = Boundary::periodic) {
  return Integrator(v.rows(), v.cols(), angles, boundary).project(v);
}

}  // namespace tvis
