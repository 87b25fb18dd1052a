#pragma once

// Total-variation functionals: anisotropic, isotropic and the multidirectional
// family TV_L that interpolates between them.

#include <cmath>

#include "tvis/calculus.hpp"
#include "tvis/grid.hpp"

namespace tvis {

/// d_L * sum_k (|a cos t_k + b sin t_k| + |b cos t_k - a sin t_k|).
/// Bounded below by hypot(a, b), with equality on rays aligned to some t_k.
inline double riemann_I(double a, double b, const AngleSet& angles) {
  double s = 0.0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const double c = angles.cos(k), sn = angles.sin(k);
    s += std::abs(a * c + b * sn) + std::abs(b * c - a * sn);
  }
  return s * angles.normalization();
}

inline double tv_a(const Image& f, Boundary boundary = Boundary::periodic) {
  return norms(gradient(f, boundary)).l1;
}

inline double tv_i(const Image& f, Boundary boundary = Boundary::periodic) {
  const Field g = gradient(f, boundary);
  const auto fx = g.x(0);
  const auto fy = g.y(0);
  double s = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) s += std::hypot(fx[i], fy[i]);
  return s;
}

/// d_L * ||mdg(f)||_1.
inline double tv_L(const Image& f, const AngleSet& angles, Boundary boundary = Boundary::periodic) {
  return angles.normalization() * norms(mdg(f, angles, boundary)).l1;
}

}  // namespace tvis
