#pragma once

// Randomized self-checks of the operator calculus: adjointness, left inverse,
// range projection, the rotated-divergence identity, the pointwise bound on
// I(a, b; L) and the transform-domain form of div(grad u).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tvis/calculus.hpp"
#include "tvis/grid.hpp"
#include "tvis/spectral.hpp"
#include "tvis/tv.hpp"

namespace tvis {

struct GridSize {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct CheckOptions {
  std::vector<GridSize> sizes{{4, 4}, {5, 7}, {32, 48}};
  std::vector<std::size_t> directions{1, 2, 3, 5};
  std::size_t instances = 10;      // random draws per (check, size, L)
  std::size_t bound_samples = 10000;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;         // relative, identities involving transforms
  double exact_tolerance = 1e-10;  // relative, purely local identities
  double bound_tolerance = 1e-12;  // equality on aligned rays
  /// Negative control: replaces mdd by -mdd inside the adjointness check.
  bool flip_mdd_sign = false;
};

struct CheckResult {
  std::string name;
  std::string detail;  // grid size, L and boundary
  double worst = 0.0;  // largest relative error seen
  double tolerance = 0.0;
  bool passed = false;
};

namespace detail {

inline Image random_image(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Image f(rows, cols);
  for (double& v : f.values()) v = u(rng);
  return f;
}

inline Field random_field(std::size_t rows, std::size_t cols, std::size_t directions, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field v(rows, cols, directions);
  for (double& x : v.values()) x = u(rng);
  return v;
}

inline double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

template <class T>
double relative_distance(const T& a, const T& b) {
  double diff = 0.0, base = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    base += b[i] * b[i];
  }
  if (base == 0.0) return std::sqrt(diff);
  return std::sqrt(diff / base);
}

inline std::string describe(GridSize s, std::size_t L, Boundary b) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols) + " L=" + std::to_string(L) + " " +
         to_string(b);
}

inline CheckResult finish(std::string name, std::string detail, double worst, double tol) {
  return CheckResult{std::move(name), std::move(detail), worst, tol, worst <= tol};
}

}  // namespace detail

/// <mdg u, v> = <u, -mdd v>.
inline CheckResult check_adjointness(GridSize s, std::size_t L, Boundary b, const CheckOptions& opt,
                                     std::mt19937_64& rng) {
  const AngleSet angles(L);
  double worst = 0.0;
  for (std::size_t i = 0; i < opt.instances; ++i) {
    const Image u = detail::random_image(s.rows, s.cols, rng);
    const Field v = detail::random_field(s.rows, s.cols, L, rng);
    Image d = mdd(v, angles, b);
    if (opt.flip_mdd_sign) d *= -1.0;
    worst = std::max(worst, detail::relative_gap(inner_product(mdg(u, angles, b), v), -inner_product(u, d)));
  }
  return detail::finish("adjointness", detail::describe(s, L, b), worst, opt.tolerance);
}

/// integrate(mdg f) = f on the zero-mean space.
inline CheckResult check_left_inverse(GridSize s, std::size_t L, Boundary b, const CheckOptions& opt,
                                      std::mt19937_64& rng) {
  const AngleSet angles(L);
  Integrator integ(s.rows, s.cols, angles, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < opt.instances; ++i) {
    const Image f = zero_mean_project(detail::random_image(s.rows, s.cols, rng));
    worst = std::max(worst, detail::relative_distance(integ.integrate(mdg(f, angles, b)), f));
  }
  return detail::finish("left-inverse", detail::describe(s, L, b), worst, opt.tolerance);
}

/// P(P v) = P v and <v - P v, P v> = 0.
inline CheckResult check_projection(GridSize s, std::size_t L, Boundary b, const CheckOptions& opt,
                                    std::mt19937_64& rng) {
  const AngleSet angles(L);
  Integrator integ(s.rows, s.cols, angles, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < opt.instances; ++i) {
    const Field v = detail::random_field(s.rows, s.cols, L, rng);
    const Field p = integ.project(v);
    worst = std::max(worst, detail::relative_distance(integ.project(p), p));
    const double ortho = std::abs(inner_product(v - p, p)) / (norms(v).l2 * norms(p).l2);
    worst = std::max(worst, ortho);
  }
  return detail::finish("projection", detail::describe(s, L, b), worst, opt.tolerance);
}

/// mdd(mdg u) = L div(grad u).
inline CheckResult check_rotated_divergence(GridSize s, std::size_t L, Boundary b, const CheckOptions& opt,
                                            std::mt19937_64& rng) {
  const AngleSet angles(L);
  double worst = 0.0;
  for (std::size_t i = 0; i < opt.instances; ++i) {
    const Image u = detail::random_image(s.rows, s.cols, rng);
    Image expect = divergence(gradient(u, b), b);
    expect *= static_cast<double>(L);
    worst = std::max(worst, detail::relative_distance(mdd(mdg(u, angles, b), angles, b), expect));
  }
  return detail::finish("rotated-divergence", detail::describe(s, L, b), worst, opt.exact_tolerance);
}

/// T{div(grad u)} = T{u} .* W, T the DFT (periodic) or the DCT (replicative).
inline CheckResult check_transform_identity(GridSize s, Boundary b, const CheckOptions& opt,
                                            std::mt19937_64& rng) {
  const SpectralFilter w = laplacian_symbol(s.rows, s.cols, b);
  const TransformKind kind = transform_for(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < opt.instances; ++i) {
    const Image u = detail::random_image(s.rows, s.cols, rng);
    const ComplexGrid lhs = forward_transform(divergence(gradient(u, b), b), kind);
    ComplexGrid rhs = forward_transform(u, kind);
    for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] *= w[j];
    double diff = 0.0, base = 0.0;
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      diff += std::norm(lhs[j] - rhs[j]);
      base += std::norm(rhs[j]);
    }
    worst = std::max(worst, base == 0.0 ? std::sqrt(diff) : std::sqrt(diff / base));
  }
  const std::string detail = std::to_string(s.rows) + "x" + std::to_string(s.cols) + " " + to_string(b);
  return detail::finish("transform-identity", detail, worst, opt.tolerance);
}

/// I(a, b; L) >= |(a, b)| on random pairs; equality on rays at theta_k + j pi/2.
inline std::vector<CheckResult> check_riemann_bound(std::size_t L, const CheckOptions& opt,
                                                    std::mt19937_64& rng) {
  const AngleSet angles(L);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> radius(0.1, 10.0);
  double worst_violation = 0.0;
  for (std::size_t i = 0; i < opt.bound_samples; ++i) {
    const double a = u(rng), b = u(rng);
    const double norm = std::hypot(a, b);
    const double excess = (norm - riemann_I(a, b, angles)) / norm;
    worst_violation = std::max(worst_violation, excess);
  }
  double worst_equality = 0.0;
  for (std::size_t k = 0; k < L; ++k) {
    for (int j = 0; j < 4; ++j) {
      const double phi = angles.theta(k) + j * std::numbers::pi / 2.0;
      const double r = radius(rng);
      const double val = riemann_I(r * std::cos(phi), r * std::sin(phi), angles);
      worst_equality = std::max(worst_equality, std::abs(val - r) / r);
    }
  }
  const std::string detail = "L=" + std::to_string(L);
  return {detail::finish("riemann-lower-bound", detail, worst_violation, opt.bound_tolerance),
          detail::finish("riemann-aligned-equality", detail, worst_equality, opt.bound_tolerance)};
}

/// Full suite over the configured sizes and direction counts. The replicative
/// boundary takes part wherever it is supported (integration needs L = 1).
inline std::vector<CheckResult> run_operator_checks(const CheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::vector<CheckResult> out;
  for (const GridSize s : opt.sizes) {
    for (const Boundary b : {Boundary::periodic, Boundary::replicative}) {
      for (const std::size_t L : opt.directions) {
        out.push_back(check_adjointness(s, L, b, opt, rng));
        out.push_back(check_rotated_divergence(s, L, b, opt, rng));
        if (b == Boundary::periodic || L == 1) {
          out.push_back(check_left_inverse(s, L, b, opt, rng));
          out.push_back(check_projection(s, L, b, opt, rng));
        }
      }
      out.push_back(check_transform_identity(s, b, opt, rng));
    }
  }
  for (const std::size_t L : opt.directions)
    for (CheckResult& r : check_riemann_bound(L, opt, rng)) out.push_back(std::move(r));
  return out;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace tvis
