#pragma once

// Lagged-diffusivity reference solver for isotropic TV deconvolution and the
// Laplacian-prior choice of the regularization weight.
//
// For a frozen diffusivity s = sqrt(fx^2 + fy^2 + eps) each outer step solves
//   H*H f - lambda div(grad f / s) = H* g
// by Jacobi-preconditioned conjugate gradients. eps is relaxed along a
// decreasing schedule, each stage warm-started from the previous one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tvis/calculus.hpp"
#include "tvis/grid.hpp"
#include "tvis/spectral.hpp"

namespace tvis {

struct MldConfig {
  double lambda = 1.0;
  std::vector<double> epsilon_schedule = halving_schedule(1e-2, 1e-6);
  double inner_tol = 1e-8;          // relative residual of each linear solve
  std::size_t inner_max_iters = 2000;
  double outer_tol = 1e-6;          // relative plug-back residual, final stage
  double stage_tol = 1e-4;          // relative plug-back residual, earlier stages
  std::size_t outer_max_iters = 300;

  /// start, start/2, start/4, ... down to (and including) the first value <= stop.
  static std::vector<double> halving_schedule(double start, double stop) {
    std::vector<double> s;
    for (double e = start; ; e *= 0.5) {
      if (e <= stop) {
        s.push_back(stop);
        break;
      }
      s.push_back(e);
    }
    return s;
  }

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("MldConfig: lambda must be positive");
    if (!(inner_tol > 0.0) || !(outer_tol > 0.0) || !(stage_tol > 0.0))
      throw std::invalid_argument("MldConfig: tolerances must be positive");
    if (inner_max_iters == 0 || outer_max_iters == 0)
      throw std::invalid_argument("MldConfig: iteration limits must be positive");
    if (epsilon_schedule.empty()) throw std::invalid_argument("MldConfig: empty epsilon schedule");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
      if (!(epsilon_schedule[i] > 0.0))
        throw std::invalid_argument("MldConfig: epsilon values must be positive");
      if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1]))
        throw std::invalid_argument("MldConfig: epsilon schedule must be strictly decreasing");
    }
  }
};

struct MldStage {
  double epsilon = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  std::size_t longest_solve = 0;  // most inner iterations taken by one linear solve
  double residual = 0.0;          // relative plug-back residual at exit
  double smoothed_energy = 0.0;   // data_term + tv_term
  double data_term = 0.0;         // 0.5||Hf - g||^2
  double tv_term = 0.0;           // lambda sum sqrt(|grad f|^2 + eps)
};

struct MldResult {
  Image restored;
  std::vector<MldStage> stages;
};

/// Lagged-diffusivity operator u -> H*H u - lambda div(grad u / s) for a fixed
/// positive diffusivity field s (periodic boundary).
class DiffusionOperator {
public:
  DiffusionOperator(const SpectralFilter& h, double lambda)
      : lambda_(lambda), plan_(h.rows(), h.cols()), h_(h.coeffs), h_conj_(h.rows(), h.cols()),
        h_sq_(h.rows(), h.cols()), weight_(h.rows(), h.cols(), 1.0) {
    if (h.boundary != Boundary::periodic) throw std::invalid_argument("mld: periodic blur required");
    double diag = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      h_conj_[i] = std::conj(h[i]);
      h_sq_[i] = std::norm(h[i]);
      diag += std::norm(h[i]);
    }
    blur_diagonal_ = diag / static_cast<double>(h.size());
  }

  /// Freezes 1/s with s = sqrt(fx^2 + fy^2 + eps) evaluated at f.
  void freeze(const Image& f, double epsilon) {
    const Field g = gradient(f);
    const auto fx = g.x(0);
    const auto fy = g.y(0);
    for (std::size_t i = 0; i < fx.size(); ++i)
      weight_[i] = 1.0 / std::sqrt(fx[i] * fx[i] + fy[i] * fy[i] + epsilon);
  }

  const Image& weight() const { return weight_; }
  void set_weight(Image w) { weight_ = std::move(w); }

  Image apply(const Image& u) {
    Image out = plan_.filter(u, h_sq_);
    Field g = gradient(u);
    auto gx = g.x(0);
    auto gy = g.y(0);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] *= weight_[i];
      gy[i] *= weight_[i];
    }
    const Image d = divergence(g);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= lambda_ * d[i];
    return out;
  }

  /// Diagonal of apply(): mean |H|^2 plus the weighted stencil centre.
  Image diagonal() const {
    const std::size_t N = weight_.rows(), M = weight_.cols();
    Image d(N, M);
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m)
        d(n, m) = blur_diagonal_ + lambda_ * (2.0 * weight_(n, m) + weight_((n + 1) % N, m) +
                                              weight_(n, (m + 1) % M));
    return d;
  }

  Image adjoint_blur(const Image& g) { return plan_.filter(g, h_conj_); }
  Image blur(const Image& f) { return plan_.filter(f, h_); }

private:
  double lambda_;
  FourierPlan plan_;
  ComplexGrid h_, h_conj_, h_sq_;
  Image weight_;
  double blur_diagonal_ = 1.0;
};

struct CgReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned CG on op(x) = rhs, starting from x.
inline CgReport conjugate_gradient(DiffusionOperator& op, const Image& rhs, Image& x, double tol,
                                   std::size_t max_iters) {
  const Image diag = op.diagonal();
  const double rhs_norm = norms(rhs).l2;
  CgReport rep;
  if (rhs_norm == 0.0) {
    x = Image(rhs.rows(), rhs.cols());
    rep.converged = true;
    return rep;
  }
  Image r = rhs - op.apply(x);
  Image z(r.rows(), r.cols());
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
  Image p = z;
  double rz = inner_product(r, z);
  rep.relative_residual = norms(r).l2 / rhs_norm;
  if (rep.relative_residual <= tol) {
    rep.converged = true;
    return rep;
  }
  for (std::size_t it = 1; it <= max_iters; ++it) {
    const Image ap = op.apply(p);
    const double pap = inner_product(p, ap);
    if (!(pap > 0.0)) throw NumericalError("mld: operator lost positive definiteness");
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    rep.iterations = it;
    rep.relative_residual = norms(r).l2 / rhs_norm;
    if (rep.relative_residual <= tol) {
      rep.converged = true;
      return rep;
    }
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
    const double rz_next = inner_product(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  return rep;
}

/// ||H*(Hf - g) - lambda div(grad f / s(f))|| / ||H* g||, s evaluated at f itself.
inline double mld_residual(const Image& f, const Image& g, const SpectralFilter& h, double lambda,
                           double epsilon) {
  DiffusionOperator op(h, lambda);
  op.freeze(f, epsilon);
  const Image rhs = op.adjoint_blur(g);
  const Image r = op.apply(f) - rhs;
  return norms(r).l2 / norms(rhs).l2;
}

/// (0.5||Hf - g||^2, lambda sum sqrt(|grad f|^2 + eps)).
inline std::pair<double, double> smoothed_tv_terms(const Image& f, const Image& g, const SpectralFilter& h,
                                                   double lambda, double epsilon) {
  const Image r = convolve_freq(f, h) - g;
  const Field grad = gradient(f);
  const auto fx = grad.x(0);
  const auto fy = grad.y(0);
  double tv = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) tv += std::sqrt(fx[i] * fx[i] + fy[i] * fy[i] + epsilon);
  return {0.5 * inner_product(r, r), lambda * tv};
}

inline double smoothed_tv_energy(const Image& f, const Image& g, const SpectralFilter& h, double lambda,
                                 double epsilon) {
  const auto [data, tv] = smoothed_tv_terms(f, g, h, lambda, epsilon);
  return data + tv;
}

inline MldResult mld_restore(const Image& g, const SpectralFilter& h, const MldConfig& cfg) {
  cfg.validate();
  if (g.rows() != h.rows() || g.cols() != h.cols()) throw ShapeError("mld_restore: shape mismatch");

  DiffusionOperator op(h, cfg.lambda);
  const Image rhs = op.adjoint_blur(g);
  const double rhs_norm = norms(rhs).l2;
  Image f = g;
  MldResult result;

  for (std::size_t k = 0; k < cfg.epsilon_schedule.size(); ++k) {
    const double eps = cfg.epsilon_schedule[k];
    const double tol = k + 1 == cfg.epsilon_schedule.size() ? cfg.outer_tol : cfg.stage_tol;
    MldStage stage;
    stage.epsilon = eps;
    for (std::size_t outer = 1; outer <= cfg.outer_max_iters; ++outer) {
      op.freeze(f, eps);
      const double res = rhs_norm > 0.0 ? norms(op.apply(f) - rhs).l2 / rhs_norm : 0.0;
      stage.residual = res;
      if (res <= tol) break;
      const CgReport rep = conjugate_gradient(op, rhs, f, cfg.inner_tol, cfg.inner_max_iters);
      stage.inner_iterations += rep.iterations;
      stage.longest_solve = std::max(stage.longest_solve, rep.iterations);
      stage.outer_iterations = outer;
      if (!rep.converged)
        throw NumericalError("mld: linear solve did not reach tolerance within " +
                             std::to_string(cfg.inner_max_iters) + " iterations (eps = " +
                             std::to_string(eps) + ")");
      if (!all_finite(f)) throw NumericalError("mld: non-finite iterate");
    }
    op.freeze(f, eps);
    stage.residual = rhs_norm > 0.0 ? norms(op.apply(f) - rhs).l2 / rhs_norm : 0.0;
    std::tie(stage.data_term, stage.tv_term) = smoothed_tv_terms(f, g, h, cfg.lambda, eps);
    stage.smoothed_energy = stage.data_term + stage.tv_term;
    result.stages.push_back(stage);
  }
  result.restored = std::move(f);
  return result;
}

struct LambdaEstimate {
  double lambda = 0.0;
  double beta = 0.0;
  double gradient_variance = 0.0;
  double noise_variance = 0.0;
};

/// beta = sqrt(0.5 * var(|grad f|)), lambda = sigma^2 / beta. The variance is
/// the unbiased sample variance of the per-pixel gradient magnitude.
inline LambdaEstimate estimate_lambda(const Image& reference, double noise_variance) {
  if (!(noise_variance > 0.0)) throw std::invalid_argument("estimate_lambda: noise variance must be > 0");
  if (!all_finite(reference)) throw std::invalid_argument("estimate_lambda: non-finite reference");
  const Field g = gradient(reference);
  const auto fx = g.x(0);
  const auto fy = g.y(0);
  const std::size_t n = fx.size();
  double mean = 0.0;
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) {
    mag[i] = std::hypot(fx[i], fy[i]);
    mean += mag[i];
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double m : mag) var += (m - mean) * (m - mean);
  var /= static_cast<double>(n - 1);
  LambdaEstimate est;
  est.gradient_variance = var;
  est.noise_variance = noise_variance;
  est.beta = std::sqrt(0.5 * var);
  if (est.beta == 0.0) throw std::invalid_argument("estimate_lambda: reference has no gradient variation");
  est.lambda = noise_variance / est.beta;
  return est;
}

}  // namespace tvis
