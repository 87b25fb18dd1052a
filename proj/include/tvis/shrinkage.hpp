#pragma once

// Iterative shrinkage for TV_L-regularized deconvolution with periodic blur.
//
// The unknown is the multidirectional gradient field f of the image. With
// A = W_i .* H the composite "integrate then blur" response:
//
//   A_L  v = (1/L)   real IDFT( DFT(mdd v) .* A )
//   A_L* u = -(1/L)  mdg( real IDFT( DFT(u) .* conj(A) ) )
//   R_L  v = -(1/L^2) mdg( real IDFT( DFT(mdd v) .* |A|^2 ) )  = A_L* A_L v
//
// and each iteration is  f <- P( S_tau( f + (b - R_L f) / c ) ),  b = A_L* g,
// tau = lambda d_L / c, P the projection onto range(mdg).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tvis/calculus.hpp"
#include "tvis/grid.hpp"
#include "tvis/spectral.hpp"
#include "tvis/tv.hpp"

namespace tvis {

inline double soft_threshold(double x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  const double a = std::abs(x) - tau;
  return a > 0.0 ? std::copysign(a, x) : 0.0;
}

namespace detail {
/// x - clamp(x, -tau, tau), identical to sign(x) max(|x| - tau, 0).
inline void soft_threshold_inplace(std::span<double> x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  for (double& v : x) v -= std::clamp(v, -tau, tau);
}
}  // namespace detail

inline Field soft_threshold(Field x, double tau) {
  detail::soft_threshold_inplace(x.values(), tau);
  return x;
}

inline Image soft_threshold(Image x, double tau) {
  detail::soft_threshold_inplace(x.values(), tau);
  return x;
}

/// A = W_i .* H.
inline SpectralFilter build_A(const SpectralFilter& h, const SpectralFilter& wi) {
  if (h.rows() != wi.rows() || h.cols() != wi.cols()) throw ShapeError("build_A: shape mismatch");
  SpectralFilter a{ComplexGrid(h.rows(), h.cols()), Boundary::periodic};
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = wi[i] * h[i];
  return a;
}

/// c = (1/L) [2 - 2cos(2pi / max(N, M))]^{-1} + epsilon.
inline double step_constant(std::size_t rows, std::size_t cols, std::size_t directions,
                            double epsilon_margin) {
  return max_integration_gain(rows, cols) / static_cast<double>(directions) + epsilon_margin;
}

struct Energy {
  double total = 0.0;
  double data_term = 0.0;
  double tv_term = 0.0;
};

/// Projection of a field onto range(mdg) together with the quantities one
/// iteration needs at the projected point.
struct ProjectedState {
  Field f;    // P v
  Image u;    // integrate(v), so f = mdg(u)
  Field rf;   // R_L f
  Image af;   // A_L f
};

/// Operators A_L, A_L*, R_L and the range projection for one (H, L, grid),
/// sharing one set of transform plans. One instance per execution context.
class ShrinkageOperators {
public:
  ShrinkageOperators(const SpectralFilter& h, const AngleSet& angles)
      : angles_(angles), plan_(h.rows(), h.cols()) {
    if (h.boundary != Boundary::periodic)
      throw std::invalid_argument("ShrinkageOperators: periodic blur required");
    a_ = build_A(h, integration_filter(h.rows(), h.cols(), Boundary::periodic));
    const double inv_l = 1.0 / static_cast<double>(angles.size());
    wi_scaled_ = integration_filter(h.rows(), h.cols(), Boundary::periodic).coeffs;
    for (Complex& c : wi_scaled_.values()) c *= inv_l;
    a_scaled_ = ComplexGrid(h.rows(), h.cols());
    a_conj_ = ComplexGrid(h.rows(), h.cols());
    a_sq_ = ComplexGrid(h.rows(), h.cols());
    for (std::size_t i = 0; i < a_.size(); ++i) {
      a_scaled_[i] = a_[i] * inv_l;
      a_conj_[i] = std::conj(a_[i]);
      a_sq_[i] = std::norm(a_[i]) * inv_l * inv_l;
    }
  }

  /// Builds the operators from an already composed A (skips W_i .* H).
  static ShrinkageOperators from_composite(const SpectralFilter& a, const AngleSet& angles) {
    ShrinkageOperators ops(identity_filter(a.rows(), a.cols()), angles);
    ops.a_ = a;
    const double inv_l = 1.0 / static_cast<double>(angles.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      ops.a_scaled_[i] = a[i] * inv_l;
      ops.a_conj_[i] = std::conj(a[i]);
      ops.a_sq_[i] = std::norm(a[i]) * inv_l * inv_l;
    }
    return ops;
  }

  const AngleSet& angles() const { return angles_; }
  const SpectralFilter& composite() const { return a_; }
  std::size_t rows() const { return a_.rows(); }
  std::size_t cols() const { return a_.cols(); }

  Image apply_A(const Field& v) {
    require(v);
    return plan_.filter(mdd(v, angles_), a_scaled_);
  }

  Field apply_A_star(const Image& u) {
    if (u.rows() != rows() || u.cols() != cols()) throw ShapeError("apply_A_star: shape mismatch");
    Field out = mdg(plan_.filter(u, a_conj_), angles_);
    out *= -1.0 / static_cast<double>(angles_.size());
    return out;
  }

  Field apply_R(const Field& v) {
    require(v);
    Field out = mdg(plan_.filter(mdd(v, angles_), a_sq_), angles_);
    out *= -1.0;
    return out;
  }

  Image integrate(const Field& v) {
    require(v);
    return plan_.filter(mdd(v, angles_), wi_scaled_);
  }

  Field project(const Field& v) { return mdg(integrate(v), angles_); }

  /// P v with R_L(P v) and A_L(P v) from a single forward transform:
  /// the spectrum of mdd(P v) equals that of mdd(v).
  ProjectedState advance(const Field& v) {
    require(v);
    const HalfSpectrum d = plan_.analyze(mdd(v, angles_));
    ProjectedState s;
    s.u = plan_.synthesize(d, wi_scaled_);
    s.f = mdg(s.u, angles_);
    s.rf = mdg(plan_.synthesize(d, a_sq_), angles_);
    s.rf *= -1.0;
    s.af = plan_.synthesize(d, a_scaled_);
    return s;
  }

  Energy energy(const ProjectedState& s, const Image& g, double lambda) const {
    if (!g.same_shape(s.af)) throw ShapeError("energy: shape mismatch");
    const Image r = s.af - g;
    Energy e;
    e.data_term = 0.5 * inner_product(r, r);
    e.tv_term = lambda * angles_.normalization() * norms(s.f).l1;
    e.total = e.data_term + e.tv_term;
    return e;
  }

  /// 0.5 ||A_L v - g||^2 + lambda d_L ||v||_1.
  Energy energy(const Field& v, const Image& g, double lambda) {
    if (!g.same_shape(Image(rows(), cols()))) throw ShapeError("energy: shape mismatch");
    const Image r = apply_A(v) - g;
    Energy e;
    e.data_term = 0.5 * inner_product(r, r);
    e.tv_term = lambda * angles_.normalization() * norms(v).l1;
    e.total = e.data_term + e.tv_term;
    return e;
  }

private:
  void require(const Field& v) const {
    if (v.rows() != rows() || v.cols() != cols() || v.directions() != angles_.size())
      throw ShapeError("shrinkage operator: field shape or direction count mismatch");
  }

  AngleSet angles_;
  FourierPlan plan_;
  SpectralFilter a_;
  ComplexGrid wi_scaled_; // W_i / L
  ComplexGrid a_scaled_;  // A / L
  ComplexGrid a_conj_;    // conj(A)
  ComplexGrid a_sq_;      // |A|^2 / L^2
};

inline Image apply_A(const Field& v, const SpectralFilter& a, const AngleSet& angles) {
  return ShrinkageOperators::from_composite(a, angles).apply_A(v);
}

inline Field apply_A_star(const Image& u, const SpectralFilter& a, const AngleSet& angles) {
  return ShrinkageOperators::from_composite(a, angles).apply_A_star(u);
}

inline Field apply_R(const Field& v, const SpectralFilter& a, const AngleSet& angles) {
  return ShrinkageOperators::from_composite(a, angles).apply_R(v);
}

inline Energy energy(const Field& v, const Image& g, const SpectralFilter& a, const AngleSet& angles,
                     double lambda) {
  return ShrinkageOperators::from_composite(a, angles).energy(v, g, lambda);
}

struct SolverConfig {
  double lambda = 1.0;
  std::size_t directions = 3;
  /// Step constant c; derived from the grid size when unset.
  std::optional<double> step;
  /// Slack added to the derived bound; defaults to 1e-3 of the bound.
  std::optional<double> epsilon_margin;
  double mu = 0.8;
  std::size_t max_iters = 500;
  double rel_tol = 1e-5;
  bool backtracking = false;
  /// Upper limit on c reductions per iteration when back-tracking.
  std::size_t max_backtracks = 60;
  /// Stretch the result to [0, 255] (off by default).
  bool renormalize = false;
  /// Called after every update with (iteration, state).
  std::function<void(std::size_t, const Field&)> observer;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw std::invalid_argument("SolverConfig: lambda must be finite and non-negative");
    if (directions == 0) throw std::invalid_argument("SolverConfig: L must be >= 1");
    if (step && !(*step > 0.0)) throw std::invalid_argument("SolverConfig: c must be positive");
    if (epsilon_margin && !(*epsilon_margin > 0.0))
      throw std::invalid_argument("SolverConfig: epsilon margin must be positive");
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("SolverConfig: mu must lie in (0, 1)");
    if (!(rel_tol >= 0.0)) throw std::invalid_argument("SolverConfig: rel_tol must be >= 0");
  }

  double resolved_step(std::size_t rows, std::size_t cols) const {
    if (step) return *step;
    const double bound = step_constant(rows, cols, directions, 0.0);
    return bound + epsilon_margin.value_or(1e-3 * bound);
  }
};

struct IterationRecord {
  std::size_t iter = 0;
  double energy = 0.0;
  double data_term = 0.0;
  double tv_term = 0.0;
  double c = 0.0;
  double delta_rel = 0.0;
  /// Sufficient-decrease check of the accepted step: c ||r||^2 vs <R r, r>.
  double lcond_lhs = 0.0;
  double lcond_rhs = 0.0;
  std::size_t backtracks = 0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
};

struct RestoreResult {
  Image restored;       // zero-mean unless renormalized
  Field state;          // final gradient-domain iterate
  IterationTrace trace;
  bool converged = false;
  std::size_t iterations = 0;
};

inline Image renormalize_range(const Image& f, double lo = 0.0, double hi = 255.0) {
  const auto [mn, mx] = std::minmax_element(f.values().begin(), f.values().end());
  const double range = *mx - *mn;
  Image out(f.rows(), f.cols(), lo);
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = lo + (hi - lo) * (f[i] - *mn) / range;
  return out;
}

namespace detail {

inline double relative_change(const Field& next, const Field& prev) {
  double diff = 0.0, base = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    const double d = next[i] - prev[i];
    diff += d * d;
    base += prev[i] * prev[i];
  }
  if (base == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff / base);
}

/// S_tau(f + step / c) with tau = lambda d_L / c, step = b - R f.
inline void shrink_step(const Field& f, const Field& step, double c, double tau, Field& out) {
  const double inv_c = 1.0 / c;
  const auto fv = f.values();
  const auto sv = step.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) {
    const double z = fv[i] + inv_c * sv[i];
    ov[i] = z - std::clamp(z, -tau, tau);
  }
}

inline RestoreResult run_shrinkage(const Image& g, const SpectralFilter& h, const SolverConfig& cfg) {
  cfg.validate();
  if (g.rows() != h.rows() || g.cols() != h.cols()) throw ShapeError("restore: shape mismatch");
  if (!all_finite(g)) throw std::invalid_argument("restore: data image has non-finite values");

  const AngleSet angles(cfg.directions);
  ShrinkageOperators ops(h, angles);
  const double d_l = angles.normalization();
  const double c0 = cfg.resolved_step(g.rows(), g.cols());
  const Image g0 = zero_mean_project(g);

  const Field b = ops.apply_A_star(g0);
  ProjectedState s = ops.advance(mdg(g0, angles));

  RestoreResult result;
  auto record = [&](std::size_t t, double c, double delta, double lhs, double rhs, std::size_t bt) {
    const Energy e = ops.energy(s, g0, cfg.lambda);
    result.trace.records.push_back({t, e.total, e.data_term, e.tv_term, c, delta, lhs, rhs, bt});
  };
  record(0, c0, 0.0, 0.0, 0.0, 0);

  Field step(g.rows(), g.cols(), cfg.directions);
  Field temp(g.rows(), g.cols(), cfg.directions);
  Field trial(g.rows(), g.cols(), cfg.directions);
  Field r(g.rows(), g.cols(), cfg.directions);
  const double lambda_d = cfg.lambda * d_l;

  // ||r||^2 and <R r, r> for r = candidate - f.
  auto sufficient_decrease_terms = [&](const Field& candidate, const Field& f) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = candidate[i] - f[i];
    const double rr = inner_product(r, r);
    const double rrr = rr > 0.0 ? inner_product(ops.apply_R(r), r) : 0.0;
    return std::pair{rr, rrr};
  };

  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    const Field& f = s.f;
    for (std::size_t i = 0; i < step.size(); ++i) step[i] = b[i] - s.rf[i];
    double c = c0;
    shrink_step(f, step, c, lambda_d / c, temp);
    double lhs = 0.0, rhs = 0.0;
    std::size_t backtracks = 0;

    if (cfg.backtracking) {
      auto [rr, rrr] = sufficient_decrease_terms(temp, f);
      lhs = c * rr;
      rhs = rrr;
      while (rr > 0.0 && backtracks < cfg.max_backtracks) {
        const double trial_c = cfg.mu * c;
        shrink_step(f, step, trial_c, lambda_d / trial_c, trial);
        const auto [trial_rr, trial_rrr] = sufficient_decrease_terms(trial, f);
        if (trial_rr == 0.0 || trial_c * trial_rr < trial_rrr) break;
        c = trial_c;
        std::swap(temp, trial);
        rr = trial_rr;
        lhs = c * rr;
        rhs = trial_rrr;
        ++backtracks;
      }
    }

    ProjectedState next = ops.advance(temp);
    if (!all_finite(next.f))
      throw NumericalError("restore: non-finite iterate at step " + std::to_string(t) +
                           " (step constant too small?)");
    const double delta = relative_change(next.f, f);
    s = std::move(next);
    record(t, c, delta, lhs, rhs, backtracks);
    if (cfg.observer) cfg.observer(t, s.f);
    result.iterations = t;
    if (delta < cfg.rel_tol) {
      result.converged = true;
      break;
    }
  }

  result.restored = cfg.renormalize ? renormalize_range(s.u) : std::move(s.u);
  result.state = std::move(s.f);
  return result;
}

}  // namespace detail

/// Fixed step constant (c from the grid bound unless configured).
inline RestoreResult iterate_fixed(const Image& g, const SpectralFilter& h, SolverConfig cfg) {
  cfg.backtracking = false;
  return detail::run_shrinkage(g, h, cfg);
}

/// Per-iteration back-tracking on c: starting from the bound, c is multiplied
/// by mu as long as the reduced step still satisfies c||r||^2 >= <R r, r>.
inline RestoreResult iterate_backtracking(const Image& g, const SpectralFilter& h, SolverConfig cfg) {
  cfg.backtracking = true;
  return detail::run_shrinkage(g, h, cfg);
}

}  // namespace tvis
