#pragma once

// 2-D Fourier and cosine transforms (FFTW-backed), Laplacian symbols,
// integration filters and frequency-domain convolution.
//
// Conventions: forward transforms are unnormalized, inverse transforms carry
// the 1/(NM) factor. The cosine transform is the type-II DCT (even extension
// about the half-sample point), which diagonalizes the replicative Laplacian.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "tvis/grid.hpp"

namespace tvis {

using Complex = std::complex<double>;

enum class TransformKind { fourier, cosine };

/// Dense N x M complex grid indexed by frequency (k, l).
class ComplexGrid {
public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t rows, std::size_t cols, Complex value = {})
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  Complex& operator()(std::size_t k, std::size_t l) { return data_[k * cols_ + l]; }
  Complex operator()(std::size_t k, std::size_t l) const { return data_[k * cols_ + l]; }
  Complex& operator[](std::size_t i) { return data_[i]; }
  Complex operator[](std::size_t i) const { return data_[i]; }

  std::span<Complex> values() { return data_; }
  std::span<const Complex> values() const { return data_; }

  bool same_shape(const ComplexGrid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Frequency response on an N x M grid. Houses blur H, composite A, W and W_i.
struct SpectralFilter {
  ComplexGrid coeffs;
  Boundary boundary = Boundary::periodic;

  std::size_t rows() const { return coeffs.rows(); }
  std::size_t cols() const { return coeffs.cols(); }
  Complex operator()(std::size_t k, std::size_t l) const { return coeffs(k, l); }
  Complex& operator()(std::size_t k, std::size_t l) { return coeffs(k, l); }
  Complex operator[](std::size_t i) const { return coeffs[i]; }
  Complex& operator[](std::size_t i) { return coeffs[i]; }
  std::size_t size() const { return coeffs.size(); }
};

namespace detail {

inline void ensure_planner_ready() {
  static std::once_flag once;
  std::call_once(once, [] { fftw_make_planner_thread_safe(); });
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

inline void require_grid(std::size_t rows, std::size_t cols, const char* what) {
  if (rows < 2 || cols < 2) throw ShapeError(std::string(what) + ": grid must be at least 2x2");
}

}  // namespace detail

/// Selects how many threads FFTW may use for plans created afterwards.
/// The default of one keeps every result bit-reproducible.
inline void set_transform_threads(int n) {
  static std::once_flag once;
  std::call_once(once, [] { fftw_init_threads(); });
  fftw_plan_with_nthreads(n < 1 ? 1 : n);
}

/// Non-redundant half of the DFT of a real grid: rows x (cols/2 + 1).
class HalfSpectrum {
public:
  HalfSpectrum() = default;
  HalfSpectrum(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * (cols / 2 + 1)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t half_cols() const { return cols_ / 2 + 1; }
  std::size_t size() const { return data_.size(); }
  Complex& operator[](std::size_t i) { return data_[i]; }
  Complex operator[](std::size_t i) const { return data_[i]; }
  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Complex> data_;
};

/// Owns FFTW plans and their work buffers for one grid size. Not safe for
/// concurrent use; give each execution context its own instance.
///
/// Real-input filtering goes through real-to-complex transforms; only the
/// conjugate-symmetric part of a response contributes to a real output, so
/// real(IDFT(DFT(u) .* F)) is evaluated exactly through the half spectrum.
class FourierPlan {
public:
  FourierPlan(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    detail::ensure_planner_ready();
    const std::size_t half = rows * (cols / 2 + 1);
    buffer_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * rows * cols)));
    real_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * rows * cols)));
    half_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half)));
    const int n = static_cast<int>(rows), m = static_cast<int>(cols);
    forward_.reset(fftw_plan_dft_2d(n, m, buffer_.get(), buffer_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
    backward_.reset(fftw_plan_dft_2d(n, m, buffer_.get(), buffer_.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
    r2c_.reset(fftw_plan_dft_r2c_2d(n, m, real_.get(), half_.get(), FFTW_ESTIMATE));
    c2r_.reset(fftw_plan_dft_c2r_2d(n, m, half_.get(), real_.get(), FFTW_ESTIMATE));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  ComplexGrid forward(const Image& u) {
    check(u.rows(), u.cols());
    auto* b = reinterpret_cast<Complex*>(buffer_.get());
    for (std::size_t i = 0; i < u.size(); ++i) b[i] = Complex(u[i], 0.0);
    fftw_execute(forward_.get());
    ComplexGrid out(rows_, cols_);
    std::copy(b, b + out.size(), out.values().begin());
    return out;
  }

  /// Inverse transform, normalized; returns the real part.
  Image inverse_real(const ComplexGrid& s) {
    const ComplexGrid full = inverse(s);
    Image out(rows_, cols_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = full[i].real();
    return out;
  }

  ComplexGrid inverse(const ComplexGrid& s) {
    check(s.rows(), s.cols());
    auto* b = reinterpret_cast<Complex*>(buffer_.get());
    std::copy(s.values().begin(), s.values().end(), b);
    fftw_execute(backward_.get());
    ComplexGrid out(rows_, cols_);
    const double scale = 1.0 / static_cast<double>(rows_ * cols_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = b[i] * scale;
    return out;
  }

  /// Unnormalized DFT of a real grid, non-redundant half.
  HalfSpectrum analyze(const Image& u) {
    check(u.rows(), u.cols());
    std::copy(u.values().begin(), u.values().end(), real_.get());
    fftw_execute(r2c_.get());
    HalfSpectrum out(rows_, cols_);
    const auto* h = reinterpret_cast<const Complex*>(half_.get());
    std::copy(h, h + out.size(), out.data());
    return out;
  }

  /// real(IDFT(S .* F)) for the full-grid response F, S the half spectrum of a real grid.
  Image synthesize(const HalfSpectrum& s, const ComplexGrid& response) {
    check(s.rows(), s.cols());
    check(response.rows(), response.cols());
    auto* h = reinterpret_cast<Complex*>(half_.get());
    const std::size_t hc = s.half_cols();
    for (std::size_t k = 0; k < rows_; ++k) {
      const std::size_t kk = k == 0 ? 0 : rows_ - k;
      for (std::size_t l = 0; l < hc; ++l) {
        const std::size_t ll = l == 0 ? 0 : cols_ - l;
        const Complex sym = 0.5 * (response(k, l) + std::conj(response(kk, ll)));
        h[k * hc + l] = s[k * hc + l] * sym;
      }
    }
    fftw_execute(c2r_.get());
    Image out(rows_, cols_);
    const double scale = 1.0 / static_cast<double>(rows_ * cols_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_.get()[i] * scale;
    return out;
  }

  /// real(IDFT(DFT(u) .* F)).
  Image filter(const Image& u, const ComplexGrid& response) { return synthesize(analyze(u), response); }

private:
  void check(std::size_t r, std::size_t c) const {
    if (r != rows_ || c != cols_) throw ShapeError("FourierPlan: shape mismatch");
  }

  std::size_t rows_, cols_;
  std::unique_ptr<fftw_complex, detail::FftwFree> buffer_;
  std::unique_ptr<double, detail::FftwFree> real_;
  std::unique_ptr<fftw_complex, detail::FftwFree> half_;
  detail::PlanHandle forward_, backward_, r2c_, c2r_;
};

/// Type-II DCT (forward) and its type-III inverse, real to real.
class CosinePlan {
public:
  CosinePlan(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    detail::ensure_planner_ready();
    buffer_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * rows * cols)));
    const int n = static_cast<int>(rows), m = static_cast<int>(cols);
    forward_.reset(fftw_plan_r2r_2d(n, m, buffer_.get(), buffer_.get(), FFTW_REDFT10, FFTW_REDFT10,
                                    FFTW_ESTIMATE));
    backward_.reset(fftw_plan_r2r_2d(n, m, buffer_.get(), buffer_.get(), FFTW_REDFT01, FFTW_REDFT01,
                                     FFTW_ESTIMATE));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Image forward(const Image& u) {
    check(u.rows(), u.cols());
    std::copy(u.values().begin(), u.values().end(), buffer_.get());
    fftw_execute(forward_.get());
    return Image(rows_, cols_, std::vector<double>(buffer_.get(), buffer_.get() + rows_ * cols_));
  }

  Image inverse(const Image& s) {
    check(s.rows(), s.cols());
    std::copy(s.values().begin(), s.values().end(), buffer_.get());
    fftw_execute(backward_.get());
    Image out(rows_, cols_);
    const double scale = 1.0 / static_cast<double>(4 * rows_ * cols_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = buffer_.get()[i] * scale;
    return out;
  }

  /// IDCT(DCT(u) .* F) for a real response F.
  Image filter(const Image& u, const ComplexGrid& response) {
    check(u.rows(), u.cols());
    check(response.rows(), response.cols());
    std::copy(u.values().begin(), u.values().end(), buffer_.get());
    fftw_execute(forward_.get());
    for (std::size_t i = 0; i < response.size(); ++i) buffer_.get()[i] *= response[i].real();
    fftw_execute(backward_.get());
    Image out(rows_, cols_);
    const double scale = 1.0 / static_cast<double>(4 * rows_ * cols_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = buffer_.get()[i] * scale;
    return out;
  }

private:
  void check(std::size_t r, std::size_t c) const {
    if (r != rows_ || c != cols_) throw ShapeError("CosinePlan: shape mismatch");
  }

  std::size_t rows_, cols_;
  std::unique_ptr<double, detail::FftwFree> buffer_;
  detail::PlanHandle forward_, backward_;
};

inline ComplexGrid forward_transform(const Image& u, TransformKind kind) {
  if (kind == TransformKind::fourier) return FourierPlan(u.rows(), u.cols()).forward(u);
  const Image c = CosinePlan(u.rows(), u.cols()).forward(u);
  ComplexGrid out(u.rows(), u.cols());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = Complex(c[i], 0.0);
  return out;
}

/// Inverse of forward_transform; returns the real part.
inline Image inverse_transform(const ComplexGrid& s, TransformKind kind) {
  if (kind == TransformKind::fourier) return FourierPlan(s.rows(), s.cols()).inverse_real(s);
  Image re(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.size(); ++i) re[i] = s[i].real();
  return CosinePlan(s.rows(), s.cols()).inverse(re);
}

inline TransformKind transform_for(Boundary b) {
  return b == Boundary::periodic ? TransformKind::fourier : TransformKind::cosine;
}

/// W(k,l) = 2cos(a k) + 2cos(b l) - 4 with a = 2pi/N (periodic) or pi/N (replicative).
inline SpectralFilter laplacian_symbol(std::size_t rows, std::size_t cols, Boundary boundary) {
  detail::require_grid(rows, cols, "laplacian_symbol");
  const double base = boundary == Boundary::periodic ? 2.0 * std::numbers::pi : std::numbers::pi;
  SpectralFilter w{ComplexGrid(rows, cols), boundary};
  for (std::size_t k = 0; k < rows; ++k) {
    const double ck = 2.0 * std::cos(base * static_cast<double>(k) / static_cast<double>(rows));
    for (std::size_t l = 0; l < cols; ++l) {
      const double cl = 2.0 * std::cos(base * static_cast<double>(l) / static_cast<double>(cols));
      w(k, l) = (k == 0 && l == 0) ? 0.0 : ck + cl - 4.0;
    }
  }
  return w;
}

/// W_i = 1/W away from DC, 0 at DC.
inline SpectralFilter integration_filter(std::size_t rows, std::size_t cols, Boundary boundary) {
  SpectralFilter wi = laplacian_symbol(rows, cols, boundary);
  for (std::size_t i = 0; i < wi.size(); ++i)
    wi[i] = i == 0 ? Complex{} : Complex(1.0 / wi[i].real(), 0.0);
  return wi;
}

/// max|W_i| for the periodic grid: [2 - 2cos(2pi / max(N, M))]^{-1}.
inline double max_integration_gain(std::size_t rows, std::size_t cols) {
  const double n = static_cast<double>(std::max(rows, cols));
  return 1.0 / (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / n));
}

/// Scales H so that max|H|^2 = 1.
inline SpectralFilter normalize_blur(const SpectralFilter& h) {
  double peak = 0.0;
  for (Complex c : h.coeffs.values()) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) throw std::invalid_argument("normalize_blur: filter is identically zero");
  SpectralFilter out = h;
  for (Complex& c : out.coeffs.values()) c /= peak;
  return out;
}

inline SpectralFilter identity_filter(std::size_t rows, std::size_t cols) {
  return SpectralFilter{ComplexGrid(rows, cols, Complex(1.0, 0.0)), Boundary::periodic};
}

inline Image convolve_freq(const Image& u, const SpectralFilter& f) {
  if (f.boundary != Boundary::periodic)
    throw std::invalid_argument("convolve_freq: only periodic filters are supported");
  if (u.rows() != f.rows() || u.cols() != f.cols()) throw ShapeError("convolve_freq: shape mismatch");
  return FourierPlan(u.rows(), u.cols()).filter(u, f.coeffs);
}

/// max|H| / min|H| over every frequency sample; infinity if min|H| == 0.
inline double condition_number(const SpectralFilter& h) {
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (Complex c : h.coeffs.values()) {
    const double a = std::abs(c);
    hi = std::max(hi, a);
    lo = std::min(lo, a);
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace tvis
