#pragma once

// Synthetic degradation (periodic blur + white Gaussian noise), PSNR and the
// Shepp-Logan test phantom.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

#include "tvis/grid.hpp"
#include "tvis/spectral.hpp"

namespace tvis {

enum class BlurKind { gaussian, moving_average, custom_kernel };

struct BlurSpec {
  BlurKind kind = BlurKind::gaussian;
  double sigma = 1.0;        // gaussian std-dev in pixels
  std::size_t width = 3;     // moving-average box side
  std::size_t rows = 0;
  std::size_t cols = 0;

  /// Truncation radius of the sampled Gaussian: ceil(4 sigma).
  std::size_t support_radius() const { return static_cast<std::size_t>(std::ceil(4.0 * sigma)); }
};

/// Transfer function of a spatial kernel. `kernel` is centered at
/// (kernel.rows()/2, kernel.cols()/2); it is shifted to the origin with periodic
/// wrap onto the rows x cols grid, normalized to unit sum and transformed.
inline SpectralFilter kernel_filter(const Image& kernel, std::size_t rows, std::size_t cols) {
  detail::require_grid(rows, cols, "kernel_filter");
  double sum = 0.0;
  for (double v : kernel.values()) {
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("kernel_filter: kernel must be non-negative");
    sum += v;
  }
  if (sum <= 0.0) throw std::invalid_argument("kernel_filter: kernel sums to zero");
  Image embedded(rows, cols);
  const auto cn = static_cast<std::ptrdiff_t>(kernel.rows() / 2);
  const auto cm = static_cast<std::ptrdiff_t>(kernel.cols() / 2);
  const auto R = static_cast<std::ptrdiff_t>(rows), C = static_cast<std::ptrdiff_t>(cols);
  for (std::size_t n = 0; n < kernel.rows(); ++n) {
    for (std::size_t m = 0; m < kernel.cols(); ++m) {
      const std::ptrdiff_t dn = static_cast<std::ptrdiff_t>(n) - cn;
      const std::ptrdiff_t dm = static_cast<std::ptrdiff_t>(m) - cm;
      const auto i = static_cast<std::size_t>(((dn % R) + R) % R);
      const auto j = static_cast<std::size_t>(((dm % C) + C) % C);
      embedded(i, j) += kernel(n, m) / sum;
    }
  }
  return SpectralFilter{forward_transform(embedded, TransformKind::fourier), Boundary::periodic};
}

/// Separable Gaussian truncated at ceil(4 sigma), unit sum, peak-normalized.
inline SpectralFilter gaussian_blur_filter(const BlurSpec& spec) {
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("gaussian_blur_filter: sigma must be positive");
  const std::size_t r = spec.support_radius();
  const std::size_t side = 2 * r + 1;
  std::vector<double> taps(side);
  for (std::size_t i = 0; i < side; ++i) {
    const double x = static_cast<double>(i) - static_cast<double>(r);
    taps[i] = std::exp(-0.5 * x * x / (spec.sigma * spec.sigma));
  }
  Image kernel(side, side);
  for (std::size_t n = 0; n < side; ++n)
    for (std::size_t m = 0; m < side; ++m) kernel(n, m) = taps[n] * taps[m];
  return normalize_blur(kernel_filter(kernel, spec.rows, spec.cols));
}

inline SpectralFilter blur_filter(const BlurSpec& spec) {
  switch (spec.kind) {
    case BlurKind::gaussian:
      return gaussian_blur_filter(spec);
    case BlurKind::moving_average: {
      if (spec.width == 0) throw std::invalid_argument("blur_filter: box width must be positive");
      return normalize_blur(kernel_filter(Image(spec.width, spec.width, 1.0), spec.rows, spec.cols));
    }
    case BlurKind::custom_kernel:
      break;
  }
  throw std::invalid_argument("blur_filter: custom kernels go through kernel_filter()");
}

struct NoiseSpec {
  std::optional<double> sigma;        // std-dev in intensity units
  std::optional<double> target_psnr;  // dB, peak 255
  std::uint64_t seed = 0;

  void validate() const {
    if (sigma.has_value() == target_psnr.has_value())
      throw std::invalid_argument("NoiseSpec: set exactly one of sigma / target_psnr");
    if (sigma && !(*sigma >= 0.0)) throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
  }

  /// sigma_n, with sigma_n = 255 * 10^(-PSNR/20) when a target PSNR is given.
  double resolved_sigma() const {
    validate();
    return sigma ? *sigma : 255.0 * std::pow(10.0, -*target_psnr / 20.0);
  }
};

/// White Gaussian noise of std-dev sigma; deterministic for a given seed.
inline Image gaussian_noise(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed) {
  Image e(rows, cols);
  if (sigma == 0.0) return e;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (double& v : e.values()) v = dist(rng);
  return e;
}

/// g = H f + e.
inline Image degrade(const Image& f, const SpectralFilter& h, const NoiseSpec& noise) {
  if (f.rows() != h.rows() || f.cols() != h.cols()) throw ShapeError("degrade: shape mismatch");
  Image g = convolve_freq(f, h);
  g += gaussian_noise(f.rows(), f.cols(), noise.resolved_sigma(), noise.seed);
  return g;
}

inline double mse(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ShapeError("mse: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

/// 10 log10(255^2 / MSE); +infinity when the images are identical.
inline double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

/// ||a - b|| / ||b||.
inline double relative_l2_error(const Image& a, const Image& b) {
  const Image d = a - b;
  const double base = norms(b).l2;
  const double num = norms(d).l2;
  if (base == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / base;
}

enum class PhantomContrast { modified, original };

/// Ten-ellipse Shepp-Logan head phantom, sampled at pixel centres on [-1, 1]^2
/// and scaled to [0, 255]. `modified` is the high-contrast intensity table,
/// `original` the low-contrast one (peak 2, tissue differences of 0.01-0.02).
inline Image shepp_logan(std::size_t rows, std::size_t cols,
                         PhantomContrast contrast = PhantomContrast::modified) {
  if (rows < 32 || cols < 32) throw std::invalid_argument("shepp_logan: grid must be at least 32x32");
  struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
  };
  static constexpr std::array<Ellipse, 10> table{{
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
      {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
      {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
      {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
      {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
      {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
  }};
  static constexpr std::array<double, 10> original{2.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01};
  std::array<double, 10> values{};
  for (std::size_t k = 0; k < table.size(); ++k)
    values[k] = contrast == PhantomContrast::modified ? table[k].value : original[k];
  const double peak = contrast == PhantomContrast::modified ? 1.0 : 2.0;
  Image f(rows, cols);
  for (std::size_t n = 0; n < rows; ++n) {
    const double y = 1.0 - (2.0 * static_cast<double>(n) + 1.0) / static_cast<double>(rows);
    for (std::size_t m = 0; m < cols; ++m) {
      const double x = (2.0 * static_cast<double>(m) + 1.0) / static_cast<double>(cols) - 1.0;
      double v = 0.0;
      for (std::size_t k = 0; k < table.size(); ++k) {
        const Ellipse& e = table[k];
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0, dy = y - e.y0;
        const double xr = dx * std::cos(phi) + dy * std::sin(phi);
        const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += values[k];
      }
      f(n, m) = std::clamp(v / peak, 0.0, 1.0) * 255.0;
    }
  }
  return f;
}

}  // namespace tvis
