#pragma once

// Test oracles built from first principles: naive DFT/DCT, spatial circular
// convolution and a literal array transcription of the shrinkage update.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "tvis/tvis.hpp"

namespace tvis_test {

using tvis::Complex;
using tvis::ComplexGrid;
using tvis::Field;
using tvis::Image;

inline Image random_image(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0,
                          double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Image f(rows, cols);
  for (double& v : f.values()) v = u(rng);
  return f;
}

inline Field random_field(std::size_t rows, std::size_t cols, std::size_t directions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field v(rows, cols, directions);
  for (double& x : v.values()) x = u(rng);
  return v;
}

/// Sum of a few low-frequency sinusoids: smooth, non-trivial gradients.
inline Image smooth_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  Image f(rows, cols);
  for (int t = 0; t < 4; ++t) {
    const double a = amp(rng), p = phase(rng);
    const int kx = 1 + t % 2, ky = 1 + t / 2;
    for (std::size_t n = 0; n < rows; ++n)
      for (std::size_t m = 0; m < cols; ++m)
        f(n, m) += a * std::sin(2.0 * std::numbers::pi * (kx * double(n) / rows + ky * double(m) / cols) + p);
  }
  return f;
}

/// X(k,l) = sum_{n,m} x(n,m) exp(-2 pi i (kn/N + lm/M)).
inline ComplexGrid naive_dft(const ComplexGrid& x, int sign = -1) {
  const std::size_t N = x.rows(), M = x.cols();
  ComplexGrid out(N, M);
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < M; ++l) {
      Complex s{};
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < M; ++m) {
          const double ang = sign * 2.0 * std::numbers::pi *
                             (double(k * n % N) / double(N) + double(l * m % M) / double(M));
          s += x(n, m) * Complex(std::cos(ang), std::sin(ang));
        }
      out(k, l) = s;
    }
  return out;
}

inline ComplexGrid to_complex(const Image& u) {
  ComplexGrid c(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.size(); ++i) c[i] = u[i];
  return c;
}

inline ComplexGrid naive_dft(const Image& u) { return naive_dft(to_complex(u)); }

/// real(IDFT(X)), normalized by 1/(NM).
inline Image naive_idft_real(const ComplexGrid& x) {
  const ComplexGrid y = naive_dft(x, +1);
  Image out(x.rows(), x.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i].real() / double(x.size());
  return out;
}

/// Unnormalized type-II DCT, 2 sum x cos(pi k (2n + 1) / (2N)) along each axis.
inline Image naive_dct2(const Image& u) {
  const std::size_t N = u.rows(), M = u.cols();
  Image out(N, M);
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < M; ++l) {
      double s = 0.0;
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < M; ++m)
          s += u(n, m) * std::cos(std::numbers::pi * k * (2.0 * n + 1) / (2.0 * N)) *
               std::cos(std::numbers::pi * l * (2.0 * m + 1) / (2.0 * M));
      out(k, l) = 4.0 * s;
    }
  return out;
}

/// (f * k)(n, m) = sum_{i,j} k(i, j) f(n - (i - ci), m - (j - cj)), periodic, k
/// centered at (rows/2, cols/2) and normalized to unit sum.
inline Image naive_circular_convolution(const Image& f, const Image& kernel) {
  const auto N = static_cast<std::ptrdiff_t>(f.rows()), M = static_cast<std::ptrdiff_t>(f.cols());
  const auto ci = static_cast<std::ptrdiff_t>(kernel.rows() / 2), cj = static_cast<std::ptrdiff_t>(kernel.cols() / 2);
  double sum = 0.0;
  for (double v : kernel.values()) sum += v;
  Image out(f.rows(), f.cols());
  for (std::ptrdiff_t n = 0; n < N; ++n)
    for (std::ptrdiff_t m = 0; m < M; ++m) {
      double s = 0.0;
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(kernel.rows()); ++i)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(kernel.cols()); ++j) {
          const auto a = (((n - (i - ci)) % N) + N) % N;
          const auto b = (((m - (j - cj)) % M) + M) % M;
          s += kernel(std::size_t(i), std::size_t(j)) * f(std::size_t(a), std::size_t(b));
        }
      out(std::size_t(n), std::size_t(m)) = s / sum;
    }
  return out;
}

/// Literal array transcription of the shrinkage update, with every transform
/// replaced by the naive DFT. State layout: channel 2k is the x-part of
/// direction k, channel 2k + 1 the y-part.
class LiteralShrinkage {
public:
  LiteralShrinkage(ComplexGrid H, ComplexGrid Wi, std::size_t L) : H_(std::move(H)), Wi_(std::move(Wi)), L_(L) {
    A_ = ComplexGrid(H_.rows(), H_.cols());
    for (std::size_t i = 0; i < A_.size(); ++i) A_[i] = H_[i] * Wi_[i];
  }

  using Stack = std::vector<Image>;

  Stack MDG(const Image& u) const {
    const std::size_t N = u.rows(), M = u.cols();
    Image ux(N, M), uy(N, M);
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m) {
        ux(n, m) = u(n, m) - u((n + N - 1) % N, m);
        uy(n, m) = u(n, m) - u(n, (m + M - 1) % M);
      }
    Stack v;
    for (std::size_t k = 0; k < L_; ++k) {
      const double theta = (std::numbers::pi / 2.0 / double(L_)) * double(k);
      const double alpha = std::cos(theta), beta = std::sin(theta);
      v.push_back(alpha * ux + beta * uy);
      v.push_back(alpha * uy + (-beta) * ux);
    }
    return v;
  }

  Image MDD(const Stack& v) const {
    const std::size_t N = v[0].rows(), M = v[0].cols();
    Image ux(N, M), uy(N, M);
    for (std::size_t k = 0; k < L_; ++k) {
      const double theta = (std::numbers::pi / 2.0 / double(L_)) * double(k);
      const double alpha = std::cos(theta), beta = std::sin(theta);
      ux += alpha * v[2 * k] + (-beta) * v[2 * k + 1];
      uy += beta * v[2 * k] + alpha * v[2 * k + 1];
    }
    Image u(N, M);
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m)
        u(n, m) = (ux((n + 1) % N, m) - ux(n, m)) + (uy(n, (m + 1) % M) - uy(n, m));
    return u;
  }

  Image operator_A(const Stack& v, const ComplexGrid& A) const {
    ComplexGrid s = naive_dft(MDD(v));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= A[i];
    Image u = naive_idft_real(s);
    u *= 1.0 / double(L_);
    return u;
  }

  Stack operator_A_star(const Image& u) const {
    ComplexGrid s = naive_dft(u);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= std::conj(A_[i]);
    Stack v = MDG(naive_idft_real(s));
    for (Image& c : v) c *= -1.0 / double(L_);
    return v;
  }

  Stack operator_R(const Stack& v) const {
    ComplexGrid s = naive_dft(MDD(v));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= A_[i] * std::conj(A_[i]);
    Stack out = MDG(naive_idft_real(s));
    for (Image& c : out) c *= -1.0 / double(L_ * L_);
    return out;
  }

  static double wthresh_s(double x, double tau) {
    const double a = std::abs(x) - tau;
    return a > 0.0 ? (x > 0.0 ? a : -a) : 0.0;
  }

  /// The K-update loop; `each` receives the state after every update.
  template <class F>
  Image run(const Image& g, double c, double tau, std::size_t K, F&& each) const {
    const Stack b = operator_A_star(g);
    Stack v = MDG(g);
    for (std::size_t k = 1; k <= K; ++k) {
      const Stack r = operator_R(v);
      for (std::size_t ch = 0; ch < v.size(); ++ch)
        for (std::size_t i = 0; i < v[ch].size(); ++i)
          v[ch][i] = wthresh_s(v[ch][i] + (1.0 / c) * (b[ch][i] - r[ch][i]), tau);
      v = MDG(operator_A(v, Wi_));
      each(k, v);
    }
    return operator_A(v, Wi_);
  }

private:
  ComplexGrid H_, Wi_, A_;
  std::size_t L_;
};

/// Max |a - b| over the stack, relative to max |b|.
inline double stack_distance(const LiteralShrinkage::Stack& ref, const Field& f) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t ch = 0; ch < ref.size(); ++ch) {
    const auto got = f.channel(ch);
    for (std::size_t i = 0; i < got.size(); ++i) {
      diff = std::max(diff, std::abs(got[i] - ref[ch][i]));
      scale = std::max(scale, std::abs(ref[ch][i]));
    }
  }
  return scale == 0.0 ? diff : diff / scale;
}

}  // namespace tvis_test
