#pragma once

// Dense real grids (images and stacks of gradient channels), inner products,
// norms and the zero-mean signal space.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvis {

/// Thrown when two operands disagree in shape or channel count.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iteration produces non-finite values or fails to converge.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed or unreadable files.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Boundary { periodic, replicative };

inline const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "replicative";
}

/// Real N x M image, row-major. Row index n runs along a column.
class Image {
public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}
  Image(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw ShapeError("Image: data size does not match rows*cols");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t n, std::size_t m) { return data_[n * cols_ + m]; }
  double operator()(std::size_t n, std::size_t m) const { return data_[n * cols_ + m]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Image& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  Image& operator+=(const Image& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Image& operator-=(const Image& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Image& operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
  }
  Image& operator+=(double s) {
    for (double& x : data_) x += s;
    return *this;
  }

  friend Image operator+(Image a, const Image& b) { return a += b; }
  friend Image operator-(Image a, const Image& b) { return a -= b; }
  friend Image operator*(double s, Image a) { return a *= s; }

  bool operator==(const Image&) const = default;

private:
  void require_same(const Image& o) const {
    if (!same_shape(o)) throw ShapeError("Image: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Stack of 2L channels of N x M reals, ordered (vx^0, vy^0, ..., vx^{L-1}, vy^{L-1}).
class Field {
public:
  Field() = default;
  Field(std::size_t rows, std::size_t cols, std::size_t directions, double value = 0.0)
      : rows_(rows), cols_(cols), directions_(directions),
        data_(2 * directions * rows * cols, value) {
    if (directions == 0) throw ShapeError("Field: need at least one direction");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t directions() const { return directions_; }
  std::size_t channels() const { return 2 * directions_; }
  std::size_t plane() const { return rows_ * cols_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> channel(std::size_t c) { return {data_.data() + c * plane(), plane()}; }
  std::span<const double> channel(std::size_t c) const {
    return {data_.data() + c * plane(), plane()};
  }
  std::span<double> x(std::size_t k) { return channel(2 * k); }
  std::span<double> y(std::size_t k) { return channel(2 * k + 1); }
  std::span<const double> x(std::size_t k) const { return channel(2 * k); }
  std::span<const double> y(std::size_t k) const { return channel(2 * k + 1); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Field& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && directions_ == o.directions_;
  }

  Field& operator+=(const Field& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  bool operator==(const Field&) const = default;

private:
  void require_same(const Field& o) const {
    if (!same_shape(o)) throw ShapeError("Field: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t directions_ = 0;
  std::vector<double> data_;
};

struct Norms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Norms norms(std::span<const double> x) {
  Norms r;
  double sq = 0.0;
  for (double v : x) {
    const double a = std::abs(v);
    r.l1 += a;
    sq += v * v;
    r.linf = std::max(r.linf, a);
  }
  r.l2 = std::sqrt(sq);
  return r;
}

inline bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

inline double inner_product(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ShapeError("inner_product: shape mismatch");
  return detail::dot(a.values(), b.values());
}

inline double inner_product(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw ShapeError("inner_product: shape mismatch");
  return detail::dot(a.values(), b.values());
}

inline Norms norms(const Image& x) { return detail::norms(x.values()); }
inline Norms norms(const Field& x) { return detail::norms(x.values()); }

inline bool all_finite(const Image& x) { return detail::all_finite(x.values()); }
inline bool all_finite(const Field& x) { return detail::all_finite(x.values()); }

inline double mean(const Image& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.size() ? s / static_cast<double>(f.size()) : 0.0;
}

/// f - mean(f) * 1.
inline Image zero_mean_project(const Image& f) {
  Image out = f;
  out += -mean(f);
  return out;
}

/// Membership test for the zero-mean space: |sum f| <= tol * N*M * max|f|.
inline bool in_zero_mean_space(const Image& f, double tol = 1e-9) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  const double scale = static_cast<double>(f.size()) * norms(f).linf;
  return std::abs(s) <= tol * scale;
}

inline Image ones(std::size_t rows, std::size_t cols) { return Image(rows, cols, 1.0); }

}  // namespace tvis
