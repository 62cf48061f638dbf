#pragma once

#include <array>
#include <cstddef>

namespace giou {

/// Forward-mode dual number carrying N tangent directions.
///
/// Comparisons look at the value only, so branching code (min/max, overlap
/// tests) follows the same path as its double instantiation and the tangent
/// is the derivative of the branch actually taken.
template <std::size_t N>
struct Dual {
  double value = 0.0;
  std::array<double, N> grad{};

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT: implicit lift of constants
  constexpr Dual(double v, const std::array<double, N>& g) : value(v), grad(g) {}

  /// Independent variable `i` of N.
  static constexpr Dual variable(double v, std::size_t i) {
    Dual d(v);
    d.grad[i] = 1.0;
    return d;
  }

  constexpr Dual operator-() const {
    Dual r(-value);
    for (std::size_t i = 0; i < N; ++i) r.grad[i] = -grad[i];
    return r;
  }

  friend constexpr Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.value + b.value);
    for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] + b.grad[i];
    return r;
  }

  friend constexpr Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.value - b.value);
    for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] - b.grad[i];
    return r;
  }

  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.value * b.value);
    for (std::size_t i = 0; i < N; ++i) r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
    return r;
  }

  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.value / b.value);
    const double inv = 1.0 / b.value;
    for (std::size_t i = 0; i < N; ++i) r.grad[i] = (a.grad[i] - r.value * b.grad[i]) * inv;
    return r;
  }

  friend constexpr bool operator<(const Dual& a, const Dual& b) { return a.value < b.value; }
  friend constexpr bool operator>(const Dual& a, const Dual& b) { return a.value > b.value; }
  friend constexpr bool operator<=(const Dual& a, const Dual& b) { return a.value <= b.value; }
  friend constexpr bool operator>=(const Dual& a, const Dual& b) { return a.value >= b.value; }
};

}  // namespace giou
