#pragma once

#include <compare>
#include <limits>
#include <string>

namespace roe {

/// Nonnegative extended real: a finite value or the dedicated infinity
/// sentinel. Addition saturates at infinity.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr explicit ExtReal(double v) : v_(v) {}

  static constexpr ExtReal infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }

  constexpr bool is_finite() const { return v_ != std::numeric_limits<double>::infinity(); }
  constexpr bool is_infinite() const { return !is_finite(); }

  // Raw value; +inf for the sentinel.
  constexpr double value() const { return v_; }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ExtReal(a.v_ + b.v_);
  }
  friend constexpr ExtReal operator*(double s, ExtReal a) {
    if (a.is_infinite()) return s == 0.0 ? ExtReal(0.0) : infinity();
    return ExtReal(s * a.v_);
  }

  friend constexpr bool operator==(ExtReal a, ExtReal b) = default;
  friend constexpr auto operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }
  friend constexpr bool operator<(ExtReal a, double b) { return a.v_ < b; }
  friend constexpr bool operator<=(ExtReal a, double b) { return a.v_ <= b; }
  friend constexpr bool operator>(ExtReal a, double b) { return a.v_ > b; }
  friend constexpr bool operator>=(ExtReal a, double b) { return a.v_ >= b; }

  std::string to_string() const;

 private:
  double v_ = 0.0;
};

inline constexpr ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }
inline constexpr ExtReal min(ExtReal a, ExtReal b) { return a < b ? a : b; }

}  // namespace roe
