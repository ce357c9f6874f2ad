#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>
#include <string>

#include "plancomm/error.hpp"

namespace plancomm {

// Real number extended with +inf and -inf. NaN is unrepresentable:
// operations that would produce it (inf - inf) throw.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  explicit ExtendedReal(double v) : v_(v) {
    if (std::isnan(v)) throw Error("ExtendedReal: NaN");
  }

  static ExtendedReal pos_inf() { return ExtendedReal(std::numeric_limits<double>::infinity()); }
  static ExtendedReal neg_inf() { return ExtendedReal(-std::numeric_limits<double>::infinity()); }
  // -ln(p) for p in [0, 1]; +inf at p == 0.
  static ExtendedReal neg_log(double p) {
    if (p <= 0.0) return pos_inf();
    return ExtendedReal(-std::log(p));
  }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_pos_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
  bool is_neg_inf() const { return v_ == -std::numeric_limits<double>::infinity(); }
  double value() const { return v_; }

  friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b) {
    if (!a.is_finite() && !b.is_finite() && a.v_ == b.v_)
      throw Error("ExtendedReal: undefined difference of equal infinities");
    return ExtendedReal(a.v_ - b.v_);
  }
  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (!a.is_finite() && !b.is_finite() && a.v_ != b.v_)
      throw Error("ExtendedReal: undefined sum of opposite infinities");
    return ExtendedReal(a.v_ + b.v_);
  }
  ExtendedReal operator-() const { return ExtendedReal(-v_); }

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }
  friend std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    return a.v_ <=> b.v_;
  }

  std::string str() const {
    if (is_pos_inf()) return "inf";
    if (is_neg_inf()) return "-inf";
    std::string s = std::to_string(v_);
    return s;
  }
  friend std::ostream& operator<<(std::ostream& os, ExtendedReal x) { return os << x.str(); }

 private:
  double v_ = 0.0;
};

}  // namespace plancomm
