#pragma once

#include <apd/error.hpp>

#include <cfloat>
#include <cmath>
#include <compare>
#include <optional>
#include <sstream>
#include <string>

namespace apd {

/// A possibly astronomical positive number written as a tower of `base`s
/// of the given height with `top` at the apex: height 0 is just `top`,
/// height h is base^(value at height h-1).
class TowerValue {
 public:
  TowerValue() = default;

  static TowerValue exact(unsigned base, double value) { return TowerValue(base, 0, value); }

  static TowerValue tower(unsigned base, unsigned height, double top) { return TowerValue(base, height, top); }

  unsigned base() const { return base_; }
  unsigned height() const { return height_; }
  double top() const { return top_; }
  bool is_exact() const { return height_ == 0; }

  /// Collapses the lowest levels while the value still fits in a double.
  TowerValue normalized() const {
    TowerValue t = *this;
    while (t.height_ > 0) {
      const double next = t.top_ * std::log(static_cast<double>(base_));
      if (next >= std::log(DBL_MAX)) break;
      t.top_ = std::exp(next);
      --t.height_;
    }
    return t;
  }

  /// The value as a double, when representable.
  std::optional<double> value() const {
    const TowerValue t = normalized();
    if (t.height_ == 0) return t.top_;
    return std::nullopt;
  }

  /// base^this.
  TowerValue exp_base() const { return TowerValue(base_, height_ + 1, top_).normalized(); }

  /// log_base(this); requires a value > 0.
  TowerValue log_base() const {
    const TowerValue t = normalized();
    if (t.height_ > 0) return TowerValue(base_, t.height_ - 1, t.top_);
    require(t.top_ > 0.0, ErrorKind::InvalidArgument, "log of a nonpositive tower value");
    return TowerValue(base_, 0, std::log(t.top_) / std::log(static_cast<double>(base_)));
  }

  friend std::partial_ordering operator<=>(const TowerValue& a, const TowerValue& b) {
    require(a.base_ == b.base_, ErrorKind::InvalidArgument, "comparing towers of different bases");
    const TowerValue x = a.normalized(), y = b.normalized();
    // After normalization a taller tower exceeds DBL_MAX, hence any shorter one.
    if (x.height_ != y.height_) return x.height_ <=> y.height_;
    return x.top_ <=> y.top_;
  }

  friend bool operator==(const TowerValue& a, const TowerValue& b) { return (a <=> b) == 0; }

  std::string str() const {
    std::ostringstream os;
    os.precision(6);
    if (height_ == 0)
      os << top_;
    else
      os << "tower(" << base_ << ", height " << height_ << ", top " << top_ << ")";
    return os.str();
  }

 private:
  TowerValue(unsigned base, unsigned height, double top) : base_(base), height_(height), top_(top) {
    require(base >= 2, ErrorKind::InvalidArgument, "tower base must be at least 2");
  }

  unsigned base_ = 2;
  unsigned height_ = 0;
  double top_ = 0.0;
};

/// One inequality from a parameter schedule, evaluated in log space.
struct PlanCheck {
  std::string name;
  bool pass = false;
  double lhs = 0.0;  ///< natural log of the left side unless noted
  double rhs = 0.0;
  std::string note;
  bool skipped = false;
};

}  // namespace apd
