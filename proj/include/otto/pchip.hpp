#pragma once

#include <cstddef>
#include <vector>

namespace otto {

// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes) on a uniform grid.
class Pchip {
 public:
  Pchip() = default;
  Pchip(double x0, double h, std::vector<double> y);

  double eval(double x) const;
  double deriv(double x) const;
  double slope_at(std::size_t i) const { return m_[i]; }

  double x_lo() const { return x0_; }
  double x_hi() const { return x0_ + h_ * static_cast<double>(y_.size() - 1); }

 private:
  std::size_t cell(double x) const;
  double x0_ = 0.0, h_ = 1.0;
  std::vector<double> y_, m_;
};

}  // namespace otto
