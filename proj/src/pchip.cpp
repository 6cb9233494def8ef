#include "otto/pchip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otto {

Pchip::Pchip(double x0, double h, std::vector<double> y) : x0_(x0), h_(h), y_(std::move(y)) {
  const std::size_t n = y_.size();
  if (n < 2) throw std::invalid_argument("pchip needs >= 2 points");
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / h_;
  m_.assign(n, 0.0);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0)
      m_[i] = 0.0;
    else
      m_[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
  }
}

std::size_t Pchip::cell(double x) const {
  double pos = (x - x0_) / h_;
  auto i = static_cast<std::ptrdiff_t>(pos);
  i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(y_.size()) - 2);
  return static_cast<std::size_t>(i);
}

double Pchip::eval(double x) const {
  std::size_t i = cell(x);
  double t = (x - (x0_ + h_ * static_cast<double>(i))) / h_;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  double h10 = t3 - 2.0 * t2 + t;
  double h01 = -2.0 * t3 + 3.0 * t2;
  double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h_ * m_[i] + h01 * y_[i + 1] + h11 * h_ * m_[i + 1];
}

double Pchip::deriv(double x) const {
  std::size_t i = cell(x);
  double t = (x - (x0_ + h_ * static_cast<double>(i))) / h_;
  double t2 = t * t;
  double d00 = (6.0 * t2 - 6.0 * t) / h_;
  double d10 = 3.0 * t2 - 4.0 * t + 1.0;
  double d01 = (-6.0 * t2 + 6.0 * t) / h_;
  double d11 = 3.0 * t2 - 2.0 * t;
  return d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
}

}  // namespace otto
