#pragma once

#include <cstddef>
#include <vector>

namespace eislab {

// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
// slopes, three-point end conditions). Monotone data give a monotone
// interpolant; linear data are reproduced exactly.
class MonotoneCubic {
 public:
  struct Value {
    double y = 0.0;
    double dy = 0.0;
    double d2y = 0.0;
  };

  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  // Throws DomainError outside [front, back] beyond a relative slack of 1e-12.
  Value eval(double x) const;
  double operator()(double x) const { return eval(x).y; }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }
  bool empty() const { return x_.empty(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return d_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> d_;
};

}  // namespace eislab
