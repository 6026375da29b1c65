#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gymlab {

using Vec = std::vector<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A value does not satisfy the invariants of its type.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// +inf is the distinguished sentinel for lower semicontinuous test functions
/// taking the value +inf. It absorbs finite summands and orders above all reals.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_pos_inf(double v) { return v == kInf; }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Euclidean norm of (xi, eta).
inline double joint_norm(std::span<const double> xi, double eta) {
  return std::sqrt(dot(xi, xi) + eta * eta);
}

/// Pairwise (tree) summation. The result depends only on the order of the
/// input, never on how work was scheduled to produce it.
double pairwise_sum(std::span<const double> values);

/// Sum in which +inf absorbs; throws Error on NaN or -inf.
double extended_sum(std::span<const double> values);

std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace gymlab
