#include "gymlab/core.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

namespace gymlab {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double extended_sum(std::span<const double> values) {
  for (double v : values) {
    if (std::isnan(v) || v == -kInf) throw Error("non-finite summand other than +inf");
    if (v == kInf) return kInf;
  }
  return pairwise_sum(values);
}

std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ValidationError("not a decimal number: '" + s + "'");
  return v;
}

}  // namespace gymlab
