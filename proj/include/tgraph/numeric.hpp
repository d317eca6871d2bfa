#pragma once

#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace tgraph {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angle reduced to [0, 2pi).
inline double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed difference b - a reduced to (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = std::remainder(b - a, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

/// Distance between two angles on the circle.
inline double angle_dist(double a, double b) { return std::abs(angle_diff(a, b)); }

/// Height difference on the z-circle [-1, 1), reduced to [-1, 1).
inline double wrap_dz(double dz) {
  double r = std::remainder(dz, 2.0);
  if (r >= 1.0) r -= 2.0;
  return r;
}

inline double wrap_z(double z) {
  double r = std::fmod(z + 1.0, 2.0);
  if (r < 0) r += 2.0;
  r -= 1.0;
  if (r >= 1.0) r = -1.0;
  return r;
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Fixed number of significant digits, locale independent.
inline std::string format_sig(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline int sign_of(double v) { return (v > 0) - (v < 0); }

/// Bisection on a bracketing interval [lo, hi] with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, double width) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace tgraph
