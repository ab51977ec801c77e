#include "shrinker/cutoff.hpp"

#include "shrinker/error.hpp"

namespace shrinker {

namespace {
double smooth(double u) { return u * u * u * (10 + u * (-15 + 6 * u)); }
double smooth_d(double u) { return 30 * u * u * (1 - u) * (1 - u); }
double smooth_int(double u) { return u * u * u * u * (2.5 + u * (-3 + u)); }  // \int_0^u smooth
}  // namespace

CutoffProfile::CutoffProfile(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0) || epsilon > 1) fail(ErrorCode::Parameter, "radial-flow", "cutoff epsilon must lie in (0, 1]");
  delta_ = 0.8 * epsilon / (1 + epsilon);
  height_ = 1 / (1 - delta_);
}

double CutoffProfile::value(double s) const {
  if (s <= 1) return 0.0;
  if (s >= 2) return 1.0;
  const double d = delta_, c = height_;
  if (s < 1 + d) return c * d * smooth_int((s - 1) / d);
  if (s <= 2 - d) return c * (d / 2 + (s - 1 - d));
  return c * (d / 2 + (1 - 2 * d) + d * (0.5 - smooth_int((2 - s) / d)));
}

double CutoffProfile::slope(double s) const {
  if (s <= 1 || s >= 2) return 0.0;
  const double d = delta_, c = height_;
  if (s < 1 + d) return c * smooth((s - 1) / d);
  if (s <= 2 - d) return c;
  return c * smooth((2 - s) / d);
}

double CutoffProfile::curvature(double s) const {
  if (s <= 1 || s >= 2) return 0.0;
  const double d = delta_, c = height_;
  if (s < 1 + d) return c * smooth_d((s - 1) / d) / d;
  if (s <= 2 - d) return 0.0;
  return -c * smooth_d((2 - s) / d) / d;
}

}  // namespace shrinker
