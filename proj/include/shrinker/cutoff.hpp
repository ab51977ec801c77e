#pragma once

namespace shrinker {

// C^3 profile with phi = 0 on s <= 1, phi = 1 on s >= 2 and
// 0 <= phi' <= 1 + epsilon. phi' is a plateau of height 1/(1 - delta) with
// quintic-smoothstep ramps of width delta = 0.8 epsilon / (1 + epsilon).
class CutoffProfile {
 public:
  explicit CutoffProfile(double epsilon = 0.05);
  double value(double s) const;
  double slope(double s) const;
  double curvature(double s) const;  // phi''
  double epsilon() const { return epsilon_; }
  double max_slope() const { return height_; }
  double ramp_width() const { return delta_; }

 private:
  double epsilon_, delta_, height_;
};

}  // namespace shrinker
