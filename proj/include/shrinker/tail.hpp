#pragma once

#include <optional>
#include <variant>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace shrinker {

using Vec3 = Eigen::Vector3d;

// The part of the plane {<x - center, normal> = 0} outside the disk of
// `radius` around `center`.
struct PlaneTail {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double radius = 1.0;
};

// The part of the infinite cylinder of `radius` about the line
// center + z*axis with |z| > half_length.
struct CylinderTail {
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double radius = 1.0;
  double half_length = 1.0;
};

using AnalyticTail = std::variant<PlaneTail, CylinderTail>;

// Integral of (4 pi t0)^{-1} exp(-|x - x0|^2 / (4 t0)) over the tail. With
// `outside_radius`, only points with |x - x0| > outside_radius count.
double tail_density(const AnalyticTail& tail, const Vec3& x0, double t0,
                    std::optional<double> outside_radius = std::nullopt);

// Tail of s(S - t) given the tail of S.
AnalyticTail transform_tail(const AnalyticTail& tail, const Vec3& t, double s);

// Tail after x -> R x + b, R orthogonal.
AnalyticTail rigid_transform_tail(const AnalyticTail& tail, const Eigen::Matrix3d& R,
                                  const Vec3& b);

}  // namespace shrinker
