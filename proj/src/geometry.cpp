#include "slr/geometry.hpp"

#include <cmath>

#include "slr/errors.hpp"

namespace slr {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Rotations smaller than this are snapped to exactly zero so that
// normalizing an already-normalized frame is a bit-for-bit no-op.
constexpr double kThetaSnap = 1e-12;

}  // namespace

std::pair<SkeletonFrame, Vec3> translate_to_origin(const SkeletonFrame& frame) {
  const Vec3 spine = frame[JointId::Spine];
  SkeletonFrame out;
  for (int k = 0; k < kJointCount; ++k) {
    out.joints[k] = frame.joints[k] - spine;
  }
  return {out, -spine};
}

Vec3 body_plane_normal(const SkeletonFrame& frame, double epsilon) {
  const Vec3 c = frame[JointId::Spine];
  const Vec3 cl = frame[JointId::ShoulderLeft] - c;
  const Vec3 cr = frame[JointId::ShoulderRight] - c;
  const Vec3 n = cross(cr, cl);
  const double len = norm(n);
  if (len < epsilon) {
    throw DegenerateFrame("spine and shoulders are collinear; body plane undefined");
  }
  return (1.0 / len) * n;
}

double rotation_angle(const Vec3& unit_normal, const NormalizationConfig& config,
                      bool* degenerate) {
  const double px = unit_normal.x;
  const double pz = unit_normal.z;
  if (std::hypot(px, pz) < config.epsilon) {
    if (config.strict) {
      throw DegenerateProjection("body plane is horizontal; facing angle undefined");
    }
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  double theta = std::atan2(px, pz);
  if (theta <= -kPi) theta = kPi;  // keep the (-pi, pi] contract
  return theta;
}

Vec3 rotate_about_y(const Vec3& v, double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  return {v.x * c + v.z * s, v.y, -v.x * s + v.z * c};
}

SkeletonFrame rotate_about_y(const SkeletonFrame& frame, double alpha) {
  if (alpha == 0.0) return frame;  // exact identity, incl. signed zeros
  SkeletonFrame out;
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  for (int k = 0; k < kJointCount; ++k) {
    const Vec3& v = frame.joints[k];
    out.joints[k] = {v.x * c + v.z * s, v.y, -v.x * s + v.z * c};
  }
  return out;
}

std::pair<SkeletonFrame, NormalizationReport> normalize_frame(
    const SkeletonFrame& frame, const NormalizationConfig& config) {
  auto [translated, translation] = translate_to_origin(frame);

  NormalizationReport report;
  report.translation = translation;

  double theta = 0.0;
  const Vec3 c = translated[JointId::Spine];
  const Vec3 cl = translated[JointId::ShoulderLeft] - c;
  const Vec3 cr = translated[JointId::ShoulderRight] - c;
  const Vec3 n = cross(cr, cl);
  const double len = norm(n);
  if (len < config.epsilon) {
    if (config.strict) {
      throw DegenerateFrame("spine and shoulders are collinear; body plane undefined");
    }
    report.degenerate = true;
  } else {
    theta = rotation_angle((1.0 / len) * n, config, &report.degenerate);
  }
  if (std::abs(theta) < kThetaSnap) theta = 0.0;

  report.theta_rad = theta;
  SkeletonFrame out = rotate_about_y(translated, -theta);
  // The spine is exactly the rotation origin; writing it keeps the zeros
  // positive, so renormalizing is a bit-for-bit no-op.
  out[JointId::Spine] = {0.0, 0.0, 0.0};
  return {std::move(out), report};
}

std::pair<GestureSequence, std::vector<NormalizationReport>> normalize_sequence(
    const GestureSequence& seq, const NormalizationConfig& config) {
  GestureSequence out = seq;
  std::vector<NormalizationReport> reports;
  reports.reserve(seq.frames.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    auto [frame, report] = normalize_frame(seq.frames[t], config);
    out.frames[t] = frame;
    reports.push_back(report);
  }
  return {std::move(out), std::move(reports)};
}

}  // namespace slr
