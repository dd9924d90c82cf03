#pragma once

#include <utility>
#include <vector>

#include "slr/skeleton.hpp"

namespace slr {

struct NormalizationConfig {
  double epsilon = 1e-9;  // degeneracy tolerance on cross-product / projection norms
  bool strict = false;    // error on degenerate frames instead of identity fallback
};

struct NormalizationReport {
  double theta_rad = 0.0;  // signed Y-axis rotation that was removed, in (-pi, pi]
  Vec3 translation{};      // spine-to-origin vector that was applied
  bool degenerate = false;
};

/// Shifts every joint by -spine so the spine midpoint lands exactly at the
/// origin. Returns the moved frame and the applied translation vector.
std::pair<SkeletonFrame, Vec3> translate_to_origin(const SkeletonFrame& frame);

/// Unit normal of the spine/shoulders body plane, oriented so a signer facing
/// the sensor yields +Z (cross(CR, CL); see rotation_angle for the sign
/// convention). Throws DegenerateFrame when the three joints are collinear.
Vec3 body_plane_normal(const SkeletonFrame& frame, double epsilon = 1e-9);

/// Signed facing angle of `unit_normal`: atan2 of its XZ projection against
/// +Z, in (-pi, pi]. A horizontal body plane (projection shorter than
/// config.epsilon) throws DegenerateProjection in strict mode; otherwise the
/// angle is 0 and *degenerate is set when provided.
double rotation_angle(const Vec3& unit_normal, const NormalizationConfig& config,
                      bool* degenerate = nullptr);

/// Rotation about the Y axis: (x, y, z) -> (x cos a + z sin a, y, -x sin a + z cos a).
Vec3 rotate_about_y(const Vec3& v, double alpha);
SkeletonFrame rotate_about_y(const SkeletonFrame& frame, double alpha);

/// Full position+rotation normalization: translate the spine to the origin,
/// then rotate by -theta about Y so the body plane faces +Z.
std::pair<SkeletonFrame, NormalizationReport> normalize_frame(
    const SkeletonFrame& frame, const NormalizationConfig& config = {});

/// Normalizes every frame independently; metadata is preserved. In strict
/// mode the first degenerate frame aborts the sequence.
std::pair<GestureSequence, std::vector<NormalizationReport>> normalize_sequence(
    const GestureSequence& seq, const NormalizationConfig& config = {});

}  // namespace slr
