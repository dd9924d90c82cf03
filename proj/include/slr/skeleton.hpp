#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace slr {

/// Kinect v1 SDK joint ordering; indices 0-19 are dense and stable.
enum class JointId : int {
  HipCenter = 0,
  Spine = 1,
  ShoulderCenter = 2,
  Head = 3,
  ShoulderLeft = 4,
  ElbowLeft = 5,
  WristLeft = 6,
  HandLeft = 7,
  ShoulderRight = 8,
  ElbowRight = 9,
  WristRight = 10,
  HandRight = 11,
  HipLeft = 12,
  KneeLeft = 13,
  AnkleLeft = 14,
  FootLeft = 15,
  HipRight = 16,
  KneeRight = 17,
  AnkleRight = 18,
  FootRight = 19,
};

inline constexpr int kJointCount = 20;
inline constexpr int kFeatureSize = 3 * kJointCount;

const char* joint_name(JointId id);

/// Sensor-frame coordinates in meters: X right, Y up, Z toward the sensor.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
  friend Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// 20 joint positions at one timestep, indexed by JointId.
struct SkeletonFrame {
  std::array<Vec3, kJointCount> joints{};

  Vec3& operator[](JointId id) { return joints[static_cast<int>(id)]; }
  const Vec3& operator[](JointId id) const { return joints[static_cast<int>(id)]; }

  friend bool operator==(const SkeletonFrame&, const SkeletonFrame&) = default;
};

bool is_finite(const SkeletonFrame& frame);

enum class HandMode { Single, Double };

struct GestureSequence {
  std::vector<SkeletonFrame> frames;
  int class_id = 0;
  std::string class_name;
  int signer_id = 0;
  int repetition = 0;
  HandMode hand_mode = HandMode::Single;
  double rotation_deg = 0.0;  // generation-time ground truth, informational

  friend bool operator==(const GestureSequence&, const GestureSequence&) = default;
};

/// Throws InvalidConfig if the sequence violates its invariants
/// (empty frames, non-finite joints, negative ids).
void validate(const GestureSequence& seq);

/// (x, y, z) of joint k at components 3k..3k+2, in JointId order.
Eigen::VectorXd flatten_frame(const SkeletonFrame& frame);

/// T x 60 matrix; row t is flatten_frame(frames[t]).
Eigen::MatrixXd sequence_to_features(const GestureSequence& seq);

}  // namespace slr
