#include "slr/skeleton.hpp"

#include "slr/errors.hpp"

namespace slr {

const char* joint_name(JointId id) {
  static constexpr const char* kNames[kJointCount] = {
      "HipCenter",  "Spine",      "ShoulderCenter", "Head",      "ShoulderLeft",
      "ElbowLeft",  "WristLeft",  "HandLeft",       "ShoulderRight",
      "ElbowRight", "WristRight", "HandRight",      "HipLeft",   "KneeLeft",
      "AnkleLeft",  "FootLeft",   "HipRight",       "KneeRight", "AnkleRight",
      "FootRight"};
  return kNames[static_cast<int>(id)];
}

bool is_finite(const SkeletonFrame& frame) {
  for (const Vec3& j : frame.joints) {
    if (!is_finite(j)) return false;
  }
  return true;
}

void validate(const GestureSequence& seq) {
  if (seq.frames.empty()) throw InvalidConfig("gesture sequence has no frames");
  if (seq.class_id < 0) throw InvalidConfig("class_id must be >= 0");
  if (seq.signer_id < 0) throw InvalidConfig("signer_id must be >= 0");
  for (const SkeletonFrame& f : seq.frames) {
    if (!is_finite(f)) throw InvalidConfig("gesture sequence contains non-finite joints");
  }
}

Eigen::VectorXd flatten_frame(const SkeletonFrame& frame) {
  Eigen::VectorXd out(kFeatureSize);
  for (int k = 0; k < kJointCount; ++k) {
    out[3 * k] = frame.joints[k].x;
    out[3 * k + 1] = frame.joints[k].y;
    out[3 * k + 2] = frame.joints[k].z;
  }
  return out;
}

Eigen::MatrixXd sequence_to_features(const GestureSequence& seq) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(seq.frames.size()), kFeatureSize);
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    out.row(t) = flatten_frame(seq.frames[static_cast<std::size_t>(t)]);
  }
  return out;
}

}  // namespace slr
