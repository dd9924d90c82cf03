#include "slr/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "slr/errors.hpp"
#include "slr/geometry.hpp"
#include "slr/rng.hpp"

namespace slr {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

struct ClassTrajectory {
  double f1, f2, f3;    // oscillation frequencies per axis
  double p1, p2, p3;    // phases
  double a1, a2, a3;    // amplitudes, meters
  double drift;         // linear vertical drift over the gesture
  double left_lag;      // phase lag of the mirrored arm, fraction of a cycle
};

ClassTrajectory trajectory_for_class(int k) {
  ClassTrajectory t;
  t.f1 = 1.0 + 0.3 * (k % 3);
  t.f2 = 0.7 + 0.3 * ((k / 3) % 3);
  t.f3 = 0.5 + 0.5 * ((k / 9) % 2);
  t.p1 = kTwoPi * (k % 5) / 5.0;
  t.p2 = kTwoPi * ((3 * k + 1) % 7) / 7.0;
  t.p3 = kTwoPi * ((5 * k + 2) % 9) / 9.0;
  t.a1 = 0.07 + 0.015 * (k % 4);
  t.a2 = 0.06 + 0.015 * ((k / 4) % 4);
  t.a3 = 0.06 + 0.01 * ((k / 2) % 3);
  t.drift = 0.04 * ((k % 3) - 1);
  t.left_lag = 0.125 * (k % 4);
  return t;
}

Vec3 arm_offset(const ClassTrajectory& t, double tau) {
  return {t.a1 * std::sin(kTwoPi * t.f1 * tau + t.p1),
          t.a2 * std::sin(kTwoPi * t.f2 * tau + t.p2) + t.drift * tau,
          t.a3 * std::sin(kTwoPi * t.f3 * tau + t.p3)};
}

void move_arm(SkeletonFrame& frame, const Vec3& offset, bool right) {
  const JointId elbow = right ? JointId::ElbowRight : JointId::ElbowLeft;
  const JointId wrist = right ? JointId::WristRight : JointId::WristLeft;
  const JointId hand = right ? JointId::HandRight : JointId::HandLeft;
  frame[elbow] = frame[elbow] + 0.45 * offset;
  frame[wrist] = frame[wrist] + offset;
  frame[hand] = frame[hand] + 1.18 * offset;
}

void validate(const GenConfig& c) {
  if (c.num_classes < 2) throw InvalidConfig("num_classes must be >= 2");
  if (c.num_signers < 1) throw InvalidConfig("num_signers must be >= 1");
  if (c.reps_per_signer < 1) throw InvalidConfig("reps_per_signer must be >= 1");
  if (c.frames_per_gesture < 1) throw InvalidConfig("frames_per_gesture must be >= 1");
  if (c.noise_sigma < 0.0) throw InvalidConfig("noise_sigma must be >= 0");
  if (c.translation_range < 0.0) throw InvalidConfig("translation_range must be >= 0");
  if (c.rotation_deg_set.empty()) throw InvalidConfig("rotation set must not be empty");
  if (c.reps_per_signer % static_cast<int>(c.rotation_deg_set.size()) != 0) {
    throw InvalidConfig("reps_per_signer must be divisible by the rotation set size");
  }
}

}  // namespace

int single_handed_class_count(int num_classes) {
  const int n = static_cast<int>(std::llround(num_classes * 16.0 / 30.0));
  return std::clamp(n, 1, num_classes - 1);
}

SkeletonFrame canonical_pose() {
  SkeletonFrame f;
  f[JointId::HipCenter] = {0.0, -0.30, 0.0};
  f[JointId::Spine] = {0.0, 0.0, 0.0};
  f[JointId::ShoulderCenter] = {0.0, 0.25, 0.0};
  f[JointId::Head] = {0.0, 0.45, 0.0};
  f[JointId::ShoulderLeft] = {-0.20, 0.20, 0.0};
  f[JointId::ElbowLeft] = {-0.28, -0.05, 0.02};
  f[JointId::WristLeft] = {-0.30, -0.28, 0.05};
  f[JointId::HandLeft] = {-0.31, -0.36, 0.06};
  f[JointId::ShoulderRight] = {0.20, 0.20, 0.0};
  f[JointId::ElbowRight] = {0.28, -0.05, 0.02};
  f[JointId::WristRight] = {0.30, -0.28, 0.05};
  f[JointId::HandRight] = {0.31, -0.36, 0.06};
  f[JointId::HipLeft] = {-0.09, -0.32, 0.0};
  f[JointId::KneeLeft] = {-0.10, -0.75, 0.01};
  f[JointId::AnkleLeft] = {-0.10, -1.15, 0.01};
  f[JointId::FootLeft] = {-0.10, -1.22, 0.10};
  f[JointId::HipRight] = {0.09, -0.32, 0.0};
  f[JointId::KneeRight] = {0.10, -0.75, 0.01};
  f[JointId::AnkleRight] = {0.10, -1.15, 0.01};
  f[JointId::FootRight] = {0.10, -1.22, 0.10};
  return f;
}

std::vector<GestureSequence> generate_dataset(const GenConfig& config) {
  validate(config);

  const int singles = single_handed_class_count(config.num_classes);
  const int reps_per_rotation =
      config.reps_per_signer / static_cast<int>(config.rotation_deg_set.size());
  const SkeletonFrame base = canonical_pose();

  std::vector<GestureSequence> dataset;
  dataset.reserve(static_cast<std::size_t>(config.num_classes) *
                  static_cast<std::size_t>(config.num_signers) *
                  static_cast<std::size_t>(config.reps_per_signer));

  for (int k = 0; k < config.num_classes; ++k) {
    const ClassTrajectory traj = trajectory_for_class(k);
    const bool double_handed = k >= singles;

    for (int s = 0; s < config.num_signers; ++s) {
      // Signer identity: self-consistent across repetitions by construction.
      const double limb_scale =
          0.9 + 0.2 * (static_cast<double>(mix64(0x6c696d62u, static_cast<std::uint64_t>(s)) >> 11) * 0x1.0p-53);
      const double speed =
          0.85 + 0.3 * (static_cast<double>(mix64(0x73706431u, static_cast<std::uint64_t>(s)) >> 11) * 0x1.0p-53);

      for (int r = 0; r < config.reps_per_signer; ++r) {
        Rng rng(mix64(config.seed, static_cast<std::uint64_t>(k),
                      static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(r)));

        const double rotation_deg = config.rotation_deg_set[static_cast<std::size_t>(r / reps_per_rotation)];
        const double rotation_rad = rotation_deg * (kTwoPi / 360.0);
        const Vec3 translation = {rng.uniform(-config.translation_range, config.translation_range),
                                  rng.uniform(-config.translation_range, config.translation_range),
                                  rng.uniform(-config.translation_range, config.translation_range)};

        char class_name[24];
        std::snprintf(class_name, sizeof(class_name), "sign_%02d", k);

        GestureSequence seq;
        seq.class_id = k;
        seq.class_name = class_name;
        seq.signer_id = s;
        seq.repetition = r;
        seq.hand_mode = double_handed ? HandMode::Double : HandMode::Single;
        seq.rotation_deg = rotation_deg;
        seq.frames.reserve(static_cast<std::size_t>(config.frames_per_gesture));

        for (int t = 0; t < config.frames_per_gesture; ++t) {
          const double progress =
              config.frames_per_gesture > 1
                  ? static_cast<double>(t) / static_cast<double>(config.frames_per_gesture - 1)
                  : 0.0;
          const double tau = speed * progress;

          SkeletonFrame frame = base;
          const Vec3 right = arm_offset(traj, tau);
          move_arm(frame, right, /*right=*/true);
          if (double_handed) {
            const Vec3 off = arm_offset(traj, tau + traj.left_lag);
            move_arm(frame, {-off.x, off.y, off.z}, /*right=*/false);
          }
          for (Vec3& joint : frame.joints) joint = limb_scale * joint;

          if (config.noise_sigma > 0.0) {
            for (Vec3& joint : frame.joints) {
              joint.x += config.noise_sigma * rng.normal();
              joint.y += config.noise_sigma * rng.normal();
              joint.z += config.noise_sigma * rng.normal();
            }
          }

          frame = rotate_about_y(frame, rotation_rad);
          for (Vec3& joint : frame.joints) joint = joint + translation;
          seq.frames.push_back(frame);
        }

        dataset.push_back(std::move(seq));
      }
    }
  }

  return dataset;
}

double class_separability_check(const std::vector<GestureSequence>& dataset) {
  std::vector<Eigen::MatrixXd> features;
  std::vector<int> labels;
  features.reserve(dataset.size());
  labels.reserve(dataset.size());
  int max_class = -1;
  for (const GestureSequence& seq : dataset) {
    features.push_back(sequence_to_features(normalize_sequence(seq).first));
    labels.push_back(seq.class_id);
    max_class = std::max(max_class, seq.class_id);
  }
  if (max_class < 1) throw InvalidConfig("separability check needs at least 2 classes");

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_class) + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }

  auto distance = [&](std::size_t a, std::size_t b) {
    const Eigen::Index rows = std::min(features[a].rows(), features[b].rows());
    double sum = 0.0;
    for (Eigen::Index t = 0; t < rows; ++t) {
      sum += (features[a].row(t) - features[b].row(t)).norm();
    }
    return sum / static_cast<double>(rows);
  };

  double intra_sum = 0.0;
  std::size_t intra_count = 0;
  for (const auto& group : members) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        intra_sum += distance(group[i], group[j]);
        ++intra_count;
      }
    }
  }

  // Cross-class pairs sampled at two deterministic alignments per class pair.
  double inter_sum = 0.0;
  std::size_t inter_count = 0;
  for (std::size_t c1 = 0; c1 < members.size(); ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < members.size(); ++c2) {
      const auto& g1 = members[c1];
      const auto& g2 = members[c2];
      if (g1.empty() || g2.empty()) continue;
      const std::size_t n = std::min(g1.size(), g2.size());
      for (std::size_t i = 0; i < n; ++i) {
        inter_sum += distance(g1[i], g2[i]);
        inter_sum += distance(g1[i], g2[(i + 7) % g2.size()]);
        inter_count += 2;
      }
    }
  }

  if (intra_count == 0 || inter_count == 0) {
    throw InvalidConfig("separability check needs multiple sequences per class");
  }
  const double intra = intra_sum / static_cast<double>(intra_count);
  const double inter = inter_sum / static_cast<double>(inter_count);
  if (intra == 0.0) return std::numeric_limits<double>::infinity();
  return inter / intra;
}

}  // namespace slr
