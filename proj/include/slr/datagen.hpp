#pragma once

#include <cstdint>
#include <vector>

#include "slr/skeleton.hpp"

namespace slr {

struct GenConfig {
  int num_classes = 30;  // first 16/30 of them single-handed
  int num_signers = 10;
  int reps_per_signer = 9;  // must be divisible by rotation_deg_set size
  int frames_per_gesture = 45;
  double noise_sigma = 0.01;       // meters, isotropic per joint coordinate
  double translation_range = 0.5;  // +/- per axis, meters
  std::vector<double> rotation_deg_set = {0.0, 45.0, 90.0};
  std::uint64_t seed = 0;
};

/// Number of single-handed classes: 16/30 of num_classes, at least one of
/// each mode for num_classes >= 2.
int single_handed_class_count(int num_classes);

/// Neutral standing pose with the spine at the origin and shoulders at
/// +/-0.2 m; the base every generated gesture starts from.
SkeletonFrame canonical_pose();

/// Deterministic synthetic dataset: class-specific arm trajectories on the
/// canonical pose, per-signer limb-scale and speed modifiers, Gaussian joint
/// noise, then a scheduled Y-rotation and a random translation. Output is
/// ordered by (class, signer, repetition) and is a pure function of the
/// config.
std::vector<GestureSequence> generate_dataset(const GenConfig& config);

/// Mean inter-class over mean intra-class trajectory distance on normalized
/// sequences; > 1 means classes are separable.
double class_separability_check(const std::vector<GestureSequence>& dataset);

}  // namespace slr
