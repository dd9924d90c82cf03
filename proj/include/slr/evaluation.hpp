#pragma once

#include <string>
#include <vector>

#include "slr/geometry.hpp"
#include "slr/training.hpp"

namespace slr {

enum class HandFilter { Single, Double, Combined };

struct FoldResult {
  int held_out_signer = -1;
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // rows: true class, cols: predicted class
};

struct EvalReport {
  std::vector<FoldResult> folds;  // ordered by signer id
  double mean_accuracy = 0.0;
  HandFilter hand_mode_filter = HandFilter::Combined;
};

/// One leave-one-signer-out split, as indices into the source dataset.
struct LoocvFold {
  int held_out_signer = -1;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// One fold per distinct signer_id, ordered by signer id. Throws
/// InsufficientSigners with fewer than 2 signers.
std::vector<LoocvFold> split_loocv(const std::vector<GestureSequence>& dataset);

/// Hand-mode filter with dense class relabeling (sorted original class ids
/// map to 0..K-1).
struct FilteredDataset {
  std::vector<std::size_t> indices;      // into the source dataset
  std::vector<int> labels;               // dense label per kept sequence
  std::vector<std::string> class_names;  // by dense label
  int num_classes = 0;
};

FilteredDataset filter_by_hand_mode(const std::vector<GestureSequence>& dataset,
                                    HandFilter filter);

/// Argmax predictions (ties to the lowest class index), accuracy and
/// confusion counts over a labeled test set.
struct EvalOutcome {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;
};

EvalOutcome evaluate(const ModelParams& model, const std::vector<Sample>& test);

struct ModelConfig {
  int hidden_size = 128;
  int num_layers = 2;
};

struct LoocvConfig {
  HandFilter hand_filter = HandFilter::Combined;
  bool normalize = true;
  NormalizationConfig norm;
  TrainConfig train;
  ModelConfig model;
  int jobs = 0;  // 0: one thread per fold, capped at hardware concurrency
};

/// Full leave-one-signer-out harness: filter, (optionally) normalize, train
/// one model per fold with seed = train.seed + signer_id, evaluate on the
/// held-out signer. Folds may run concurrently; the report is ordered by
/// signer id and deterministic.
EvalReport run_loocv(const std::vector<GestureSequence>& dataset, const LoocvConfig& config);

/// Aligned fold/mean table: the eval and loocv command output.
std::string render_report_table(const EvalReport& report);

/// Confusion counts as comma-separated rows.
std::string render_confusion(const Eigen::MatrixXi& confusion);

const char* hand_filter_name(HandFilter filter);

}  // namespace slr
