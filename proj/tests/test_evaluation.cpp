#include <doctest.h>

#include <set>

#include "slr/datagen.hpp"
#include "slr/errors.hpp"
#include "slr/evaluation.hpp"
#include "test_support.hpp"

using namespace slr;

namespace {

GestureSequence stub_sequence(int class_id, int signer_id, HandMode mode = HandMode::Single) {
  GestureSequence seq;
  seq.frames.assign(2, canonical_pose());
  seq.class_id = class_id;
  seq.class_name = "c" + std::to_string(class_id);
  seq.signer_id = signer_id;
  seq.hand_mode = mode;
  return seq;
}

GenConfig tiny_gen(int classes, int signers, int reps) {
  GenConfig cfg;
  cfg.num_classes = classes;
  cfg.num_signers = signers;
  cfg.reps_per_signer = reps;
  cfg.frames_per_gesture = 10;
  cfg.seed = 77;
  return cfg;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("split_loocv partitions by signer") {
  std::vector<GestureSequence> dataset;
  for (int s = 0; s < 10; ++s) {
    for (int c = 0; c < 3; ++c) dataset.push_back(stub_sequence(c, s));
  }

  const std::vector<LoocvFold> folds = split_loocv(dataset);
  REQUIRE(folds.size() == 10);
  std::set<std::size_t> seen_test;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    CHECK(folds[f].held_out_signer == static_cast<int>(f));  // ordered by signer
    CHECK(folds[f].test_indices.size() == 3);
    CHECK(folds[f].train_indices.size() == 27);
    for (std::size_t i : folds[f].test_indices) {
      CHECK(dataset[i].signer_id == folds[f].held_out_signer);
      CHECK(seen_test.insert(i).second);  // each sequence held out exactly once
    }
    std::set<std::size_t> all(folds[f].train_indices.begin(), folds[f].train_indices.end());
    for (std::size_t i : folds[f].test_indices) CHECK(all.insert(i).second);
    CHECK(all.size() == dataset.size());  // union of the pair is the dataset
  }
  CHECK(seen_test.size() == dataset.size());
}

TEST_CASE("split_loocv minimal and error cases") {
  std::vector<GestureSequence> two = {stub_sequence(0, 4), stub_sequence(1, 9)};
  const auto folds = split_loocv(two);
  REQUIRE(folds.size() == 2);
  CHECK(folds[0].held_out_signer == 4);
  CHECK(folds[0].test_indices == std::vector<std::size_t>{0});
  CHECK(folds[0].train_indices == std::vector<std::size_t>{1});
  CHECK(folds[1].held_out_signer == 9);
  CHECK(folds[1].test_indices == std::vector<std::size_t>{1});
  CHECK(folds[1].train_indices == std::vector<std::size_t>{0});

  std::vector<GestureSequence> one = {stub_sequence(0, 3), stub_sequence(1, 3)};
  CHECK_THROWS_AS(split_loocv(one), InsufficientSigners);
}

TEST_CASE("filter_by_hand_mode relabels densely") {
  std::vector<GestureSequence> dataset;
  dataset.push_back(stub_sequence(2, 0, HandMode::Single));
  dataset.push_back(stub_sequence(5, 0, HandMode::Double));
  dataset.push_back(stub_sequence(7, 1, HandMode::Single));
  dataset.push_back(stub_sequence(5, 1, HandMode::Double));

  const FilteredDataset singles = filter_by_hand_mode(dataset, HandFilter::Single);
  CHECK(singles.num_classes == 2);
  CHECK(singles.indices == std::vector<std::size_t>{0, 2});
  CHECK(singles.labels == std::vector<int>{0, 1});  // 2 -> 0, 7 -> 1
  CHECK(singles.class_names == std::vector<std::string>{"c2", "c7"});

  const FilteredDataset doubles = filter_by_hand_mode(dataset, HandFilter::Double);
  CHECK(doubles.num_classes == 1);
  CHECK(doubles.labels == std::vector<int>{0, 0});

  const FilteredDataset all = filter_by_hand_mode(dataset, HandFilter::Combined);
  CHECK(all.num_classes == 3);
  CHECK(all.indices.size() == 4);
  CHECK(all.labels == std::vector<int>{0, 1, 2, 1});
}

TEST_CASE("evaluate: uniform logits fall back to class 0, counts conserved") {
  ModelParams zero_model;
  LstmLayerParams lp;
  lp.w_f = Eigen::MatrixXd::Zero(2, 2 + kFeatureSize);
  lp.w_i = lp.w_f;
  lp.w_c = lp.w_f;
  lp.w_o = lp.w_f;
  lp.b_f = Eigen::VectorXd::Zero(2);
  lp.b_i = lp.b_f;
  lp.b_c = lp.b_f;
  lp.b_o = lp.b_f;
  zero_model.layers.push_back(lp);
  zero_model.w_out = Eigen::MatrixXd::Zero(3, 2);
  zero_model.b_out = Eigen::VectorXd::Zero(3);

  std::vector<Sample> test;
  for (int n = 0; n < 9; ++n) {
    test.push_back({Eigen::MatrixXd::Random(4, kFeatureSize), n % 3});
  }

  const EvalOutcome outcome = evaluate(zero_model, test);
  CHECK(outcome.confusion.col(0).sum() == 9);  // every prediction is class 0
  CHECK(outcome.confusion.sum() == 9);
  CHECK(outcome.accuracy == doctest::Approx(3.0 / 9.0));

  const EvalOutcome again = evaluate(zero_model, test);
  CHECK(outcome.confusion == again.confusion);  // deterministic tie-break

  CHECK_THROWS_AS(evaluate(zero_model, {}), EmptyTestSet);
}

TEST_CASE("evaluate: a trained model reaches a diagonal confusion") {
  const auto dataset = generate_dataset(tiny_gen(2, 2, 3));
  const FilteredDataset filtered = filter_by_hand_mode(dataset, HandFilter::Combined);
  std::vector<Sample> samples;
  for (std::size_t j = 0; j < filtered.indices.size(); ++j) {
    samples.push_back({sequence_to_features(
                           normalize_sequence(dataset[filtered.indices[j]]).first),
                       filtered.labels[j]});
  }

  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.seed = 5;
  auto [model, log] = train(samples, cfg, init_params(2, kFeatureSize, 8, 1, 5));
  const EvalOutcome outcome = evaluate(model, samples);
  CHECK(outcome.accuracy == 1.0);
  CHECK(outcome.confusion(0, 1) == 0);
  CHECK(outcome.confusion(1, 0) == 0);
  CHECK(outcome.confusion.sum() == static_cast<int>(samples.size()));
}

TEST_CASE("run_loocv: report structure, mean, determinism") {
  const auto dataset = generate_dataset(tiny_gen(3, 3, 3));

  LoocvConfig cfg;
  cfg.train.epochs = 8;
  cfg.train.seed = 3;
  cfg.model.hidden_size = 8;
  cfg.model.num_layers = 1;
  cfg.jobs = 2;

  const EvalReport report = run_loocv(dataset, cfg);
  REQUIRE(report.folds.size() == 3);
  double sum = 0.0;
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    CHECK(report.folds[f].held_out_signer == static_cast<int>(f));
    CHECK(report.folds[f].confusion.sum() == 9);  // 3 classes x 3 reps held out
    sum += report.folds[f].accuracy;
  }
  CHECK(report.mean_accuracy == sum / 3.0);

  // Same config, serial execution: identical report.
  LoocvConfig serial = cfg;
  serial.jobs = 1;
  const EvalReport again = run_loocv(dataset, serial);
  CHECK(render_report_table(report) == render_report_table(again));
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    CHECK(report.folds[f].confusion == again.folds[f].confusion);
  }
}

TEST_CASE("run_loocv: filters, class counts, errors") {
  const auto dataset = generate_dataset(tiny_gen(3, 2, 3));  // classes: 2 single, 1 double

  std::set<int> single_ids, double_ids, all_ids;
  for (const auto& seq : dataset) {
    (seq.hand_mode == HandMode::Single ? single_ids : double_ids).insert(seq.class_id);
    all_ids.insert(seq.class_id);
  }
  CHECK(single_ids.size() + double_ids.size() == all_ids.size());
  for (int id : single_ids) CHECK(double_ids.count(id) == 0);

  LoocvConfig cfg;
  cfg.train.epochs = 2;
  cfg.model.hidden_size = 4;
  cfg.model.num_layers = 1;

  cfg.hand_filter = HandFilter::Double;  // only one double-handed class here
  CHECK_THROWS_AS(run_loocv(dataset, cfg), InsufficientClasses);

  cfg.hand_filter = HandFilter::Single;
  const EvalReport report = run_loocv(dataset, cfg);
  CHECK(report.folds.size() == 2);
  CHECK(report.hand_mode_filter == HandFilter::Single);
  CHECK(report.folds[0].confusion.rows() == 2);

  const auto one_signer = generate_dataset(tiny_gen(3, 1, 3));
  cfg.hand_filter = HandFilter::Combined;
  CHECK_THROWS_AS(run_loocv(one_signer, cfg), InsufficientSigners);
}

TEST_CASE("render_report_table format") {
  EvalReport report;
  report.folds.push_back({0, 0.96296, Eigen::MatrixXi::Zero(2, 2)});
  report.folds.push_back({1, 0.5, Eigen::MatrixXi::Zero(2, 2)});
  report.mean_accuracy = 0.731480;
  const std::string table = render_report_table(report);
  CHECK(table ==
        "signer  accuracy\n"
        "0       0.9630\n"
        "1       0.5000\n"
        "mean    0.7315\n");

  Eigen::MatrixXi confusion(2, 2);
  confusion << 5, 1, 0, 6;
  CHECK(render_confusion(confusion) == "5,1\n0,6\n");
}

}  // TEST_SUITE
