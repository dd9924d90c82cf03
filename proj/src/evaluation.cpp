#include "slr/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <thread>

#include "slr/errors.hpp"
#include "slr/rng.hpp"

namespace slr {

std::vector<LoocvFold> split_loocv(const std::vector<GestureSequence>& dataset) {
  std::map<int, std::vector<std::size_t>> by_signer;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_signer[dataset[i].signer_id].push_back(i);
  }
  if (by_signer.size() < 2) {
    throw InsufficientSigners("leave-one-signer-out needs at least 2 signers, got " +
                              std::to_string(by_signer.size()));
  }

  std::vector<LoocvFold> folds;
  folds.reserve(by_signer.size());
  for (const auto& [signer, test_indices] : by_signer) {
    LoocvFold fold;
    fold.held_out_signer = signer;
    fold.test_indices = test_indices;
    fold.train_indices.reserve(dataset.size() - test_indices.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset[i].signer_id != signer) fold.train_indices.push_back(i);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

FilteredDataset filter_by_hand_mode(const std::vector<GestureSequence>& dataset,
                                    HandFilter filter) {
  FilteredDataset out;
  std::map<int, std::string> kept_classes;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const GestureSequence& seq = dataset[i];
    const bool keep = filter == HandFilter::Combined ||
                      (filter == HandFilter::Single && seq.hand_mode == HandMode::Single) ||
                      (filter == HandFilter::Double && seq.hand_mode == HandMode::Double);
    if (!keep) continue;
    out.indices.push_back(i);
    kept_classes.emplace(seq.class_id, seq.class_name);
  }

  std::map<int, int> dense;
  for (const auto& [class_id, name] : kept_classes) {
    dense.emplace(class_id, static_cast<int>(dense.size()));
    out.class_names.push_back(name);
  }
  out.num_classes = static_cast<int>(dense.size());

  out.labels.reserve(out.indices.size());
  for (std::size_t i : out.indices) {
    out.labels.push_back(dense.at(dataset[i].class_id));
  }
  return out;
}

EvalOutcome evaluate(const ModelParams& model, const std::vector<Sample>& test) {
  if (test.empty()) throw EmptyTestSet("evaluation set is empty");
  const int k = static_cast<int>(model.num_classes());

  EvalOutcome out;
  out.confusion = Eigen::MatrixXi::Zero(k, k);
  std::size_t correct = 0;
  for (const Sample& sample : test) {
    if (sample.label < 0 || sample.label >= k) {
      throw LabelOutOfRange("test label " + std::to_string(sample.label) +
                            " outside model class range");
    }
    const Eigen::VectorXd logits = forward_logits(model, sample.features);
    int pred = 0;
    for (int c = 1; c < k; ++c) {
      if (logits[c] > logits[pred]) pred = c;  // ties stay at the lowest index
    }
    out.confusion(sample.label, pred) += 1;
    if (pred == sample.label) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  return out;
}

EvalReport run_loocv(const std::vector<GestureSequence>& dataset, const LoocvConfig& config) {
  const FilteredDataset filtered = filter_by_hand_mode(dataset, config.hand_filter);
  if (filtered.num_classes < 2) {
    throw InsufficientClasses("need at least 2 classes after filtering, got " +
                              std::to_string(filtered.num_classes));
  }

  // Normalize and featurize once; folds only select.
  std::vector<Sample> samples(filtered.indices.size());
  std::vector<int> signer(filtered.indices.size());
  for (std::size_t j = 0; j < filtered.indices.size(); ++j) {
    const GestureSequence& seq = dataset[filtered.indices[j]];
    if (config.normalize) {
      samples[j].features = sequence_to_features(normalize_sequence(seq, config.norm).first);
    } else {
      samples[j].features = sequence_to_features(seq);
    }
    samples[j].label = filtered.labels[j];
    signer[j] = seq.signer_id;
  }

  std::map<int, std::vector<std::size_t>> by_signer;
  for (std::size_t j = 0; j < samples.size(); ++j) by_signer[signer[j]].push_back(j);
  if (by_signer.size() < 2) {
    throw InsufficientSigners("leave-one-signer-out needs at least 2 signers, got " +
                              std::to_string(by_signer.size()));
  }

  std::vector<int> signers;
  for (const auto& [id, _] : by_signer) signers.push_back(id);

  std::vector<FoldResult> folds(signers.size());
  std::atomic<std::size_t> next{0};

  auto run_fold = [&](std::size_t fold_idx) {
    const int held_out = signers[fold_idx];
    std::vector<Sample> train_set, test_set;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      (signer[j] == held_out ? test_set : train_set).push_back(samples[j]);
    }

    TrainConfig fold_train = config.train;
    fold_train.seed = config.train.seed + static_cast<std::uint64_t>(held_out);
    ModelParams model =
        init_params(filtered.num_classes, kFeatureSize, config.model.hidden_size,
                    config.model.num_layers, fold_train.seed);
    model = train(train_set, fold_train, std::move(model)).first;

    const EvalOutcome outcome = evaluate(model, test_set);
    folds[fold_idx] = {held_out, outcome.accuracy, outcome.confusion};
  };

  unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(signers.size()));

  if (jobs <= 1) {
    for (std::size_t f = 0; f < signers.size(); ++f) run_fold(f);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t f = next.fetch_add(1); f < signers.size(); f = next.fetch_add(1)) {
          run_fold(f);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  report.hand_mode_filter = config.hand_filter;
  report.folds = std::move(folds);
  double sum = 0.0;
  for (const FoldResult& f : report.folds) sum += f.accuracy;
  report.mean_accuracy = sum / static_cast<double>(report.folds.size());
  return report;
}

std::string render_report_table(const EvalReport& report) {
  char line[64];
  std::string out = "signer  accuracy\n";
  for (const FoldResult& fold : report.folds) {
    std::snprintf(line, sizeof(line), "%-6d  %.4f\n", fold.held_out_signer, fold.accuracy);
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-6s  %.4f\n", "mean", report.mean_accuracy);
  out += line;
  return out;
}

std::string render_confusion(const Eigen::MatrixXi& confusion) {
  std::string out;
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    for (Eigen::Index c = 0; c < confusion.cols(); ++c) {
      if (c > 0) out += ',';
      out += std::to_string(confusion(r, c));
    }
    out += '\n';
  }
  return out;
}

const char* hand_filter_name(HandFilter filter) {
  switch (filter) {
    case HandFilter::Single: return "single";
    case HandFilter::Double: return "double";
    default: return "combined";
  }
}

}  // namespace slr
