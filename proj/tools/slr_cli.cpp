#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slr/dataio.hpp"
#include "slr/datagen.hpp"
#include "slr/errors.hpp"
#include "slr/evaluation.hpp"
#include "slr/geometry.hpp"
#include "slr/nn.hpp"
#include "slr/training.hpp"

namespace {

slr::HandFilter parse_hand(const std::string& value) {
  if (value == "single") return slr::HandFilter::Single;
  if (value == "double") return slr::HandFilter::Double;
  return slr::HandFilter::Combined;
}

/// Filtered, optionally normalized samples for train/eval.
struct PreparedData {
  std::vector<slr::Sample> samples;
  int num_classes = 0;
};

PreparedData prepare(const std::vector<slr::GestureSequence>& dataset,
                     slr::HandFilter hand, bool normalize) {
  const slr::FilteredDataset filtered = slr::filter_by_hand_mode(dataset, hand);
  if (filtered.num_classes < 2) {
    throw slr::InsufficientClasses("need at least 2 classes after filtering, got " +
                                   std::to_string(filtered.num_classes));
  }
  PreparedData out;
  out.num_classes = filtered.num_classes;
  out.samples.resize(filtered.indices.size());
  for (std::size_t j = 0; j < filtered.indices.size(); ++j) {
    const slr::GestureSequence& seq = dataset[filtered.indices[j]];
    if (normalize) {
      out.samples[j].features =
          slr::sequence_to_features(slr::normalize_sequence(seq).first);
    } else {
      out.samples[j].features = slr::sequence_to_features(seq);
    }
    out.samples[j].label = filtered.labels[j];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sign gesture recognition pipeline"};
  app.require_subcommand(1);

  // generate
  std::string gen_out;
  slr::GenConfig gen_cfg;
  auto* generate = app.add_subcommand("generate", "write a synthetic gesture dataset");
  generate->add_option("--out", gen_out, "output directory")->required();
  generate->add_option("--classes", gen_cfg.num_classes, "number of gesture classes");
  generate->add_option("--signers", gen_cfg.num_signers, "number of signers");
  generate->add_option("--reps", gen_cfg.reps_per_signer, "repetitions per signer");
  generate->add_option("--frames", gen_cfg.frames_per_gesture, "frames per gesture");
  generate->add_option("--noise", gen_cfg.noise_sigma, "joint noise sigma, meters");
  generate->add_option("--seed", gen_cfg.seed, "generator seed");

  // normalize
  std::string norm_in, norm_out;
  bool norm_strict = false;
  auto* normalize = app.add_subcommand("normalize", "normalize every sequence of a dataset");
  normalize->add_option("--in", norm_in, "input dataset directory")->required();
  normalize->add_option("--out", norm_out, "output dataset directory")->required();
  normalize->add_flag("--strict", norm_strict, "fail on degenerate frames");

  // shared train/eval/loocv options
  struct TrainFlags {
    std::string data;
    int epochs = 30;
    int hidden = 128;
    int layers = 2;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    bool no_normalize = false;
    std::string hand = "combined";
  };

  auto add_train_flags = [](CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--data", f.data, "dataset directory")->required();
    cmd->add_option("--epochs", f.epochs, "training epochs");
    cmd->add_option("--hidden", f.hidden, "hidden units per layer");
    cmd->add_option("--layers", f.layers, "LSTM layers");
    cmd->add_option("--lr", f.lr, "learning rate");
    cmd->add_option("--seed", f.seed, "training seed");
    cmd->add_flag("--no-normalize", f.no_normalize, "feed raw coordinates");
    cmd->add_option("--hand", f.hand, "single|double|combined")
        ->check(CLI::IsMember({"single", "double", "combined"}));
  };

  TrainFlags train_flags;
  std::string train_model_out;
  auto* train_cmd = app.add_subcommand("train", "train a model on a whole dataset");
  add_train_flags(train_cmd, train_flags);
  train_cmd->add_option("--out", train_model_out, "output model file")->required();

  std::string eval_data, eval_model;
  bool eval_no_normalize = false;
  bool eval_confusion = false;
  std::string eval_hand = "combined";
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a dataset");
  eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
  eval_cmd->add_option("--model", eval_model, "model file")->required();
  eval_cmd->add_flag("--no-normalize", eval_no_normalize, "feed raw coordinates");
  eval_cmd->add_option("--hand", eval_hand, "single|double|combined")
      ->check(CLI::IsMember({"single", "double", "combined"}));
  eval_cmd->add_flag("--confusion", eval_confusion, "also print the confusion matrix");

  TrainFlags loocv_flags;
  int loocv_jobs = 0;
  bool loocv_confusion = false;
  auto* loocv_cmd = app.add_subcommand("loocv", "leave-one-signer-out cross validation");
  add_train_flags(loocv_cmd, loocv_flags);
  loocv_cmd->add_option("--jobs", loocv_jobs, "concurrent folds (default: auto)");
  loocv_cmd->add_flag("--confusion", loocv_confusion, "also print per-fold confusion matrices");

  std::uint64_t gradcheck_seed = 0;
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference check of BPTT");
  gradcheck_cmd->add_option("--seed", gradcheck_seed, "model/input seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(generate)) {
      const auto dataset = slr::generate_dataset(gen_cfg);
      slr::write_dataset(dataset, gen_out);
      std::cout << dataset.size() << " sequences written\n";
      return 0;
    }

    if (app.got_subcommand(normalize)) {
      const auto dataset = slr::read_dataset(norm_in);
      slr::NormalizationConfig cfg;
      cfg.strict = norm_strict;
      std::vector<slr::GestureSequence> normalized;
      normalized.reserve(dataset.size());
      std::size_t degenerate_frames = 0;
      for (const auto& seq : dataset) {
        auto [out_seq, reports] = slr::normalize_sequence(seq, cfg);
        for (const auto& r : reports) degenerate_frames += r.degenerate ? 1 : 0;
        normalized.push_back(std::move(out_seq));
      }
      slr::write_dataset(normalized, norm_out);
      std::cout << normalized.size() << " sequences normalized, " << degenerate_frames
                << " degenerate frames\n";
      return 0;
    }

    if (app.got_subcommand(train_cmd)) {
      const auto dataset = slr::read_dataset(train_flags.data);
      const PreparedData data =
          prepare(dataset, parse_hand(train_flags.hand), !train_flags.no_normalize);

      slr::TrainConfig cfg;
      cfg.epochs = train_flags.epochs;
      cfg.learning_rate = train_flags.lr;
      cfg.seed = train_flags.seed;

      slr::ModelParams model =
          slr::init_params(data.num_classes, slr::kFeatureSize, train_flags.hidden,
                           train_flags.layers, train_flags.seed);
      auto [trained, log] = slr::train(
          data.samples, cfg, std::move(model), [](int epoch, const slr::EpochStats& s) {
            std::printf("epoch %d loss %.6f acc %.4f\n", epoch, s.mean_loss, s.accuracy);
            std::fflush(stdout);
          });
      slr::write_model(trained, train_model_out);
      std::cerr << "model written to " << train_model_out << "\n";
      return 0;
    }

    if (app.got_subcommand(eval_cmd)) {
      const auto dataset = slr::read_dataset(eval_data);
      const slr::ModelParams model = slr::read_model(eval_model);
      const PreparedData data = prepare(dataset, parse_hand(eval_hand), !eval_no_normalize);
      if (data.num_classes != model.num_classes()) {
        throw slr::DimensionMismatch(
            "model expects " + std::to_string(model.num_classes()) + " classes, dataset has " +
            std::to_string(data.num_classes));
      }
      const slr::EvalOutcome outcome = slr::evaluate(model, data.samples);
      std::printf("accuracy %.4f\n", outcome.accuracy);
      if (eval_confusion) std::cout << slr::render_confusion(outcome.confusion);
      return 0;
    }

    if (app.got_subcommand(loocv_cmd)) {
      const auto dataset = slr::read_dataset(loocv_flags.data);
      slr::LoocvConfig cfg;
      cfg.hand_filter = parse_hand(loocv_flags.hand);
      cfg.normalize = !loocv_flags.no_normalize;
      cfg.train.epochs = loocv_flags.epochs;
      cfg.train.learning_rate = loocv_flags.lr;
      cfg.train.seed = loocv_flags.seed;
      cfg.model.hidden_size = loocv_flags.hidden;
      cfg.model.num_layers = loocv_flags.layers;
      cfg.jobs = loocv_jobs;

      const slr::EvalReport report = slr::run_loocv(dataset, cfg);
      std::cout << slr::render_report_table(report);
      if (loocv_confusion) {
        for (const auto& fold : report.folds) {
          std::cout << "confusion signer " << fold.held_out_signer << "\n"
                    << slr::render_confusion(fold.confusion);
        }
      }
      return 0;
    }

    if (app.got_subcommand(gradcheck_cmd)) {
      const slr::GradCheckResult result = slr::gradcheck_small_model(gradcheck_seed);
      std::printf("max rel err %.3e\n", result.max_rel_err);
      if (result.max_rel_err < 1e-6) return 0;
      std::cerr << "gradcheck failed, worst parameter " << result.worst_param << "\n";
      return 1;
    }
  } catch (const slr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  return 0;
}
