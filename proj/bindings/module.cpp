#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "slr/dataio.hpp"
#include "slr/datagen.hpp"
#include "slr/errors.hpp"
#include "slr/evaluation.hpp"
#include "slr/geometry.hpp"
#include "slr/nn.hpp"
#include "slr/training.hpp"

namespace py = pybind11;
using namespace slr;

PYBIND11_MODULE(_core, m) {
  m.doc() = "sign gesture recognition pipeline: skeleton normalization, LSTM "
            "classifier, LOOCV harness and synthetic data generator";

  // errors
  auto base = py::register_exception<Error>(m, "SlrError", PyExc_RuntimeError);
  py::register_exception<DegenerateFrame>(m, "DegenerateFrame", base);
  py::register_exception<DegenerateProjection>(m, "DegenerateProjection", base);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base);
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", base);
  py::register_exception<TraceMismatch>(m, "TraceMismatch", base);
  py::register_exception<LabelOutOfRange>(m, "LabelOutOfRange", base);
  py::register_exception<InvalidDimension>(m, "InvalidDimension", base);
  py::register_exception<EmptyDataset>(m, "EmptyDataset", base);
  py::register_exception<InsufficientSigners>(m, "InsufficientSigners", base);
  py::register_exception<InsufficientClasses>(m, "InsufficientClasses", base);
  py::register_exception<EmptyTestSet>(m, "EmptyTestSet", base);
  py::register_exception<InvalidConfig>(m, "InvalidConfig", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<MalformedManifest>(m, "MalformedManifest", base);
  py::register_exception<MalformedGesture>(m, "MalformedGesture", base);
  py::register_exception<VersionMismatch>(m, "VersionMismatch", base);
  py::register_exception<TensorShapeMismatch>(m, "TensorShapeMismatch", base);
  py::register_exception<TruncatedFile>(m, "TruncatedFile", base);

  // skeleton
  py::enum_<JointId>(m, "JointId")
      .value("HipCenter", JointId::HipCenter)
      .value("Spine", JointId::Spine)
      .value("ShoulderCenter", JointId::ShoulderCenter)
      .value("Head", JointId::Head)
      .value("ShoulderLeft", JointId::ShoulderLeft)
      .value("ElbowLeft", JointId::ElbowLeft)
      .value("WristLeft", JointId::WristLeft)
      .value("HandLeft", JointId::HandLeft)
      .value("ShoulderRight", JointId::ShoulderRight)
      .value("ElbowRight", JointId::ElbowRight)
      .value("WristRight", JointId::WristRight)
      .value("HandRight", JointId::HandRight)
      .value("HipLeft", JointId::HipLeft)
      .value("KneeLeft", JointId::KneeLeft)
      .value("AnkleLeft", JointId::AnkleLeft)
      .value("FootLeft", JointId::FootLeft)
      .value("HipRight", JointId::HipRight)
      .value("KneeRight", JointId::KneeRight)
      .value("AnkleRight", JointId::AnkleRight)
      .value("FootRight", JointId::FootRight);

  m.attr("JOINT_COUNT") = kJointCount;
  m.attr("FEATURE_SIZE") = kFeatureSize;
  m.def("joint_name", &joint_name);

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("z"))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def(py::self == py::self)
      .def("__repr__", [](const Vec3& v) {
        return "Vec3(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " +
               std::to_string(v.z) + ")";
      });

  py::class_<SkeletonFrame>(m, "SkeletonFrame")
      .def(py::init<>())
      .def("__getitem__",
           [](const SkeletonFrame& f, JointId id) { return f[id]; })
      .def("__setitem__",
           [](SkeletonFrame& f, JointId id, const Vec3& v) { f[id] = v; })
      .def(py::self == py::self)
      .def_property_readonly("joints", [](const SkeletonFrame& f) {
        return std::vector<Vec3>(f.joints.begin(), f.joints.end());
      });

  py::enum_<HandMode>(m, "HandMode")
      .value("Single", HandMode::Single)
      .value("Double", HandMode::Double);

  py::class_<GestureSequence>(m, "GestureSequence")
      .def(py::init<>())
      .def_readwrite("frames", &GestureSequence::frames)
      .def_readwrite("class_id", &GestureSequence::class_id)
      .def_readwrite("class_name", &GestureSequence::class_name)
      .def_readwrite("signer_id", &GestureSequence::signer_id)
      .def_readwrite("repetition", &GestureSequence::repetition)
      .def_readwrite("hand_mode", &GestureSequence::hand_mode)
      .def_readwrite("rotation_deg", &GestureSequence::rotation_deg)
      .def(py::self == py::self);

  m.def("flatten_frame", &flatten_frame, py::arg("frame"));
  m.def("sequence_to_features", &sequence_to_features, py::arg("sequence"));

  // geometry
  py::class_<NormalizationConfig>(m, "NormalizationConfig")
      .def(py::init<>())
      .def_readwrite("epsilon", &NormalizationConfig::epsilon)
      .def_readwrite("strict", &NormalizationConfig::strict);

  py::class_<NormalizationReport>(m, "NormalizationReport")
      .def_readonly("theta_rad", &NormalizationReport::theta_rad)
      .def_readonly("translation", &NormalizationReport::translation)
      .def_readonly("degenerate", &NormalizationReport::degenerate);

  m.def("translate_to_origin", &translate_to_origin, py::arg("frame"));
  m.def("body_plane_normal", &body_plane_normal, py::arg("frame"),
        py::arg("epsilon") = 1e-9);
  m.def(
      "rotation_angle",
      [](const Vec3& normal, const NormalizationConfig& cfg) {
        bool degenerate = false;
        const double theta = rotation_angle(normal, cfg, &degenerate);
        return py::make_tuple(theta, degenerate);
      },
      py::arg("unit_normal"), py::arg("config") = NormalizationConfig{},
      "returns (theta_rad, degenerate)");
  m.def("rotate_about_y",
        py::overload_cast<const SkeletonFrame&, double>(&rotate_about_y),
        py::arg("frame"), py::arg("alpha"));
  m.def("rotate_vec_about_y", py::overload_cast<const Vec3&, double>(&rotate_about_y),
        py::arg("v"), py::arg("alpha"));
  m.def("normalize_frame", &normalize_frame, py::arg("frame"),
        py::arg("config") = NormalizationConfig{});
  m.def("normalize_sequence", &normalize_sequence, py::arg("sequence"),
        py::arg("config") = NormalizationConfig{},
        py::call_guard<py::gil_scoped_release>());

  // datagen
  py::class_<GenConfig>(m, "GenConfig")
      .def(py::init<>())
      .def_readwrite("num_classes", &GenConfig::num_classes)
      .def_readwrite("num_signers", &GenConfig::num_signers)
      .def_readwrite("reps_per_signer", &GenConfig::reps_per_signer)
      .def_readwrite("frames_per_gesture", &GenConfig::frames_per_gesture)
      .def_readwrite("noise_sigma", &GenConfig::noise_sigma)
      .def_readwrite("translation_range", &GenConfig::translation_range)
      .def_readwrite("rotation_deg_set", &GenConfig::rotation_deg_set)
      .def_readwrite("seed", &GenConfig::seed);

  m.def("single_handed_class_count", &single_handed_class_count, py::arg("num_classes"));
  m.def("canonical_pose", &canonical_pose);
  m.def("generate_dataset", &generate_dataset, py::arg("config") = GenConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("class_separability_check", &class_separability_check, py::arg("dataset"),
        py::call_guard<py::gil_scoped_release>());

  // nn
  py::class_<LstmLayerParams>(m, "LstmLayerParams")
      .def_readwrite("w_f", &LstmLayerParams::w_f)
      .def_readwrite("w_i", &LstmLayerParams::w_i)
      .def_readwrite("w_c", &LstmLayerParams::w_c)
      .def_readwrite("w_o", &LstmLayerParams::w_o)
      .def_readwrite("b_f", &LstmLayerParams::b_f)
      .def_readwrite("b_i", &LstmLayerParams::b_i)
      .def_readwrite("b_c", &LstmLayerParams::b_c)
      .def_readwrite("b_o", &LstmLayerParams::b_o)
      .def_property_readonly("hidden_size", &LstmLayerParams::hidden_size)
      .def_property_readonly("input_size", &LstmLayerParams::input_size);

  py::class_<ModelParams>(m, "ModelParams")
      .def_readwrite("layers", &ModelParams::layers)
      .def_readwrite("w_out", &ModelParams::w_out)
      .def_readwrite("b_out", &ModelParams::b_out)
      .def_property_readonly("num_layers", &ModelParams::num_layers)
      .def_property_readonly("input_size", &ModelParams::input_size)
      .def_property_readonly("hidden_size", &ModelParams::hidden_size)
      .def_property_readonly("num_classes", &ModelParams::num_classes);

  m.def("init_params", &init_params, py::arg("num_classes"), py::arg("input_size"),
        py::arg("hidden_size"), py::arg("num_layers"), py::arg("seed"));
  m.def("forward_logits", &forward_logits, py::arg("model"), py::arg("features"),
        py::call_guard<py::gil_scoped_release>());
  m.def("softmax_cross_entropy", &softmax_cross_entropy, py::arg("logits"),
        py::arg("label"));
  m.def(
      "gradcheck",
      [](std::uint64_t seed) {
        const GradCheckResult r = gradcheck_small_model(seed);
        return py::make_tuple(r.max_rel_err, r.worst_param);
      },
      py::arg("seed") = 0, "returns (max_rel_err, worst_param)");

  // training
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("adam_beta1", &TrainConfig::adam_beta1)
      .def_readwrite("adam_beta2", &TrainConfig::adam_beta2)
      .def_readwrite("adam_eps", &TrainConfig::adam_eps)
      .def_readwrite("grad_clip", &TrainConfig::grad_clip)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("shuffle", &TrainConfig::shuffle);

  py::class_<EpochStats>(m, "EpochStats")
      .def_readonly("mean_loss", &EpochStats::mean_loss)
      .def_readonly("accuracy", &EpochStats::accuracy);

  py::class_<TrainLog>(m, "TrainLog").def_readonly("epochs", &TrainLog::epochs);

  py::class_<Sample>(m, "Sample")
      .def(py::init([](const Eigen::MatrixXd& features, int label) {
             return Sample{features, label};
           }),
           py::arg("features"), py::arg("label"))
      .def_readwrite("features", &Sample::features)
      .def_readwrite("label", &Sample::label);

  m.def(
      "train",
      [](const std::vector<Sample>& data, const TrainConfig& cfg, const ModelParams& init) {
        py::gil_scoped_release release;
        return train(data, cfg, init);
      },
      py::arg("data"), py::arg("config"), py::arg("init"));

  // evaluation
  py::enum_<HandFilter>(m, "HandFilter")
      .value("Single", HandFilter::Single)
      .value("Double", HandFilter::Double)
      .value("Combined", HandFilter::Combined);

  py::class_<FoldResult>(m, "FoldResult")
      .def_readonly("held_out_signer", &FoldResult::held_out_signer)
      .def_readonly("accuracy", &FoldResult::accuracy)
      .def_readonly("confusion", &FoldResult::confusion);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("folds", &EvalReport::folds)
      .def_readonly("mean_accuracy", &EvalReport::mean_accuracy)
      .def_readonly("hand_mode_filter", &EvalReport::hand_mode_filter);

  py::class_<LoocvFold>(m, "LoocvFold")
      .def_readonly("held_out_signer", &LoocvFold::held_out_signer)
      .def_readonly("train_indices", &LoocvFold::train_indices)
      .def_readonly("test_indices", &LoocvFold::test_indices);

  py::class_<FilteredDataset>(m, "FilteredDataset")
      .def_readonly("indices", &FilteredDataset::indices)
      .def_readonly("labels", &FilteredDataset::labels)
      .def_readonly("class_names", &FilteredDataset::class_names)
      .def_readonly("num_classes", &FilteredDataset::num_classes);

  py::class_<EvalOutcome>(m, "EvalOutcome")
      .def_readonly("accuracy", &EvalOutcome::accuracy)
      .def_readonly("confusion", &EvalOutcome::confusion);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("hidden_size", &ModelConfig::hidden_size)
      .def_readwrite("num_layers", &ModelConfig::num_layers);

  py::class_<LoocvConfig>(m, "LoocvConfig")
      .def(py::init<>())
      .def_readwrite("hand_filter", &LoocvConfig::hand_filter)
      .def_readwrite("normalize", &LoocvConfig::normalize)
      .def_readwrite("norm", &LoocvConfig::norm)
      .def_readwrite("train", &LoocvConfig::train)
      .def_readwrite("model", &LoocvConfig::model)
      .def_readwrite("jobs", &LoocvConfig::jobs);

  m.def("split_loocv", &split_loocv, py::arg("dataset"));
  m.def("filter_by_hand_mode", &filter_by_hand_mode, py::arg("dataset"), py::arg("filter"));
  m.def("evaluate", &evaluate, py::arg("model"), py::arg("test"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_loocv", &run_loocv, py::arg("dataset"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("render_report_table", &render_report_table, py::arg("report"));
  m.def("render_confusion", &render_confusion, py::arg("confusion"));

  // dataio
  m.def("hex_double", &hex_double, py::arg("value"));
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("directory"),
        py::call_guard<py::gil_scoped_release>());
  m.def("read_dataset", &read_dataset, py::arg("directory"),
        py::call_guard<py::gil_scoped_release>());
  m.def("write_model", &write_model, py::arg("model"), py::arg("path"));
  m.def("read_model", &read_model, py::arg("path"));
}
