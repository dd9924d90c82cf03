#include "slr/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "slr/errors.hpp"

namespace slr {

namespace fs = std::filesystem;

namespace {

std::string where(const fs::path& file, std::size_t line) {
  return file.filename().string() + ":" + std::to_string(line);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(text.substr(start));
      break;
    }
    fields.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

bool parse_int(std::string_view token, int& out) {
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string gesture_header() {
  std::string h = "frame";
  char buf[16];
  for (int j = 0; j < kJointCount; ++j) {
    for (const char* axis : {"x", "y", "z"}) {
      std::snprintf(buf, sizeof(buf), ",j%02d%s", j, axis);
      h += buf;
    }
  }
  return h;
}

const std::string kManifestHeader =
    "relative_path\tclass_id\tclass_name\tsigner_id\trepetition\thand_mode\trotation_deg";

std::string trim_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string hex_double(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", value);
  return buf;
}

bool parse_hex_double(std::string_view token, double& out) {
  bool negative = false;
  if (!token.empty() && (token.front() == '-' || token.front() == '+')) {
    negative = token.front() == '-';
    token.remove_prefix(1);
  }
  if (token.size() < 3 || token[0] != '0' || (token[1] != 'x' && token[1] != 'X')) {
    return false;
  }
  token.remove_prefix(2);
  double magnitude = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, magnitude, std::chars_format::hex);
  if (ec != std::errc() || ptr != last || !std::isfinite(magnitude)) return false;
  out = negative ? -magnitude : magnitude;
  return true;
}

void write_dataset(const std::vector<GestureSequence>& dataset, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory " + directory.string() + ": " + ec.message());

  std::set<std::string> used_paths;
  std::string manifest = kManifestHeader + "\n";

  for (const GestureSequence& seq : dataset) {
    validate(seq);
    if (seq.class_name.find('\t') != std::string::npos ||
        seq.class_name.find('\n') != std::string::npos) {
      throw IoError("class_name contains tab or newline: " + seq.class_name);
    }

    const std::string name = "g_" + std::to_string(seq.class_id) + "_" +
                             std::to_string(seq.signer_id) + "_" +
                             std::to_string(seq.repetition) + ".csv";
    if (!used_paths.insert(name).second) {
      throw IoError("duplicate gesture path " + name +
                    " (class/signer/repetition must be unique)");
    }

    std::string body = gesture_header() + "\n";
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
      body += std::to_string(t);
      for (const Vec3& j : seq.frames[t].joints) {
        body += ',';
        body += hex_double(j.x);
        body += ',';
        body += hex_double(j.y);
        body += ',';
        body += hex_double(j.z);
      }
      body += '\n';
    }

    std::ofstream out(directory / name, std::ios::binary);
    if (!out || !(out << body)) {
      throw IoError("cannot write gesture file " + (directory / name).string());
    }

    manifest += name;
    manifest += '\t';
    manifest += std::to_string(seq.class_id);
    manifest += '\t';
    manifest += seq.class_name;
    manifest += '\t';
    manifest += std::to_string(seq.signer_id);
    manifest += '\t';
    manifest += std::to_string(seq.repetition);
    manifest += '\t';
    manifest += seq.hand_mode == HandMode::Single ? "single" : "double";
    manifest += '\t';
    manifest += hex_double(seq.rotation_deg);
    manifest += '\n';
  }

  std::ofstream out(directory / "manifest.tsv", std::ios::binary);
  if (!out || !(out << manifest)) {
    throw IoError("cannot write manifest " + (directory / "manifest.tsv").string());
  }
}

namespace {

GestureSequence read_gesture_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open gesture file " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw MalformedGesture(where(path, 1) + ": empty gesture file");
  }
  if (trim_cr(line) != gesture_header()) {
    throw MalformedGesture(where(path, 1) + ": bad gesture header");
  }

  GestureSequence seq;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 1 + kFeatureSize) {
      throw MalformedGesture(where(path, line_no) + ": expected " +
                             std::to_string(1 + kFeatureSize) + " columns, got " +
                             std::to_string(fields.size()));
    }
    int frame_index = 0;
    if (!parse_int(fields[0], frame_index)) {
      throw MalformedGesture(where(path, line_no) + ": bad frame index '" + fields[0] + "'");
    }
    SkeletonFrame frame;
    for (int j = 0; j < kJointCount; ++j) {
      double xyz[3];
      for (int a = 0; a < 3; ++a) {
        if (!parse_hex_double(fields[static_cast<std::size_t>(1 + 3 * j + a)], xyz[a])) {
          throw MalformedGesture(where(path, line_no) + ": unparsable coordinate '" +
                                 fields[static_cast<std::size_t>(1 + 3 * j + a)] + "'");
        }
      }
      frame.joints[static_cast<std::size_t>(j)] = {xyz[0], xyz[1], xyz[2]};
    }
    seq.frames.push_back(frame);
  }
  if (seq.frames.empty()) {
    throw MalformedGesture(where(path, line_no) + ": gesture has zero frames");
  }
  return seq;
}

}  // namespace

std::vector<GestureSequence> read_dataset(const fs::path& directory) {
  const fs::path manifest_path = directory / "manifest.tsv";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + manifest_path.string());

  std::string line;
  if (!std::getline(in, line) || trim_cr(line) != kManifestHeader) {
    throw MalformedManifest(where(manifest_path, 1) + ": bad or missing manifest header");
  }

  std::vector<GestureSequence> dataset;
  std::set<std::string> seen_paths;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 7) {
      throw MalformedManifest(where(manifest_path, line_no) + ": expected 7 columns, got " +
                              std::to_string(fields.size()));
    }
    const std::string& rel = fields[0];
    if (!seen_paths.insert(rel).second) {
      throw MalformedManifest(where(manifest_path, line_no) + ": duplicate path " + rel);
    }

    GestureSequence meta;
    if (!parse_int(fields[1], meta.class_id) || meta.class_id < 0) {
      throw MalformedManifest(where(manifest_path, line_no) + ": bad class_id '" + fields[1] + "'");
    }
    meta.class_name = fields[2];
    if (!parse_int(fields[3], meta.signer_id) || meta.signer_id < 0) {
      throw MalformedManifest(where(manifest_path, line_no) + ": bad signer_id '" + fields[3] + "'");
    }
    if (!parse_int(fields[4], meta.repetition)) {
      throw MalformedManifest(where(manifest_path, line_no) + ": bad repetition '" + fields[4] + "'");
    }
    if (fields[5] == "single") {
      meta.hand_mode = HandMode::Single;
    } else if (fields[5] == "double") {
      meta.hand_mode = HandMode::Double;
    } else {
      throw MalformedManifest(where(manifest_path, line_no) + ": bad hand_mode '" + fields[5] + "'");
    }
    if (!parse_hex_double(fields[6], meta.rotation_deg)) {
      throw MalformedManifest(where(manifest_path, line_no) + ": bad rotation_deg '" + fields[6] + "'");
    }

    GestureSequence seq = read_gesture_file(directory / rel);
    seq.class_id = meta.class_id;
    seq.class_name = meta.class_name;
    seq.signer_id = meta.signer_id;
    seq.repetition = meta.repetition;
    seq.hand_mode = meta.hand_mode;
    seq.rotation_deg = meta.rotation_deg;
    dataset.push_back(std::move(seq));
  }
  return dataset;
}

void write_model(const ModelParams& model, const fs::path& path) {
  if (model.layers.empty()) throw TensorShapeMismatch("model has no layers");
  const Eigen::Index hidden = model.layers.front().hidden_size();
  Eigen::Index input = model.input_size();
  for (const auto& lp : model.layers) {
    if (lp.hidden_size() != hidden || lp.input_size() != input) {
      throw TensorShapeMismatch("model file format requires a uniform hidden size");
    }
    input = hidden;
  }
  if (model.w_out.cols() != hidden) {
    throw TensorShapeMismatch("head width does not match top hidden size");
  }

  std::string body = "SLRMODEL 1\n";
  body += "layers=" + std::to_string(model.num_layers()) +
          " input=" + std::to_string(model.input_size()) +
          " hidden=" + std::to_string(hidden) +
          " classes=" + std::to_string(model.num_classes()) + "\n";

  for_each_tensor(model, [&](const std::string& name, const auto& tensor) {
    body += name + " " + std::to_string(tensor.rows()) + " " +
            std::to_string(tensor.cols()) + "\n";
    for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
      for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
        if (c > 0) body += ' ';
        body += hex_double(tensor(r, c));
      }
      body += '\n';
    }
  });

  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << body)) throw IoError("cannot write model file " + path.string());
}

ModelParams read_model(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw TruncatedFile(where(path, 1) + ": empty model file");
  {
    std::istringstream header(trim_cr(line));
    std::string magic;
    int version = 0;
    if (!(header >> magic >> version) || magic != "SLRMODEL") {
      throw VersionMismatch(where(path, 1) + ": not an SLRMODEL file");
    }
    if (version != 1) {
      throw VersionMismatch(where(path, 1) + ": unsupported version " + std::to_string(version));
    }
  }

  if (!std::getline(in, line)) throw TruncatedFile(where(path, 2) + ": missing dimension line");
  int layers = 0, input = 0, hidden = 0, classes = 0;
  {
    const std::vector<std::string> fields = split(trim_cr(line), ' ');
    if (fields.size() != 4) throw TruncatedFile(where(path, 2) + ": bad dimension line");
    auto field_value = [&](const std::string& field, const std::string& key, int& out) {
      if (field.rfind(key + "=", 0) != 0 || !parse_int(field.substr(key.size() + 1), out)) {
        throw TruncatedFile(where(path, 2) + ": bad dimension field '" + field + "'");
      }
    };
    field_value(fields[0], "layers", layers);
    field_value(fields[1], "input", input);
    field_value(fields[2], "hidden", hidden);
    field_value(fields[3], "classes", classes);
  }
  if (layers < 1 || input < 1 || hidden < 1 || classes < 2) {
    throw TensorShapeMismatch(where(path, 2) + ": invalid model dimensions");
  }

  // Shape template; values are overwritten below.
  ModelParams model;
  model.layers.resize(static_cast<std::size_t>(layers));
  int layer_input = input;
  for (auto& lp : model.layers) {
    lp.w_f = Eigen::MatrixXd::Zero(hidden, hidden + layer_input);
    lp.w_i = lp.w_f;
    lp.w_c = lp.w_f;
    lp.w_o = lp.w_f;
    lp.b_f = Eigen::VectorXd::Zero(hidden);
    lp.b_i = lp.b_f;
    lp.b_c = lp.b_f;
    lp.b_o = lp.b_f;
    layer_input = hidden;
  }
  model.w_out = Eigen::MatrixXd::Zero(classes, hidden);
  model.b_out = Eigen::VectorXd::Zero(classes);

  std::size_t line_no = 2;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw TruncatedFile(where(path, line_no + 1) + ": unexpected end of file, expected " +
                          std::string(what));
    }
    ++line_no;
    line = trim_cr(line);
  };

  for_each_tensor(model, [&](const std::string& name, auto& tensor) {
    next_line("tensor header");
    const std::vector<std::string> fields = split(line, ' ');
    int rows = 0, cols = 0;
    if (fields.size() != 3 || fields[0] != name || !parse_int(fields[1], rows) ||
        !parse_int(fields[2], cols)) {
      throw TensorShapeMismatch(where(path, line_no) + ": expected tensor header '" + name +
                                " <rows> <cols>', got '" + line + "'");
    }
    if (rows != tensor.rows() || cols != tensor.cols()) {
      throw TensorShapeMismatch(where(path, line_no) + ": tensor " + name + " has shape " +
                                std::to_string(rows) + "x" + std::to_string(cols) +
                                ", expected " + std::to_string(tensor.rows()) + "x" +
                                std::to_string(tensor.cols()));
    }
    Eigen::Index read = 0;
    const Eigen::Index total = tensor.size();
    while (read < total) {
      next_line("tensor values");
      std::istringstream row(line);
      std::string token;
      while (row >> token) {
        if (read >= total) {
          throw TruncatedFile(where(path, line_no) + ": too many values for tensor " + name);
        }
        double value = 0.0;
        if (!parse_hex_double(token, value)) {
          throw TruncatedFile(where(path, line_no) + ": unparsable value '" + token +
                              "' in tensor " + name);
        }
        tensor(read / tensor.cols(), read % tensor.cols()) = value;
        ++read;
      }
    }
  });

  return model;
}

}  // namespace slr
