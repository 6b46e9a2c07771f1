#include "gaitae/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaitae/error.hpp"

namespace gaitae {

namespace {

using nlohmann::json;

void append_array(std::string& out, const double* data, std::size_t n) {
  out += '[';
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ", ";
    out += format_double(data[i]);
  }
  out += ']';
}

json train_config_json(const TrainConfig& c) {
  return json{{"rho", c.rho},
              {"sparsity_weight", c.sparsity_weight},
              {"l2_weight", c.l2_weight},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"seed", c.seed},
              {"momentum", c.momentum}};
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::parse, std::string("model file: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("model file: bad field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::numeric, "cannot serialize a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string model_to_json(const AxisModel& model) {
  model.validate();
  const auto& layers = model.topology.layers;

  // Metadata goes through nlohmann; parameter arrays are emitted by hand so
  // the digit count is fixed at 17.
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kModelFormatVersion) + ",\n";
  out += "  \"axis_tag\": \"" + std::string(axis_name(model.axis)) + "\",\n";

  json order = json::array();
  if (model.topology.input_dim() == kKeptJointCount) {
    const JointMask mask = JointMask::standard();
    for (std::size_t j : mask.kept) order.push_back(std::string(joint_name(j)));
  }
  out += "  \"joint_order\": " + order.dump() + ",\n";

  json topo = json::array();
  for (const auto& l : layers) {
    topo.push_back({{"in", l.in_dim}, {"out", l.out_dim}, {"activation", activation_name(l.activation)}});
  }
  out += "  \"topology\": " + topo.dump() + ",\n";

  out += "  \"weights\": [";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    // Eigen is column-major; copy into a row-major buffer.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w =
        model.params[i].weights;
    out += i ? ",\n    " : "\n    ";
    append_array(out, w.data(), static_cast<std::size_t>(w.size()));
  }
  out += "\n  ],\n";
  out += "  \"biases\": [";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    append_array(out, model.params[i].bias.data(), static_cast<std::size_t>(model.params[i].bias.size()));
  }
  out += "\n  ],\n";
  out += "  \"train_mse\": " + (model.train_mse ? format_double(*model.train_mse) : std::string("null")) + ",\n";

  json cfg = train_config_json(model.hyper);
  out += "  \"train_config\": {";
  out += "\"rho\": " + format_double(model.hyper.rho);
  out += ", \"sparsity_weight\": " + format_double(model.hyper.sparsity_weight);
  out += ", \"l2_weight\": " + format_double(model.hyper.l2_weight);
  out += ", \"learning_rate\": " + format_double(model.hyper.learning_rate);
  out += ", \"batch_size\": " + cfg["batch_size"].dump();
  out += ", \"epochs\": " + cfg["epochs"].dump();
  out += ", \"seed\": " + cfg["seed"].dump();
  out += ", \"momentum\": " + cfg["momentum"].dump();
  out += "},\n";
  out += "  \"seed\": " + std::to_string(model.hyper.seed) + "\n";
  out += "}\n";
  return out;
}

AxisModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("model file: ") + e.what());
  }
  const int version = required<int>(j, "format_version");
  if (version != kModelFormatVersion) {
    throw Error(ErrorKind::parse, "model file: unsupported format_version " + std::to_string(version));
  }

  AxisModel m;
  m.axis = parse_axis(required<std::string>(j, "axis_tag"));
  for (const auto& l : required<json>(j, "topology")) {
    m.topology.layers.push_back({required<std::size_t>(l, "in"), required<std::size_t>(l, "out"),
                                 parse_activation(required<std::string>(l, "activation"))});
  }
  m.topology.validate();

  const auto weights = required<std::vector<std::vector<double>>>(j, "weights");
  const auto biases = required<std::vector<std::vector<double>>>(j, "biases");
  const auto& layers = m.topology.layers;
  if (weights.size() != layers.size() || biases.size() != layers.size()) {
    throw Error(ErrorKind::parse, "model file: parameter layer count does not match topology");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto rows = static_cast<Eigen::Index>(layers[i].out_dim);
    const auto cols = static_cast<Eigen::Index>(layers[i].in_dim);
    if (weights[i].size() != layers[i].out_dim * layers[i].in_dim || biases[i].size() != layers[i].out_dim) {
      throw Error(ErrorKind::parse, "model file: layer " + std::to_string(i) + " has the wrong number of parameters");
    }
    DenseLayer p;
    p.weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        weights[i].data(), rows, cols);
    p.bias = Eigen::Map<const Eigen::VectorXd>(biases[i].data(), rows);
    m.params.push_back(std::move(p));
  }

  if (!j.contains("train_mse")) throw Error(ErrorKind::parse, "model file: missing field 'train_mse'");
  if (!j["train_mse"].is_null()) m.train_mse = required<double>(j, "train_mse");

  const json& c = required<json>(j, "train_config");
  m.hyper.rho = required<double>(c, "rho");
  m.hyper.sparsity_weight = required<double>(c, "sparsity_weight");
  m.hyper.l2_weight = required<double>(c, "l2_weight");
  m.hyper.learning_rate = required<double>(c, "learning_rate");
  m.hyper.batch_size = required<std::size_t>(c, "batch_size");
  m.hyper.epochs = required<std::size_t>(c, "epochs");
  m.hyper.seed = required<std::uint64_t>(c, "seed");
  m.hyper.momentum = required<bool>(c, "momentum");
  if (required<std::uint64_t>(j, "seed") != m.hyper.seed) {
    throw Error(ErrorKind::parse, "model file: seed disagrees with train_config.seed");
  }
  m.validate();
  return m;
}

void save_model(const std::filesystem::path& path, const AxisModel& model) {
  write_text_file(path, model_to_json(model));
}

AxisModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

}  // namespace gaitae
