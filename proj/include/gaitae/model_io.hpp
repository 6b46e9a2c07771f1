#pragma once

// Versioned JSON model files. Every real number is written as a decimal
// with 17 significant digits so that save -> load is bit-exact.
//
// {
//   "format_version": 1,
//   "axis_tag": "X",
//   "joint_order": ["SpineBase", "Head", ...],          // kept joints, input order
//   "topology": [{"in": 17, "out": 128, "activation": "sigmoid"}, ...],
//   "weights": [[w00, w01, ...], ...],                  // per layer, row-major out x in
//   "biases": [[b0, ...], ...],
//   "train_mse": 0.0123,                                // null when untrained
//   "train_config": {...},
//   "seed": 42
// }

#include <filesystem>
#include <string>

#include "gaitae/autoencoder.hpp"

namespace gaitae {

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const AxisModel& model);
AxisModel model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const AxisModel& model);
AxisModel load_model(const std::filesystem::path& path);

// "%.17g"; used by every writer that must round-trip doubles.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gaitae
