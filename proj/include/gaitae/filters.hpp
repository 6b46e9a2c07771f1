#pragma once

// Renders the incoming weights of each sparsity-layer unit as a small
// grayscale "skeleton" image: one pixel per kept joint, brightness
// proportional to the min-max scaled weight.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "gaitae/autoencoder.hpp"

namespace gaitae {

struct PixelPos {
  std::size_t col = 0;
  std::size_t row = 0;

  friend bool operator==(const PixelPos&, const PixelPos&) = default;
};

struct JointLayout {
  std::size_t width = 0;
  std::size_t height = 0;
  std::array<PixelPos, kKeptJointCount> pixels{};  // indexed like the kept joints

  // Frontal 7x9 stick figure, subject's left on the image right.
  static JointLayout standard();
  void validate() const;  // in bounds, no two joints on one pixel
};

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::size_t col, std::size_t row) const { return pixels[row * width + col]; }
};

// One image per unit of layer 0. Non-joint pixels are 0; a unit with
// constant weights renders every joint pixel as 128.
std::vector<GrayImage> export_second_layer_filters(const AxisModel& model,
                                                   const JointLayout& layout = JointLayout::standard());

void write_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_pgm(const std::filesystem::path& path);

// CSV: header `unit,<joint names...>`, one row per unit with the raw
// incoming weights at 17 significant digits.
void write_filter_csv(const std::filesystem::path& path, const AxisModel& model);
Eigen::MatrixXd read_filter_csv(const std::filesystem::path& path);

}  // namespace gaitae
