#include "gaitae/filters.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gaitae/error.hpp"
#include "gaitae/model_io.hpp"

namespace gaitae {

JointLayout JointLayout::standard() {
  JointLayout l;
  l.width = 7;
  l.height = 9;
  // Kept joints in ascending enumeration order.
  l.pixels = {{
      {3, 4},  // SpineBase
      {3, 0},  // Head
      {5, 1},  // ShoulderLeft
      {6, 3},  // ElbowLeft
      {6, 5},  // HandLeft
      {1, 1},  // ShoulderRight
      {0, 3},  // ElbowRight
      {0, 5},  // HandRight
      {4, 5},  // HipLeft
      {4, 6},  // KneeLeft
      {4, 7},  // AnkleLeft
      {5, 8},  // FootLeft
      {2, 5},  // HipRight
      {2, 6},  // KneeRight
      {2, 7},  // AnkleRight
      {1, 8},  // FootRight
      {3, 1},  // SpineShoulder
  }};
  return l;
}

void JointLayout::validate() const {
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (pixels[i].col >= width || pixels[i].row >= height) {
      throw Error(ErrorKind::argument, "joint layout pixel out of bounds");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (pixels[k] == pixels[i]) throw Error(ErrorKind::argument, "joint layout reuses a pixel");
    }
  }
}

std::vector<GrayImage> export_second_layer_filters(const AxisModel& model, const JointLayout& layout) {
  model.validate();
  layout.validate();
  const Eigen::MatrixXd& w = model.params.front().weights;
  if (static_cast<std::size_t>(w.cols()) != kKeptJointCount) {
    throw Error(ErrorKind::argument, "filter export needs a 17-input model");
  }

  std::vector<GrayImage> images;
  images.reserve(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index unit = 0; unit < w.rows(); ++unit) {
    GrayImage img{layout.width, layout.height, std::vector<std::uint8_t>(layout.width * layout.height, 0)};
    const double lo = w.row(unit).minCoeff();
    const double hi = w.row(unit).maxCoeff();
    for (std::size_t j = 0; j < kKeptJointCount; ++j) {
      std::uint8_t v = 128;
      if (hi > lo) {
        const double t = (w(unit, static_cast<Eigen::Index>(j)) - lo) / (hi - lo);
        v = static_cast<std::uint8_t>(std::lround(255.0 * t));
      }
      img.pixels[layout.pixels[j].row * layout.width + layout.pixels[j].col] = v;
    }
    images.push_back(std::move(img));
  }
  return images;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::string out = "P2\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  for (std::size_t r = 0; r < image.height; ++r) {
    for (std::size_t c = 0; c < image.width; ++c) {
      if (c) out += ' ';
      out += std::to_string(image.at(c, r));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string magic;
  GrayImage img;
  int maxval = 0;
  in >> magic >> img.width >> img.height >> maxval;
  if (magic != "P2" || maxval != 255 || !in) throw Error(ErrorKind::parse, path.string() + ": not an 8-bit P2 graymap");
  img.pixels.resize(img.width * img.height);
  for (auto& p : img.pixels) {
    int v = -1;
    in >> v;
    if (!in || v < 0 || v > 255) throw Error(ErrorKind::parse, path.string() + ": bad pixel value");
    p = static_cast<std::uint8_t>(v);
  }
  return img;
}

void write_filter_csv(const std::filesystem::path& path, const AxisModel& model) {
  model.validate();
  const Eigen::MatrixXd& w = model.params.front().weights;
  std::string out = "unit";
  const JointMask mask = JointMask::standard();
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    out += ',';
    out += w.cols() == static_cast<Eigen::Index>(kKeptJointCount)
               ? std::string(joint_name(mask.kept[static_cast<std::size_t>(j)]))
               : "in" + std::to_string(j);
  }
  out += '\n';
  for (Eigen::Index u = 0; u < w.rows(); ++u) {
    out += std::to_string(u);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      out += ',';
      out += format_double(w(u, j));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

Eigen::MatrixXd read_filter_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse, path.string() + ": empty file");
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // unit id
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorKind::parse, path.string() + ": row " + std::to_string(rows.size() + 2) + " has the wrong width");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) w(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return w;
}

}  // namespace gaitae
