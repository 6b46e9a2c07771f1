#include "gaitae/index.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gaitae/error.hpp"

namespace gaitae {

FusionWeights fusion_weights(double e_x, double e_y, double e_z) {
  for (double e : {e_x, e_y, e_z}) {
    if (!std::isfinite(e) || e < 0.0) {
      throw Error(ErrorKind::argument, "training errors must be finite and nonnegative");
    }
    if (e == 0.0) {
      throw Error(ErrorKind::degenerate, "an axis model has zero training error; its fusion weight would be infinite");
    }
  }
  const double sum = e_x + e_y + e_z;
  return {sum / e_x, sum / e_y, sum / e_z};
}

double fuse(const AxisErrors& e, const FusionWeights& w, FusionMode mode) {
  if (mode == FusionMode::unweighted) return e.x + e.y + e.z;
  return w.x * e.x + w.y * e.y + w.z * e.z;
}

ScorerBundle::ScorerBundle(AxisModel x, AxisModel y, AxisModel z)
    : x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
  const AxisModel* models[] = {&x_, &y_, &z_};
  for (Axis a : kAxes) {
    const AxisModel& m = *models[static_cast<int>(a)];
    if (!m.trained()) {
      throw Error(ErrorKind::state, "axis model " + std::string(axis_name(a)) + " is untrained");
    }
    if (m.axis != a) {
      throw Error(ErrorKind::argument, "model tagged " + std::string(axis_name(m.axis)) +
                                           " supplied for axis " + std::string(axis_name(a)));
    }
    if (m.topology.input_dim() != kKeptJointCount) {
      throw Error(ErrorKind::argument, "axis models must take 17 inputs");
    }
    m.validate();
  }
  weights_ = fusion_weights(*x_.train_mse, *y_.train_mse, *z_.train_mse);
}

const AxisModel& ScorerBundle::model(Axis a) const {
  switch (a) {
    case Axis::X: return x_;
    case Axis::Y: return y_;
    case Axis::Z: return z_;
  }
  return x_;
}

AxisErrors ScorerBundle::axis_errors(const PostureTriplet& p) const {
  return {reconstruction_mse(x_, p.x), reconstruction_mse(y_, p.y), reconstruction_mse(z_, p.z)};
}

double ScorerBundle::frame_index(const PostureTriplet& p, FusionMode mode) const {
  return fuse(axis_errors(p), weights_, mode);
}

std::vector<AxisErrors> ScorerBundle::axis_errors(std::span<const PostureTriplet> frames) const {
  std::vector<AxisErrors> out(frames.size());
  if (frames.empty()) return out;
  for (Axis a : kAxes) {
    const Eigen::VectorXd e = reconstruction_errors(model(a), stack_axis(frames, a));
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const double v = e[static_cast<Eigen::Index>(i)];
      switch (a) {
        case Axis::X: out[i].x = v; break;
        case Axis::Y: out[i].y = v; break;
        case Axis::Z: out[i].z = v; break;
      }
    }
  }
  return out;
}

IndexSeries aggregate(std::vector<double> per_frame, std::size_t segment_length) {
  if (per_frame.empty()) throw Error(ErrorKind::argument, "cannot aggregate an empty index series");
  if (segment_length == 0) throw Error(ErrorKind::argument, "segment_length must be >= 1");

  IndexSeries s;
  s.segment_length = segment_length;
  double total = 0.0;
  for (std::size_t begin = 0; begin < per_frame.size(); begin += segment_length) {
    const std::size_t end = std::min(begin + segment_length, per_frame.size());
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += per_frame[i];
    total += sum;
    // Rounding can push a mean an ulp outside the window's range.
    const auto [lo, hi] = std::minmax_element(per_frame.begin() + begin, per_frame.begin() + end);
    s.per_segment.push_back(std::clamp(sum / static_cast<double>(end - begin), *lo, *hi));
  }
  const auto [lo, hi] = std::minmax_element(per_frame.begin(), per_frame.end());
  s.per_sequence = std::clamp(total / static_cast<double>(per_frame.size()), *lo, *hi);
  s.per_frame = std::move(per_frame);
  return s;
}

}  // namespace gaitae
