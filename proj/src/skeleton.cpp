#include "gaitae/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gaitae/error.hpp"

namespace gaitae {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames{
    "SpineBase",    "SpineMid",   "Neck",          "Head",
    "ShoulderLeft", "ElbowLeft",  "WristLeft",     "HandLeft",
    "ShoulderRight", "ElbowRight", "WristRight",   "HandRight",
    "HipLeft",      "KneeLeft",   "AnkleLeft",     "FootLeft",
    "HipRight",     "KneeRight",  "AnkleRight",    "FootRight",
    "SpineShoulder", "HandTipLeft", "ThumbLeft",   "HandTipRight",
    "ThumbRight",
};

Error frame_error(std::uint64_t frame_index, const std::string& what) {
  return Error(ErrorKind::validation,
               "frame " + std::to_string(frame_index) + ": " + what);
}

}  // namespace

std::string_view joint_name(std::size_t index) {
  if (index >= kJointCount) {
    throw Error(ErrorKind::argument, "joint index out of range: " + std::to_string(index));
  }
  return kJointNames[index];
}

RawSkeleton RawSkeleton::from_coordinates(std::uint64_t frame_index,
                                          std::span<const double> coords) {
  if (coords.size() != 3 * kJointCount) {
    throw frame_error(frame_index, "expected " + std::to_string(3 * kJointCount) +
                                       " coordinates (25 joints), got " +
                                       std::to_string(coords.size()));
  }
  RawSkeleton s;
  s.frame_index = frame_index;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    s.joints[j] = {coords[3 * j], coords[3 * j + 1], coords[3 * j + 2]};
  }
  s.validate();
  return s;
}

void RawSkeleton::validate() const {
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const Vec3& p = joints[j];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw frame_error(frame_index, "non-finite coordinate at joint " +
                                         std::string(kJointNames[j]));
    }
  }
}

JointMask JointMask::standard() {
  JointMask m;
  m.discarded = {
      static_cast<std::size_t>(Joint::SpineMid),
      static_cast<std::size_t>(Joint::Neck),
      static_cast<std::size_t>(Joint::WristLeft),
      static_cast<std::size_t>(Joint::WristRight),
      static_cast<std::size_t>(Joint::HandTipLeft),
      static_cast<std::size_t>(Joint::ThumbLeft),
      static_cast<std::size_t>(Joint::HandTipRight),
      static_cast<std::size_t>(Joint::ThumbRight),
  };
  std::size_t k = 0;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    if (std::find(m.discarded.begin(), m.discarded.end(), j) == m.discarded.end()) {
      m.kept[k++] = j;
    }
  }
  return m;
}

void JointMask::validate() const {
  std::array<int, kJointCount> seen{};
  for (std::size_t j : kept) {
    if (j >= kJointCount) throw Error(ErrorKind::argument, "joint mask index out of range");
    ++seen[j];
  }
  for (std::size_t j : discarded) {
    if (j >= kJointCount) throw Error(ErrorKind::argument, "joint mask index out of range");
    ++seen[j];
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    throw Error(ErrorKind::argument, "joint mask must partition the 25 joints");
  }
  if (!std::is_sorted(kept.begin(), kept.end())) {
    throw Error(ErrorKind::argument, "kept joints must be in ascending order");
  }
}

std::string_view axis_name(Axis axis) {
  switch (axis) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    case Axis::Z: return "Z";
  }
  return "?";
}

Axis parse_axis(std::string_view name) {
  if (name == "X" || name == "x") return Axis::X;
  if (name == "Y" || name == "y") return Axis::Y;
  if (name == "Z" || name == "z") return Axis::Z;
  throw Error(ErrorKind::parse, "unknown axis tag: " + std::string(name));
}

const AxisVector& PostureTriplet::axis(Axis a) const {
  switch (a) {
    case Axis::X: return x;
    case Axis::Y: return y;
    case Axis::Z: return z;
  }
  return x;
}

bool PostureTriplet::any_degenerate() const {
  return degenerate[0] || degenerate[1] || degenerate[2];
}

KeptJoints select_joints(const RawSkeleton& skeleton, const JointMask& mask) {
  skeleton.validate();
  mask.validate();
  KeptJoints out{};
  for (std::size_t i = 0; i < kKeptJointCount; ++i) {
    out[i] = skeleton.joints[mask.kept[i]];
  }
  return out;
}

AxisSplit split_axes(const KeptJoints& joints) {
  AxisSplit s;
  for (std::size_t i = 0; i < kKeptJointCount; ++i) {
    s.x[i] = joints[i].x;
    s.y[i] = joints[i].y;
    s.z[i] = joints[i].z;
  }
  return s;
}

bool normalize_axis(std::span<const double> values, std::span<double> out) {
  if (values.size() != out.size()) {
    throw Error(ErrorKind::argument, "normalize_axis: output length mismatch");
  }
  if (values.empty()) {
    throw Error(ErrorKind::argument, "normalize_axis: empty vector");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    std::fill(out.begin(), out.end(), 0.5);
    return true;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - lo) / range;
  }
  return false;
}

NormalizedAxis normalize_axis(std::span<const double> values) {
  NormalizedAxis r;
  r.values.resize(values.size());
  r.degenerate = normalize_axis(values, std::span<double>(r.values));
  return r;
}

PostureTriplet preprocess(const RawSkeleton& skeleton, const JointMask& mask) {
  const AxisSplit split = split_axes(select_joints(skeleton, mask));
  PostureTriplet p;
  p.frame_index = skeleton.frame_index;
  p.degenerate[0] = normalize_axis(split.x, p.x);
  p.degenerate[1] = normalize_axis(split.y, p.y);
  p.degenerate[2] = normalize_axis(split.z, p.z);
  return p;
}

}  // namespace gaitae
