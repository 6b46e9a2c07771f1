#pragma once

// Skeleton frames and the posture preprocessing chain:
// 25 Kinect-2 joints -> 17 kept joints -> three per-axis vectors -> [0, 1].

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gaitae {

inline constexpr std::size_t kJointCount = 25;
inline constexpr std::size_t kKeptJointCount = 17;
inline constexpr std::size_t kDiscardedJointCount = kJointCount - kKeptJointCount;

// Standard Kinect-2 joint enumeration.
enum class Joint : std::uint8_t {
  SpineBase = 0,
  SpineMid = 1,
  Neck = 2,
  Head = 3,
  ShoulderLeft = 4,
  ElbowLeft = 5,
  WristLeft = 6,
  HandLeft = 7,
  ShoulderRight = 8,
  ElbowRight = 9,
  WristRight = 10,
  HandRight = 11,
  HipLeft = 12,
  KneeLeft = 13,
  AnkleLeft = 14,
  FootLeft = 15,
  HipRight = 16,
  KneeRight = 17,
  AnkleRight = 18,
  FootRight = 19,
  SpineShoulder = 20,
  HandTipLeft = 21,
  ThumbLeft = 22,
  HandTipRight = 23,
  ThumbRight = 24,
};

std::string_view joint_name(std::size_t index);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct RawSkeleton {
  std::uint64_t frame_index = 0;
  std::array<Vec3, kJointCount> joints{};

  // Builds a frame from 75 interleaved coordinates (x0, y0, z0, x1, ...).
  // Throws a validation error on a wrong count or a non-finite value.
  static RawSkeleton from_coordinates(std::uint64_t frame_index,
                                      std::span<const double> coords);

  // Throws a validation error naming the frame if any coordinate is non-finite.
  void validate() const;

  friend bool operator==(const RawSkeleton&, const RawSkeleton&) = default;
};

struct JointMask {
  std::array<std::size_t, kKeptJointCount> kept{};
  std::array<std::size_t, kDiscardedJointCount> discarded{};

  // Drops Neck, SpineMid, both wrists, hand tips and thumbs; the 17 kept
  // joints are listed in ascending enumeration order.
  static JointMask standard();

  // kept and discarded must partition {0..24}, kept must be ascending.
  void validate() const;
};

using AxisVector = std::array<double, kKeptJointCount>;
using KeptJoints = std::array<Vec3, kKeptJointCount>;

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

std::string_view axis_name(Axis axis);  // "X", "Y", "Z"
Axis parse_axis(std::string_view name);

struct PostureTriplet {
  std::uint64_t frame_index = 0;
  AxisVector x{};
  AxisVector y{};
  AxisVector z{};
  // Set when the corresponding raw axis vector was constant.
  std::array<bool, 3> degenerate{};

  const AxisVector& axis(Axis a) const;
  bool any_degenerate() const;
};

struct AxisSplit {
  AxisVector x{};
  AxisVector y{};
  AxisVector z{};
};

KeptJoints select_joints(const RawSkeleton& skeleton, const JointMask& mask);

AxisSplit split_axes(const KeptJoints& joints);

// Min-max scaling into [0, 1]. A constant input maps to all 0.5 and
// returns true (degenerate). `out` must have the same length as `values`.
bool normalize_axis(std::span<const double> values, std::span<double> out);

struct NormalizedAxis {
  std::vector<double> values;
  bool degenerate = false;
};

NormalizedAxis normalize_axis(std::span<const double> values);

PostureTriplet preprocess(const RawSkeleton& skeleton,
                          const JointMask& mask = JointMask::standard());

}  // namespace gaitae
