#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "gaitae/error.hpp"
#include "gaitae/skeleton.hpp"
#include "oracles.hpp"

using namespace gaitae;

namespace {

RawSkeleton random_skeleton(std::mt19937_64& rng) {
  RawSkeleton s;
  s.frame_index = rng() % 10000;
  for (auto& p : s.joints) {
    p = {oracle::uniform(rng, -1.0, 1.0), oracle::uniform(rng, -0.2, 1.9), oracle::uniform(rng, 1.5, 3.5)};
  }
  return s;
}

bool contains(const AxisVector& v, double x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

TEST_CASE("standard mask keeps 17 joints in ascending order") {
  const JointMask m = JointMask::standard();
  CHECK_NOTHROW(m.validate());
  CHECK(std::is_sorted(m.kept.begin(), m.kept.end()));

  const std::vector<std::string> dropped{"Neck",      "HandTipLeft", "HandTipRight", "ThumbLeft",
                                         "ThumbRight", "SpineMid",   "WristLeft",    "WristRight"};
  for (std::size_t j : m.kept) {
    CHECK(std::find(dropped.begin(), dropped.end(), std::string(joint_name(j))) == dropped.end());
  }
  std::vector<std::string> names;
  for (std::size_t j : m.discarded) names.emplace_back(joint_name(j));
  std::sort(names.begin(), names.end());
  auto expected = dropped;
  std::sort(expected.begin(), expected.end());
  CHECK(names == expected);
}

TEST_CASE("mask validation rejects overlap and wrong order") {
  JointMask m = JointMask::standard();
  m.kept[0] = m.discarded[0];
  CHECK_THROWS_AS(m.validate(), Error);

  m = JointMask::standard();
  std::swap(m.kept[0], m.kept[1]);
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("select_joints") {
  const JointMask mask = JointMask::standard();

  SUBCASE("kept joints at the origin give zero triples") {
    RawSkeleton s;
    for (std::size_t j : mask.discarded) s.joints[j] = {5.0, 5.0, 5.0};
    for (const Vec3& p : select_joints(s, mask)) CHECK(p == Vec3{});
  }

  SUBCASE("no discarded joint leaks through") {
    RawSkeleton s;
    for (std::size_t j = 0; j < kJointCount; ++j) s.joints[j] = {double(j), 0.0, 0.0};
    for (std::size_t d : mask.discarded) s.joints[d] = {-999.0, -999.0, -999.0};
    const KeptJoints kept = select_joints(s, mask);
    for (const Vec3& p : kept) CHECK(p.x != -999.0);
    for (std::size_t i = 0; i < kKeptJointCount; ++i) CHECK(kept[i].x == double(mask.kept[i]));
  }

  SUBCASE("non-finite coordinate names the frame") {
    RawSkeleton s;
    s.frame_index = 42;
    s.joints[3].y = std::nan("");
    try {
      (void)select_joints(s, mask);
      FAIL("expected a validation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::validation);
      CHECK(std::string(e.what()).find("frame 42") != std::string::npos);
    }
  }
}

TEST_CASE("from_coordinates checks the joint count") {
  std::vector<double> coords(74, 0.0);
  try {
    (void)RawSkeleton::from_coordinates(7, coords);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("frame 7") != std::string::npos);
  }
  coords.resize(75, 1.0);
  coords[10] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS((void)RawSkeleton::from_coordinates(7, coords), Error);
  coords[10] = 0.25;
  const RawSkeleton s = RawSkeleton::from_coordinates(7, coords);
  CHECK(s.joints[3].y == 0.25);
}

TEST_CASE("split_axes") {
  KeptJoints joints{};
  SUBCASE("constant joints") {
    joints.fill({1.0, 2.0, 3.0});
    const AxisSplit s = split_axes(joints);
    CHECK(std::all_of(s.x.begin(), s.x.end(), [](double v) { return v == 1.0; }));
    CHECK(std::all_of(s.y.begin(), s.y.end(), [](double v) { return v == 2.0; }));
    CHECK(std::all_of(s.z.begin(), s.z.end(), [](double v) { return v == 3.0; }));
  }
  SUBCASE("index-wise") {
    for (std::size_t i = 0; i < kKeptJointCount; ++i) {
      const double d = double(i);
      joints[i] = {d, -d, 2.0 * d};
    }
    const AxisSplit s = split_axes(joints);
    for (std::size_t i = 0; i < kKeptJointCount; ++i) {
      CHECK(s.x[i] == double(i));
      CHECK(s.y[i] == -double(i));
      CHECK(s.z[i] == 2.0 * double(i));
    }
  }
  SUBCASE("permuting joints permutes every axis the same way") {
    std::mt19937_64 rng(3);
    for (auto& p : joints) p = {oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1)};
    std::array<std::size_t, kKeptJointCount> perm{};
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    KeptJoints permuted{};
    for (std::size_t i = 0; i < kKeptJointCount; ++i) permuted[i] = joints[perm[i]];
    const AxisSplit a = split_axes(joints);
    const AxisSplit b = split_axes(permuted);
    for (std::size_t i = 0; i < kKeptJointCount; ++i) {
      CHECK(b.x[i] == a.x[perm[i]]);
      CHECK(b.y[i] == a.y[perm[i]]);
      CHECK(b.z[i] == a.z[perm[i]]);
    }
  }
}

TEST_CASE("normalize_axis") {
  SUBCASE("min-max formula") {
    const std::vector<double> v{2.0, 4.0, 6.0};
    const NormalizedAxis n = normalize_axis(v);
    CHECK_FALSE(n.degenerate);
    CHECK(n.values == std::vector<double>{0.0, 0.5, 1.0});
  }
  SUBCASE("already normalized input is unchanged") {
    const std::vector<double> v{0.0, 0.25, 1.0, 0.75, 0.5};
    CHECK(normalize_axis(v).values == v);
  }
  SUBCASE("constant vector is degenerate") {
    const std::vector<double> v(17, 3.3);
    const NormalizedAxis n = normalize_axis(v);
    CHECK(n.degenerate);
    CHECK(std::all_of(n.values.begin(), n.values.end(), [](double x) { return x == 0.5; }));
  }
  SUBCASE("order is preserved") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> v(17);
      for (double& x : v) x = oracle::uniform(rng, -5.0, 5.0);
      const auto out = normalize_axis(v).values;
      for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) CHECK((v[i] < v[j]) == (out[i] < out[j]));
      }
    }
  }
}

TEST_CASE("preprocess output contains 0 and 1 on every axis") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const PostureTriplet p = preprocess(random_skeleton(rng));
    CHECK_FALSE(p.any_degenerate());
    for (Axis a : kAxes) {
      const AxisVector& v = p.axis(a);
      CHECK(contains(v, 0.0));
      CHECK(contains(v, 1.0));
      CHECK(std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x <= 1.0; }));
    }
  }
}

TEST_CASE("preprocess is invariant to scaling and translation") {
  std::mt19937_64 rng(9);
  const RawSkeleton s = random_skeleton(rng);
  const PostureTriplet base = preprocess(s);

  RawSkeleton doubled = s;
  for (auto& p : doubled.joints) p = {2.0 * p.x, 2.0 * p.y, 2.0 * p.z};
  const PostureTriplet scaled = preprocess(doubled);

  RawSkeleton moved = s;
  for (auto& p : moved.joints) p = {p.x + 0.7, p.y - 1.3, p.z + 4.0};
  const PostureTriplet shifted = preprocess(moved);

  for (Axis a : kAxes) {
    for (std::size_t i = 0; i < kKeptJointCount; ++i) {
      CHECK(scaled.axis(a)[i] == base.axis(a)[i]);  // power-of-two scale is exact
      CHECK(std::abs(shifted.axis(a)[i] - base.axis(a)[i]) <= 1e-12);
    }
  }
}

TEST_CASE("a flat axis is flagged rather than rejected") {
  RawSkeleton s;
  for (std::size_t j = 0; j < kJointCount; ++j) s.joints[j] = {double(j), 2.0 * double(j), 1.0};
  const PostureTriplet p = preprocess(s);
  CHECK_FALSE(p.degenerate[0]);
  CHECK(p.degenerate[2]);
  CHECK(std::all_of(p.z.begin(), p.z.end(), [](double v) { return v == 0.5; }));
}

TEST_CASE("axis tags") {
  for (Axis a : kAxes) CHECK(parse_axis(axis_name(a)) == a);
  CHECK_THROWS_AS(parse_axis("W"), Error);
}
