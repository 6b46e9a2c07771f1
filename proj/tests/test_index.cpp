#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "gaitae/error.hpp"
#include "gaitae/index.hpp"
#include "oracles.hpp"

using namespace gaitae;

namespace {

AxisModel tagged(AxisModel m, Axis a, std::optional<double> mse) {
  m.axis = a;
  m.train_mse = mse;
  return m;
}

AxisModel zero_model() {
  AxisModel m;
  m.topology = NetworkTopology::standard();
  for (const auto& l : m.topology.layers) {
    m.params.push_back({Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(l.out_dim), static_cast<Eigen::Index>(l.in_dim)),
                        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l.out_dim))});
  }
  return m;
}

PostureTriplet constant_posture(double v) {
  PostureTriplet p;
  p.x.fill(v);
  p.y.fill(v);
  p.z.fill(v);
  return p;
}

double oracle_mse(const AxisModel& m, const AxisVector& v) {
  const auto out = oracle::forward_layers(m, v).back();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += (out[i] - v[i]) * (out[i] - v[i]);
  return s / double(v.size());
}

}  // namespace

TEST_CASE("fusion weights") {
  SUBCASE("equal errors") {
    const FusionWeights w = fusion_weights(1.0, 1.0, 1.0);
    CHECK(w.x == 3.0);
    CHECK(w.y == 3.0);
    CHECK(w.z == 3.0);
  }
  SUBCASE("hand example") {
    const FusionWeights w = fusion_weights(1.0, 2.0, 4.0);
    CHECK(w.x == doctest::Approx(7.0));
    CHECK(w.y == doctest::Approx(3.5));
    CHECK(w.z == doctest::Approx(1.75));
  }
  SUBCASE("ratio identity and harmonic sum") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 1000; ++trial) {
      const double e[3] = {oracle::uniform(rng, 1e-6, 1.0), oracle::uniform(rng, 1e-6, 1.0),
                           oracle::uniform(rng, 1e-6, 1.0)};
      const FusionWeights w = fusion_weights(e[0], e[1], e[2]);
      CHECK(w.x * e[0] == doctest::Approx(w.y * e[1]).epsilon(1e-12));
      CHECK(w.y * e[1] == doctest::Approx(w.z * e[2]).epsilon(1e-12));
      // sum_k 1/w_k = 1
      CHECK(1.0 / w.x + 1.0 / w.y + 1.0 / w.z == doctest::Approx(1.0).epsilon(1e-12));
      // the better-trained model gets the larger weight
      CHECK((e[0] < e[1]) == (w.x > w.y));
    }
  }
  SUBCASE("zero error is degenerate") {
    try {
      (void)fusion_weights(0.0, 1.0, 1.0);
      FAIL("expected a degenerate-training error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::degenerate);
    }
    CHECK_THROWS_AS(fusion_weights(1.0, -1.0, 1.0), Error);
    CHECK_THROWS_AS(fusion_weights(1.0, 1.0, std::nan("")), Error);
  }
}

TEST_CASE("fuse") {
  const AxisErrors e{0.1, 0.1, 0.1};
  CHECK(fuse(e, FusionWeights{3.0, 3.0, 3.0}, FusionMode::weighted) == doctest::Approx(0.9));
  CHECK(fuse(e, FusionWeights{3.0, 3.0, 3.0}, FusionMode::unweighted) == doctest::Approx(0.3));
  CHECK(fuse(AxisErrors{}, FusionWeights{7, 3.5, 1.75}, FusionMode::weighted) == 0.0);

  std::mt19937_64 rng(3);
  const FusionWeights w = fusion_weights(0.02, 0.05, 0.01);
  for (int trial = 0; trial < 1000; ++trial) {
    AxisErrors a{oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1)};
    const double base = fuse(a, w, FusionMode::weighted);
    CHECK(base >= 0.0);
    AxisErrors b = a;
    b.y += oracle::uniform(rng, 1e-6, 1.0);
    CHECK(fuse(b, w, FusionMode::weighted) > base);
    CHECK(fuse(b, w, FusionMode::unweighted) > fuse(a, w, FusionMode::unweighted));
  }
}

TEST_CASE("scorer bundle") {
  const AxisModel z = zero_model();

  SUBCASE("untrained model is a state error") {
    try {
      ScorerBundle b(tagged(z, Axis::X, 0.1), tagged(z, Axis::Y, std::nullopt), tagged(z, Axis::Z, 0.1));
      FAIL("expected a state error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::state);
    }
  }

  SUBCASE("wrong axis tag") {
    CHECK_THROWS_AS(ScorerBundle(tagged(z, Axis::Y, 0.1), tagged(z, Axis::Y, 0.1), tagged(z, Axis::Z, 0.1)), Error);
  }

  SUBCASE("zero training error cannot be fused") {
    try {
      ScorerBundle b(tagged(z, Axis::X, 0.0), tagged(z, Axis::Y, 0.1), tagged(z, Axis::Z, 0.1));
      FAIL("expected a degenerate-training error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::degenerate);
    }
  }

  SUBCASE("perfect reconstruction scores zero") {
    const ScorerBundle b(tagged(z, Axis::X, 0.1), tagged(z, Axis::Y, 0.2), tagged(z, Axis::Z, 0.4));
    CHECK(b.weights().x == doctest::Approx(7.0));
    CHECK(b.frame_index(constant_posture(0.5), FusionMode::weighted) == 0.0);
    // every axis reconstructs 0.5, so a 0 input costs 0.25 per component
    const AxisErrors e = b.axis_errors(constant_posture(0.0));
    CHECK(e.x == 0.25);
    CHECK(b.frame_index(constant_posture(0.0), FusionMode::weighted) ==
          doctest::Approx(0.25 * (7.0 + 3.5 + 1.75)));
  }

  SUBCASE("index matches a straight-line evaluation") {
    std::mt19937_64 rng(5);
    const NetworkTopology t = NetworkTopology::standard();
    const ScorerBundle b(tagged(oracle::random_model(t, rng, 0.3), Axis::X, 0.03),
                         tagged(oracle::random_model(t, rng, 0.3), Axis::Y, 0.01),
                         tagged(oracle::random_model(t, rng, 0.3), Axis::Z, 0.02));
    std::vector<PostureTriplet> frames(40);
    for (auto& p : frames) {
      for (Axis a : kAxes) {
        AxisVector& v = a == Axis::X ? p.x : a == Axis::Y ? p.y : p.z;
        for (double& c : v) c = oracle::uniform(rng, 0, 1);
      }
    }
    const auto batched = b.axis_errors(frames);
    REQUIRE(batched.size() == frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
      double expected = 0.0;
      for (Axis a : kAxes) {
        const double e = oracle_mse(b.model(a), frames[i].axis(a));
        CHECK(batched[i][a] == doctest::Approx(e).epsilon(1e-12));
        CHECK(b.axis_errors(frames[i])[a] == doctest::Approx(e).epsilon(1e-12));
        expected += b.weights()[a] * e;
      }
      CHECK(b.frame_index(frames[i], FusionMode::weighted) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("aggregate") {
  SUBCASE("single full window") {
    const IndexSeries s = aggregate({1.0, 2.0, 3.0}, 3);
    CHECK(s.per_segment == std::vector<double>{2.0});
    CHECK(s.per_sequence == 2.0);
  }
  SUBCASE("partial final window is kept") {
    const IndexSeries s = aggregate({1, 2, 3, 4, 5}, 2);
    CHECK(s.per_segment == std::vector<double>{1.5, 3.5, 5.0});
    CHECK(s.per_sequence == 3.0);
    CHECK(s.segment_length == 2);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(aggregate({}, 20), Error);
    CHECK_THROWS_AS(aggregate({1.0}, 0), Error);
  }
  SUBCASE("properties") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + rng() % 200;
      const std::size_t len = 1 + rng() % 30;
      std::vector<double> v(n);
      for (double& x : v) x = oracle::uniform(rng, 0.0, 2.0);
      const IndexSeries s = aggregate(v, len);
      CHECK(s.per_frame == v);
      CHECK(s.per_segment.size() == (n + len - 1) / len);
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      CHECK(s.per_sequence >= *lo);
      CHECK(s.per_sequence <= *hi);
      CHECK(s.per_sequence == doctest::Approx(std::accumulate(v.begin(), v.end(), 0.0) / double(n)).epsilon(1e-12));
      for (std::size_t k = 0; k < s.per_segment.size(); ++k) {
        const auto b = v.begin() + static_cast<std::ptrdiff_t>(k * len);
        const auto e = v.begin() + static_cast<std::ptrdiff_t>(std::min(n, (k + 1) * len));
        CHECK(s.per_segment[k] >= *std::min_element(b, e));
        CHECK(s.per_segment[k] <= *std::max_element(b, e));
      }
      // segment length 1 reproduces the per-frame series
      CHECK(aggregate(v, 1).per_segment == v);
      // a constant series aggregates to itself exactly
      const IndexSeries c = aggregate(std::vector<double>(n, 0.1), len);
      for (double x : c.per_segment) CHECK(x == 0.1);
      CHECK(c.per_sequence == 0.1);
    }
  }
}
