#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include <json.hpp>

#include "gaitae/error.hpp"
#include "gaitae/filters.hpp"
#include "gaitae/model_io.hpp"
#include "oracles.hpp"

using namespace gaitae;
namespace fs = std::filesystem;

namespace {

AxisModel trained_random_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AxisModel m = oracle::random_model(NetworkTopology::standard(), rng, 0.4);
  m.axis = Axis::Z;
  m.train_mse = 0.0123456789012345678;
  m.hyper.seed = 99;
  m.hyper.epochs = 17;
  m.hyper.momentum = true;
  return m;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gaitae_test_model_io";
  fs::create_directories(dir);
  return dir / name;
}

void require_identical(const AxisModel& a, const AxisModel& b) {
  CHECK(a.topology == b.topology);
  CHECK(a.axis == b.axis);
  CHECK(a.train_mse == b.train_mse);
  CHECK(a.hyper == b.hyper);
  REQUIRE(a.params.size() == b.params.size());
  for (std::size_t l = 0; l < a.params.size(); ++l) {
    CHECK(a.params[l].weights == b.params[l].weights);
    CHECK(a.params[l].bias == b.params[l].bias);
  }
}

}  // namespace

TEST_CASE("format_double round-trips bit-exactly") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = oracle::uniform(rng, -1.0, 1.0) * std::pow(10.0, oracle::uniform(rng, -30.0, 30.0));
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK_THROWS_AS(format_double(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("model save/load is bit-exact") {
  const AxisModel m = trained_random_model(3);
  const fs::path path = scratch("m.json");
  save_model(path, m);
  const AxisModel back = load_model(path);
  require_identical(m, back);

  std::mt19937_64 rng(4);
  const Eigen::MatrixXd batch = oracle::random_batch(17, 50, rng);
  CHECK(reconstruction_errors(m, batch) == reconstruction_errors(back, batch));

  const auto j = nlohmann::json::parse(read_text_file(path));
  CHECK(j.at("axis_tag") == "Z");
  CHECK(j.at("joint_order").size() == 17);
  CHECK(j.at("joint_order")[0] == "SpineBase");
  CHECK(j.at("seed") == 99);
}

TEST_CASE("untrained models keep a null error") {
  AxisModel m = trained_random_model(5);
  m.train_mse.reset();
  const auto j = nlohmann::json::parse(model_to_json(m));
  CHECK(j.at("train_mse").is_null());
  CHECK_FALSE(model_from_json(model_to_json(m)).trained());
}

TEST_CASE("malformed model files are rejected") {
  const auto base = nlohmann::json::parse(model_to_json(trained_random_model(6)));
  auto expect_parse_error = [](const nlohmann::json& j) {
    try {
      (void)model_from_json(j.dump());
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse);
    }
  };

  auto j = base;
  j["format_version"] = 2;
  expect_parse_error(j);

  for (const char* key : {"axis_tag", "topology", "weights", "biases", "train_mse", "train_config"}) {
    j = base;
    j.erase(key);
    expect_parse_error(j);
  }

  j = base;
  j["weights"][2].erase(0);
  expect_parse_error(j);

  j = base;
  j["seed"] = 100;
  expect_parse_error(j);

  CHECK_THROWS_AS(model_from_json("{not json"), Error);
  CHECK_THROWS_AS(load_model(scratch("does_not_exist.json")), Error);
}

TEST_CASE("standard joint layout is valid") {
  const JointLayout l = JointLayout::standard();
  CHECK_NOTHROW(l.validate());
  CHECK(l.width == 7);
  CHECK(l.height == 9);
  JointLayout bad = l;
  bad.pixels[1] = bad.pixels[0];
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("filter images") {
  AxisModel m = trained_random_model(7);
  const JointLayout layout = JointLayout::standard();

  m.params[0].weights.row(0).setConstant(0.3);
  m.params[0].weights.row(1).setLinSpaced(17, -1.0, 1.0);

  const auto images = export_second_layer_filters(m, layout);
  REQUIRE(images.size() == 128);

  SUBCASE("constant unit is mid-gray") {
    for (const PixelPos& p : layout.pixels) CHECK(images[0].at(p.col, p.row) == 128);
  }

  SUBCASE("extremes map to 0 and 255") {
    CHECK(images[1].at(layout.pixels[0].col, layout.pixels[0].row) == 0);
    CHECK(images[1].at(layout.pixels[16].col, layout.pixels[16].row) == 255);
    for (const auto& img : images) {
      CHECK(img.width == 7);
      CHECK(img.height == 9);
    }
  }

  SUBCASE("brighter pixel means larger weight") {
    for (std::size_t u = 2; u < 128; ++u) {
      for (std::size_t a = 0; a < 17; ++a) {
        for (std::size_t b = 0; b < 17; ++b) {
          const auto wa = m.params[0].weights(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(a));
          const auto wb = m.params[0].weights(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(b));
          if (wa < wb) {
            CHECK(images[u].at(layout.pixels[a].col, layout.pixels[a].row) <=
                  images[u].at(layout.pixels[b].col, layout.pixels[b].row));
          }
        }
      }
    }
  }

  SUBCASE("non-joint pixels stay black") {
    std::size_t background = 0;
    for (std::size_t r = 0; r < 9; ++r) {
      for (std::size_t c = 0; c < 7; ++c) {
        bool joint = false;
        for (const PixelPos& p : layout.pixels) joint = joint || (p.col == c && p.row == r);
        if (!joint) {
          ++background;
          CHECK(images[5].at(c, r) == 0);
        }
      }
    }
    CHECK(background == 7 * 9 - 17);
  }

  SUBCASE("pgm round trip") {
    const fs::path path = scratch("unit1.pgm");
    write_pgm(path, images[1]);
    const GrayImage back = read_pgm(path);
    CHECK(back.width == images[1].width);
    CHECK(back.height == images[1].height);
    CHECK(back.pixels == images[1].pixels);
  }

  SUBCASE("csv round trip") {
    const fs::path path = scratch("filters.csv");
    write_filter_csv(path, m);
    const Eigen::MatrixXd w = read_filter_csv(path);
    CHECK(w == m.params[0].weights);
    const std::string text = read_text_file(path);
    CHECK(text.rfind("unit,SpineBase,", 0) == 0);
  }
}
