#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "f1grasp/estimator.hpp"
#include "f1grasp/io.hpp"

using namespace f1grasp;
using nlohmann::json;

namespace {

const std::vector<SuiteObject>& suite() {
  static const auto s = load_object_suite(F1GRASP_DATA_DIR "/objects.json");
  return s;
}

std::string error_of(const json& j) {
  try {
    parse_object_suite(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

json one_object(json patch) {
  json o{{"id", 1},
         {"name", "block"},
         {"mass_g", 10.0},
         {"vertices_mm", json::array({json::array({0, 0}), json::array({10, 0}), json::array({10, 5}),
                                      json::array({0, 5})})}};
  o.merge_patch(patch);
  return {{"format", 1}, {"objects", json::array({o})}};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/f1grasp_test_" + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("oracle grasp on the coin") {
  const ObjectModel& coin = find_object(suite(), "coin").model;
  const Transform2 pose = place_on_table(coin, 0.30);
  const EstimatorConfig cfg;
  const GraspPose g = oracle_estimate(coin, pose, cfg);
  CHECK(g.width == doctest::Approx(0.030).epsilon(1e-12));
  CHECK(g.center.x == doctest::Approx(0.30).epsilon(1e-12));
  CHECK(g.quality == 1.0);
}

TEST_CASE("objects wider than every hand get zero quality") {
  ObjectModel wide;
  wide.name = "plank";
  wide.cross_section = Polygon2::rectangle({-0.15, 0.0}, 0.30, 0.02);
  const GraspPose g = oracle_estimate(wide, place_on_table(wide, 0.3), {});
  CHECK(g.quality == 0.0);
}

TEST_CASE("zero noise reproduces the oracle and seeds are deterministic") {
  const ObjectModel& mug = find_object(suite(), "mug").model;
  const Transform2 pose = place_on_table(mug, 0.30);
  EstimatorConfig cfg;
  cfg.seed = 12;
  const GraspPose o = oracle_estimate(mug, pose, cfg);
  const GraspPose n = noisy_estimate(mug, pose, cfg);
  CHECK(n.center.x == o.center.x);
  CHECK(n.width == o.width);
  CHECK(n.angle == o.angle);

  cfg.noise_sigma_center = 0.003;
  cfg.noise_sigma_width = 0.002;
  const GraspPose a = noisy_estimate(mug, pose, cfg);
  const GraspPose b = noisy_estimate(mug, pose, cfg);
  CHECK(a.center.x == b.center.x);
  CHECK(a.width == b.width);
  cfg.seed = 13;
  CHECK(noisy_estimate(mug, pose, cfg).center.x != a.center.x);
}

TEST_CASE("center noise is unbiased with the configured spread") {
  const ObjectModel& mug = find_object(suite(), "mug").model;
  const Transform2 pose = place_on_table(mug, 0.30);
  EstimatorConfig cfg;
  cfg.noise_sigma_center = 0.003;
  const double x0 = oracle_estimate(mug, pose, cfg).center.x;
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    cfg.seed = static_cast<std::uint64_t>(i);
    const double e = noisy_estimate(mug, pose, cfg).center.x - x0;
    sum += e;
    sq += e * e;
  }
  CHECK(std::abs(sum / n) < 1e-4);
  CHECK(std::sqrt(sq / n) == doctest::Approx(0.003).epsilon(0.05));
}

TEST_CASE("negative sigma is rejected") {
  EstimatorConfig cfg;
  cfg.noise_sigma_center = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("external pose files") {
  const json j = json::parse(R"({"format": 1, "poses": [
      {"center_mm": [300, 0], "width_mm": 40, "angle_deg": 90, "quality": 0.5},
      {"center_mm": [310, 0], "width_mm": 50, "angle_deg": 0, "quality": 0.9},
      {"center_mm": [320, 0], "width_mm": 60, "angle_deg": 0, "quality": 0.5}]})");
  const auto poses = parse_external_poses(j);
  REQUIRE(poses.size() == 3);
  CHECK(poses[0].center.x == doctest::Approx(0.31).epsilon(1e-12));
  CHECK(poses[1].width == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(poses[1].angle == doctest::Approx(kPi / 2));
  CHECK(poses[2].width == doctest::Approx(0.06).epsilon(1e-12));

  json scaled = j;
  for (json& p : scaled["poses"]) p["quality"] = p["quality"].get<double>() * 7.5;
  CHECK(parse_external_poses(scaled)[0].center.x == poses[0].center.x);

  const auto back = parse_external_poses(external_poses_to_json(poses));
  REQUIRE(back.size() == poses.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(std::abs(back[i].center.x - poses[i].center.x) < 1e-9);
    CHECK(std::abs(back[i].width - poses[i].width) < 1e-9);
    CHECK(std::abs(back[i].angle - poses[i].angle) < 1e-9);
  }

  CHECK(parse_external_poses(json{{"format", 1}, {"poses", json::array()}}).empty());
  CHECK_THROWS_AS(parse_external_poses(json{{"format", 2}, {"poses", json::array()}}), ValidationError);
  try {
    parse_external_poses(json::parse(R"({"format": 1, "poses": [{"center_mm": [1, 2], "width_mm": "x",
                                          "angle_deg": 0, "quality": 1}]})"));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("poses[0].width_mm") != std::string::npos);
  }
  CHECK_THROWS_AS(load_external_poses(temp_file("empty.json", "")), ValidationError);
}

}  // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("bundled suite") {
  CHECK(suite().size() == 25);
  CHECK(find_object(suite(), "1").model.name == "coin");
  CHECK(find_object(suite(), "washer").model.height() == doctest::Approx(0.0012));
  CHECK_THROWS_AS(find_object(suite(), "anvil"), ValidationError);
}

TEST_CASE("suite round trip") {
  const auto again = parse_object_suite(object_suite_to_json(suite()));
  REQUIRE(again.size() == suite().size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].id == suite()[i].id);
    CHECK(again[i].model.mass == doctest::Approx(suite()[i].model.mass));
    CHECK(again[i].model.depth == doctest::Approx(suite()[i].model.depth));
    CHECK(again[i].model.width() == doctest::Approx(suite()[i].model.width()));
  }
}

TEST_CASE("suite diagnostics name the offending field") {
  CHECK(error_of(one_object({{"mass_g", "heavy"}})).find("objects[0].mass_g") != std::string::npos);
  CHECK(error_of(one_object({{"vertices_mm", json::array({json::array({0, 0})})}})).find("objects[0].vertices_mm") !=
        std::string::npos);
  CHECK(error_of(one_object({{"provenance", 3}})).find("objects[0].provenance") != std::string::npos);
  CHECK(error_of(one_object({{"mu_table", -1.0}})).find("objects[0]") != std::string::npos);
  CHECK(error_of(json{{"format", 3}, {"objects", json::array()}}).find("suite.format") != std::string::npos);
  json dup = one_object(json::object());
  dup["objects"].push_back(dup["objects"][0]);
  CHECK(error_of(dup).find("duplicate") != std::string::npos);
  CHECK(error_of(one_object(json::object())).empty());
  CHECK_THROWS_AS(load_object_suite("/nonexistent/objects.json"), ValidationError);
  CHECK_THROWS_AS(load_object_suite(temp_file("bad.json", "{")), ValidationError);
}

TEST_CASE("hand file round trip") {
  for (HandVariant v : {HandVariant::f1, HandVariant::f1_wide_finger, HandVariant::f1_extended,
                        HandVariant::baseline_symmetric}) {
    const HandConfig c = make_hand_config(v);
    const json j = hand_config_to_json(c);
    const HandConfig back = parse_hand_config(j);
    CHECK(back.variant == c.variant);
    CHECK(back.max_aperture == doctest::Approx(c.max_aperture));
    CHECK(back.linkage.q_open == doctest::Approx(c.linkage.q_open));
    CHECK(back.linkage.q_closed == doctest::Approx(c.linkage.q_closed));
    CHECK(hand_config_to_json(back).dump() == j.dump());
  }
  const HandConfig file = load_hand_config(F1GRASP_DATA_DIR "/hand_f1.json");
  CHECK(file.max_aperture == doctest::Approx(0.1305));
}

TEST_CASE("hand file diagnostics") {
  CHECK_THROWS_AS(parse_hand_config(json{{"format", 1}}), ValidationError);
  CHECK_THROWS_AS(parse_hand_config(json{{"format", 1}, {"variant", "claw"}}), ValidationError);
  try {
    parse_hand_config(json{{"format", 1}, {"variant", "f1"}, {"slider_k", -5.0}});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("slider") != std::string::npos);
  }
  try {
    parse_hand_config(json{{"format", 1}, {"variant", "f1"}, {"link_lengths_mm", {1, 2}}});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("hand.link_lengths_mm") != std::string::npos);
  }
}

}  // TEST_SUITE
