#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "f1grasp/harness.hpp"

using namespace f1grasp;
using nlohmann::json;

namespace {

const std::vector<SuiteObject>& suite() {
  static const auto s = load_object_suite(F1GRASP_DATA_DIR "/objects.json");
  return s;
}

TrialConfig config(const std::string& object, HandVariant v, int trials, std::uint64_t seed = 1) {
  TrialConfig c;
  c.hand = make_hand_config(v);
  c.object = find_object(suite(), object);
  c.n_trials = trials;
  c.seed = seed;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("trial seeds depend only on suite seed and index") {
  CHECK(trial_seed(5, 3) == trial_seed(5, 3));
  CHECK(trial_seed(5, 3) != trial_seed(5, 4));
  CHECK(trial_seed(5, 3) != trial_seed(6, 3));
}

TEST_CASE("alignment offset mapping") {
  CHECK(alignment_offset(0.0, 0.05, 0.13) == 0.0);
  CHECK(alignment_offset(30.0, 0.02, 0.13) == doctest::Approx(0.01));
  CHECK(alignment_offset(-90.0, 0.1, 0.12) == doctest::Approx(-0.03));
}

TEST_CASE("placements stay inside the configured range") {
  TrialConfig c = config("mug", HandVariant::f1, 50);
  c.alignment_min_deg = -10.0;
  c.alignment_max_deg = 10.0;
  for (int i = 0; i < c.n_trials; ++i) {
    const Placement p = primitive_placement(c, i);
    CHECK(p.alignment_error_deg >= -10.0);
    CHECK(p.alignment_error_deg <= 10.0);
    CHECK(std::abs(p.offset) <= 0.25 * c.hand.max_aperture + 1e-12);
  }
}

TEST_CASE("median and histogram") {
  CHECK(median({}) == 0.0);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  const Histogram h = force_histogram({0.0, 1.9, 2.0, 100.0}, 2.0, 5);
  CHECK(h.counts == std::vector<int>{2, 1, 0, 0, 1});
  CHECK_THROWS_AS(force_histogram({}, 0.0, 5), ValidationError);
}

TEST_CASE("coin: F1 pinches it, the baseline cannot") {
  TrialConfig f1 = config("coin", HandVariant::f1, 4);
  TrialConfig base = config("coin", HandVariant::baseline_symmetric, 4);
  f1.alignment_min_deg = base.alignment_min_deg = -10.0;
  f1.alignment_max_deg = base.alignment_max_deg = 10.0;
  const SuiteReport r = run_suite({f1, base}, 1);
  REQUIRE(r.objects.size() == 2);
  CHECK(r.objects[0].successes == 4);
  CHECK(r.objects[0].pinch == 4);
  CHECK(r.objects[1].successes == 0);
  for (const TrialResult& t : r.objects[1].trials) CHECK(t.table_before_object);
  REQUIRE(r.force_median_ratio.size() == 1);
  CHECK(r.force_median_ratio[0].first == "f1");
  CHECK(r.force_median_ratio[0].second ==
        doctest::Approx(r.grippers[0].median_peak_table_force / r.grippers[1].median_peak_table_force));
}

TEST_CASE("report does not depend on execution order or thread count") {
  const std::vector<TrialConfig> cs{config("washer", HandVariant::f1, 3, 9), config("apple", HandVariant::f1, 3, 9)};
  const std::string ref = report_to_json(run_suite(cs, 1)).dump();
  std::vector<std::size_t> order(6);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(3);
  std::shuffle(order.begin(), order.end(), rng);
  CHECK(report_to_json(run_suite(cs, 1, &order)).dump() == ref);
  CHECK(report_to_json(run_suite(cs, 3)).dump() == ref);

  std::vector<std::size_t> bad{0, 0, 1, 2, 3, 4};
  CHECK_THROWS_AS(run_suite(cs, 1, &bad), ValidationError);
}

TEST_CASE("same seed gives byte-identical report files") {
  const std::vector<TrialConfig> cs{config("clip", HandVariant::f1, 3, 21)};
  emit_report(run_suite(cs, 1), "/tmp/f1grasp_report_a.json", ReportFormat::json);
  emit_report(run_suite(cs, 1), "/tmp/f1grasp_report_b.json", ReportFormat::json);
  CHECK(slurp("/tmp/f1grasp_report_a.json") == slurp("/tmp/f1grasp_report_b.json"));
  CHECK_THROWS_AS(emit_report(run_suite(cs, 1), "/nonexistent/dir/r.json", ReportFormat::json), ValidationError);
}

TEST_CASE("JSON and CSV carry the same aggregates") {
  const SuiteReport r = run_suite({config("mug", HandVariant::f1, 2), config("coin", HandVariant::f1, 2)}, 1);
  const json j = report_to_json(r);
  std::istringstream csv(report_to_csv(r));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("gripper,mode,object_id,object,", 0) == 0);
  for (const json& o : j["objects"]) {
    REQUIRE(std::getline(csv, line));
    CHECK(line.find("," + o["object"].get<std::string>() + ",") != std::string::npos);
    CHECK(line.find("," + std::to_string(o["successes"].get<int>()) + ",") != std::string::npos);
  }
  CHECK_FALSE(std::getline(csv, line));
  CHECK(j["format"] == 1);
  CHECK(j["objects"][0]["results"].size() == 2);
}

TEST_CASE("trial results round trip through JSON") {
  const TrialResult t = run_trial(config("banana", HandVariant::f1, 1), 0);
  const TrialResult back = trial_result_from_json(trial_result_to_json(t));
  CHECK(trial_result_to_json(back).dump() == trial_result_to_json(t).dump());
  CHECK_THROWS_AS(trial_result_from_json(json{{"index", 1}}), ValidationError);
}

TEST_CASE("autonomous mode with a perfect estimate") {
  TrialConfig c = config("marker", HandVariant::f1, 3);
  c.mode = TrialMode::autonomous;
  const SuiteReport r = run_suite({c}, 1);
  CHECK(r.objects[0].successes == 3);
  CHECK(r.objects[0].mode == "auto");
}

TEST_CASE("external pose turned across the marker fails") {
  TrialConfig c = config("marker", HandVariant::f1, 2);
  c.mode = TrialMode::autonomous;
  GraspPose g;
  g.center = {c.object_x, 0.0};
  g.width = 0.025;
  g.angle = kPi / 2;
  c.external_poses = std::vector<GraspPose>{g};
  const SuiteReport r = run_suite({c}, 1);
  CHECK(r.objects[0].successes == 0);

  c.external_poses = std::vector<GraspPose>{};
  CHECK(run_suite({c}, 1).objects[0].successes == 0);
}

TEST_CASE("invalid trial configs") {
  TrialConfig c = config("coin", HandVariant::f1, 0);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.n_trials = 1;
  c.alignment_min_deg = 10.0;
  c.alignment_max_deg = -10.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK_THROWS_AS(run_suite({}), ValidationError);
  CHECK_THROWS_AS(trial_mode_from_string("manual"), ValidationError);
}

}  // TEST_SUITE
