#include "f1grasp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace f1grasp {

using nlohmann::json;

const char* to_string(TrialMode m) { return m == TrialMode::primitive ? "primitive" : "auto"; }

TrialMode trial_mode_from_string(const std::string& s) {
  if (s == "primitive" || s == "primitive_only") return TrialMode::primitive;
  if (s == "auto" || s == "autonomous") return TrialMode::autonomous;
  throw ValidationError("unknown mode '" + s + "'");
}

void TrialConfig::validate() const {
  if (n_trials < 1) throw ValidationError("n_trials must be at least 1");
  if (!(alignment_min_deg <= alignment_max_deg)) throw ValidationError("alignment range is empty");
  if (alignment_min_deg < -90.0 || alignment_max_deg > 90.0) throw ValidationError("alignment range exceeds 90 degrees");
  if (!(lift_height > 0.0)) throw ValidationError("lift height must be positive");
  if (primitive_steps < 1) throw ValidationError("primitive_steps must be at least 1");
  baseline.validate();
  object.model.validate();
  estimator.validate();
}

std::uint64_t trial_seed(std::uint64_t seed, int index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double alignment_offset(double error_deg, double half_extent, double D) {
  const double raw = std::sin(error_deg * kPi / 180.0) * half_extent;
  return std::clamp(raw, -0.25 * D, 0.25 * D);
}

namespace {

constexpr double kDescentHeight = 0.15;
constexpr double kDescentStep = 5e-4;

/// True if the hand, lowered vertically onto `h`, touches the object on the way down.
bool descent_collides(const HandConfig& hand, const HandState& h, const Polygon2& object, double tol) {
  for (double dz = kDescentHeight; dz > -0.5 * kDescentStep; dz -= kDescentStep) {
    HandState up = h;
    up.tip_frame.translation.z += std::max(dz, 0.0);
    for (const auto& [body, seg] : hand_geometry(up, hand).segments) {
      for (const ContactPoint& c : polygon_segment_contact(object, seg, tol)) {
        if (c.penetration_depth > 0.0) return true;
      }
    }
  }
  return false;
}

/// Object cross-section in a grasp plane turned by `angle` from its principal axis.
ObjectModel turned(const ObjectModel& object, double angle) {
  if (object.depth <= 0.0 || angle == 0.0) return object;
  const double w = object.width();
  const double f = (w * std::abs(std::cos(angle)) + object.depth * std::abs(std::sin(angle))) / w;
  const Vec2 c = object.cross_section.centroid();
  std::vector<Vec2> v;
  for (const Vec2& p : object.cross_section.vertices()) v.push_back({c.x + (p.x - c.x) * f, p.z});
  ObjectModel out = object;
  out.cross_section = Polygon2(std::move(v));
  return out;
}

struct Run {
  WorldState final;
  double duration = 0.0;
};

Run run_f1(const Simulator& sim, const HandState& h, const Transform2& object_pose, const GraspPrimitiveParams& p,
           std::vector<WorldState>* record) {
  WorldState w = sim.initial_state(h, object_pose);
  if (record) record->push_back(w);
  PrimitiveRunner runner(p);
  while (runner.advance(sim, w, record)) {
  }
  return {w, runner.sim_steps() * sim.config().dt};
}

Run run_baseline(const Simulator& sim, const BaselineProtocol& proto, double center_x, double q_start,
                 const Transform2& object_pose, std::vector<WorldState>* record) {
  const HandConfig& hand = sim.hand_config();
  WorldState w = sim.initial_state(open_hand(hand, {center_x, hand.baseline.tip_drop(q_start)}, q_start), object_pose);
  if (record) record->push_back(w);
  BaselineRunner runner(hand, proto, q_start);
  while (runner.advance(sim, w, record)) {
  }
  return {w, runner.sim_steps() * sim.config().dt};
}

double baseline_q_for(const BaselineGripperModel& b, double width) {
  const double s = std::clamp((b.max_aperture - width) / (2.0 * b.tip_arc_radius), 0.0, 1.0);
  return std::clamp(b.q_open + std::asin(s), b.q_open, b.q_closed);
}

}  // namespace

Placement primitive_placement(const TrialConfig& config, int index) {
  std::mt19937_64 rng(trial_seed(config.seed, index));
  std::uniform_real_distribution<double> align(config.alignment_min_deg, config.alignment_max_deg);
  const ObjectModel& obj = config.object.model;
  Placement p;
  p.alignment_error_deg =
      config.alignment_min_deg == config.alignment_max_deg ? config.alignment_min_deg : align(rng);
  // The operator never sets a finger down on the object.
  const double room = std::max(0.0, 0.5 * (config.hand.open_gap() - obj.width()) - 0.002);
  p.offset = std::clamp(alignment_offset(p.alignment_error_deg, 0.5 * obj.width(), config.hand.max_aperture), -room, room);
  p.object_pose = place_on_table(obj, config.object_x + p.offset);
  return p;
}

std::pair<Transform2, GraspPrimitiveParams> primitive_pregrasp(const HandConfig& hand, double object_x, int n_steps) {
  GraspPose gp;
  gp.center = {object_x, 0.0};
  gp.width = hand.max_aperture;
  return map_grasp_pose(gp, hand, {1.0, 0.0}, n_steps);
}

void finish_trial(TrialResult& r, const Simulator& sim, const WorldState& f, double duration, double lift_height) {
  r.success = !f.fault && sim.lift(f, lift_height);
  r.fault = f.fault;
  r.fault_reason = f.fault_reason;
  r.peak_table_force = f.peak_table_force;
  r.peak_object_force = f.peak_object_force;
  r.grasp_time = duration;
  r.classification = classify_grasp(f.object_contacts());
  r.slider_bottomed_out = f.hand.slider.bottomed_out;
  r.table_before_object = f.first_table_contact_tick >= 0 &&
                          (f.first_object_contact_tick < 0 || f.first_table_contact_tick < f.first_object_contact_tick);
}

TrialResult run_trial(const TrialConfig& config, int index, std::vector<WorldState>* trajectory) {
  config.validate();
  if (index < 0) throw ValidationError("trial index must be non-negative");
  TrialResult r;
  r.index = index;
  r.seed = trial_seed(config.seed, index);
  const HandConfig& hand = config.hand;

  if (config.mode == TrialMode::primitive) {
    const Simulator sim(hand, config.object.model, config.sim);
    const Placement place = primitive_placement(config, index);
    r.alignment_error_deg = place.alignment_error_deg;
    r.offset = place.offset;
    Run run;
    if (hand.is_baseline()) {
      run = run_baseline(sim, config.baseline, config.object_x, hand.baseline.q_open, place.object_pose, trajectory);
    } else {
      const auto [pre, params] = primitive_pregrasp(hand, config.object_x, config.primitive_steps);
      run = run_f1(sim, open_hand(hand, pre.translation, params.q_start), place.object_pose, params, trajectory);
    }
    finish_trial(r, sim, run.final, run.duration, config.lift_height);
    return r;
  }

  static constexpr double kPlacement[] = {0.0, 0.005, -0.005};
  const double object_x = config.object_x + kPlacement[index % 3];
  const Transform2 true_pose = place_on_table(config.object.model, object_x);
  GraspPose g;
  if (config.external_poses) {
    if (!config.external_poses->empty()) g = config.external_poses->front();
    else g.quality = 0.0;
  } else {
    EstimatorConfig est = config.estimator;
    est.seed = r.seed;
    est.max_aperture = hand.max_aperture;
    g = noisy_estimate(config.object.model, true_pose, est);
  }
  r.offset = object_x - g.center.x;
  if (g.quality <= 0.0 || g.width > hand.max_aperture + 1e-12) return r;
  const ObjectModel obj = turned(config.object.model, g.angle);
  const Simulator sim(hand, obj, config.sim);
  const Transform2 object_pose = place_on_table(obj, object_x);
  const Polygon2 shape = transform_apply(object_pose, obj.cross_section);
  Run run;
  if (hand.is_baseline()) {
    const double q0 = baseline_q_for(hand.baseline, g.width);
    const HandState h = open_hand(hand, {g.center.x, hand.baseline.tip_drop(q0)}, q0);
    if (descent_collides(hand, h, shape, config.sim.contact_tol)) return r;
    run = run_baseline(sim, config.baseline, g.center.x, q0, object_pose, trajectory);
  } else {
    const auto [pre, params] = map_grasp_pose(g, hand, {1.0, 0.0}, config.primitive_steps);
    const HandState h = open_hand(hand, pre.translation, params.q_start);
    if (descent_collides(hand, h, shape, config.sim.contact_tol)) return r;
    run = run_f1(sim, h, object_pose, params, trajectory);
  }
  finish_trial(r, sim, run.final, run.duration, config.lift_height);
  return r;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Histogram force_histogram(const std::vector<double>& forces, double bin_width, int bins) {
  if (!(bin_width > 0.0) || bins < 1) throw ValidationError("invalid histogram bins");
  Histogram h;
  h.bin_width = bin_width;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double f : forces) {
    const int b = std::clamp(static_cast<int>(std::floor(f / bin_width)), 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0};
}

}  // namespace

SuiteReport run_suite(const std::vector<TrialConfig>& configs, unsigned threads,
                      const std::vector<std::size_t>* order) {
  if (configs.empty()) throw ValidationError("run_suite needs at least one config");
  std::vector<std::pair<std::size_t, int>> jobs;
  std::vector<std::vector<TrialResult>> results(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    configs[c].validate();
    results[c].resize(static_cast<std::size_t>(configs[c].n_trials));
    for (int i = 0; i < configs[c].n_trials; ++i) jobs.emplace_back(c, i);
  }
  std::vector<std::size_t> perm(jobs.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (order) {
    if (order->size() != jobs.size()) throw ValidationError("execution order does not match the job count");
    std::vector<std::size_t> check = *order;
    std::sort(check.begin(), check.end());
    if (check != perm) throw ValidationError("execution order is not a permutation");
    perm = *order;
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t k = next++; k < perm.size(); k = next++) {
      const auto [c, i] = jobs[perm[k]];
      try {
        results[c][static_cast<std::size_t>(i)] = run_trial(configs[c], i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SuiteReport report;
  std::map<std::string, std::vector<const TrialResult*>> by_gripper;
  std::vector<std::string> gripper_order;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const TrialConfig& cfg = configs[c];
    ObjectReport o;
    o.object_id = cfg.object.id;
    o.object = cfg.object.model.name;
    o.gripper = to_string(cfg.hand.variant);
    o.mode = to_string(cfg.mode);
    o.trials = std::move(results[c]);
    std::vector<double> forces;
    std::vector<double> times;
    for (const TrialResult& t : o.trials) {
      o.successes += t.success ? 1 : 0;
      o.pinch += t.classification == GraspClass::pinch ? 1 : 0;
      o.envelope += t.classification == GraspClass::envelope ? 1 : 0;
      forces.push_back(t.peak_table_force);
      times.push_back(t.grasp_time);
    }
    o.success_rate = static_cast<double>(o.successes) / static_cast<double>(o.trials.size());
    o.median_peak_table_force = median(forces);
    std::tie(o.mean_grasp_time, o.std_grasp_time) = mean_std(times);
    o.table_force_histogram = force_histogram(forces);
    if (std::find(gripper_order.begin(), gripper_order.end(), o.gripper) == gripper_order.end())
      gripper_order.push_back(o.gripper);
    report.objects.push_back(std::move(o));
  }
  for (const ObjectReport& o : report.objects) {
    for (const TrialResult& t : o.trials) by_gripper[o.gripper].push_back(&t);
  }
  for (const std::string& g : gripper_order) {
    GripperSummary s;
    s.gripper = g;
    std::vector<double> forces;
    std::vector<double> times;
    for (const TrialResult* t : by_gripper[g]) {
      ++s.trials;
      s.successes += t->success ? 1 : 0;
      forces.push_back(t->peak_table_force);
      times.push_back(t->grasp_time);
      s.max_peak_table_force = std::max(s.max_peak_table_force, t->peak_table_force);
    }
    s.success_rate = s.trials ? static_cast<double>(s.successes) / s.trials : 0.0;
    s.median_peak_table_force = median(forces);
    std::tie(s.mean_grasp_time, s.std_grasp_time) = mean_std(times);
    s.table_force_histogram = force_histogram(forces);
    report.grippers.push_back(std::move(s));
  }
  const auto base = std::find_if(report.grippers.begin(), report.grippers.end(),
                                 [](const GripperSummary& s) { return s.gripper == "baseline"; });
  if (base != report.grippers.end() && base->median_peak_table_force > 0.0) {
    for (const GripperSummary& s : report.grippers) {
      if (s.gripper == "baseline") continue;
      report.force_median_ratio.emplace_back(s.gripper, s.median_peak_table_force / base->median_peak_table_force);
    }
  }
  return report;
}

const std::vector<int>& autonomous_object_ids() {
  static const std::vector<int> ids{6, 7, 10, 11, 13, 15, 17, 18, 20, 25};
  return ids;
}

SuiteReport run_autonomous(std::vector<TrialConfig> configs, unsigned threads) {
  for (TrialConfig& c : configs) c.mode = TrialMode::autonomous;
  return run_suite(configs, threads);
}

namespace {

double sig6(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json histogram_json(const Histogram& h) { return {{"bin_width", sig6(h.bin_width)}, {"counts", h.counts}}; }

}  // namespace

json trial_result_to_json(const TrialResult& t) {
  json jt{{"index", t.index},
          {"seed", t.seed},
          {"success", t.success},
          {"fault", t.fault},
          {"peak_table_force", sig6(t.peak_table_force)},
          {"peak_object_force", sig6(t.peak_object_force)},
          {"grasp_time", sig6(t.grasp_time)},
          {"classification", to_string(t.classification)},
          {"alignment_error_deg", sig6(t.alignment_error_deg)},
          {"offset", sig6(t.offset)},
          {"slider_bottomed_out", t.slider_bottomed_out},
          {"table_before_object", t.table_before_object}};
  if (t.fault) jt["fault_reason"] = t.fault_reason;
  return jt;
}

TrialResult trial_result_from_json(const json& j) {
  try {
    TrialResult t;
    t.index = j.at("index").get<int>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.success = j.at("success").get<bool>();
    t.fault = j.at("fault").get<bool>();
    t.fault_reason = j.value("fault_reason", std::string());
    t.peak_table_force = j.at("peak_table_force").get<double>();
    t.peak_object_force = j.at("peak_object_force").get<double>();
    t.grasp_time = j.at("grasp_time").get<double>();
    t.classification = grasp_class_from_string(j.at("classification").get<std::string>());
    t.alignment_error_deg = j.at("alignment_error_deg").get<double>();
    t.offset = j.at("offset").get<double>();
    t.slider_bottomed_out = j.at("slider_bottomed_out").get<bool>();
    t.table_before_object = j.at("table_before_object").get<bool>();
    return t;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("trial result: ") + e.what());
  }
}

json report_to_json(const SuiteReport& report) {
  json objects = json::array();
  for (const ObjectReport& o : report.objects) {
    json trials = json::array();
    for (const TrialResult& t : o.trials) {
      json jt = trial_result_to_json(t);
      trials.push_back(std::move(jt));
    }
    objects.push_back({{"object_id", o.object_id},
                       {"object", o.object},
                       {"gripper", o.gripper},
                       {"mode", o.mode},
                       {"trials", static_cast<int>(o.trials.size())},
                       {"successes", o.successes},
                       {"success_rate", sig6(o.success_rate)},
                       {"median_peak_table_force", sig6(o.median_peak_table_force)},
                       {"mean_grasp_time", sig6(o.mean_grasp_time)},
                       {"std_grasp_time", sig6(o.std_grasp_time)},
                       {"pinch", o.pinch},
                       {"envelope", o.envelope},
                       {"table_force_histogram", histogram_json(o.table_force_histogram)},
                       {"results", trials}});
  }
  json grippers = json::array();
  for (const GripperSummary& s : report.grippers) {
    grippers.push_back({{"gripper", s.gripper},
                        {"trials", s.trials},
                        {"successes", s.successes},
                        {"success_rate", sig6(s.success_rate)},
                        {"median_peak_table_force", sig6(s.median_peak_table_force)},
                        {"max_peak_table_force", sig6(s.max_peak_table_force)},
                        {"mean_grasp_time", sig6(s.mean_grasp_time)},
                        {"std_grasp_time", sig6(s.std_grasp_time)},
                        {"table_force_histogram", histogram_json(s.table_force_histogram)}});
  }
  json ratios = json::object();
  for (const auto& [g, r] : report.force_median_ratio) ratios[g] = sig6(r);
  return {{"format", 1}, {"objects", objects}, {"grippers", grippers}, {"force_median_ratio", ratios}};
}

std::string report_to_csv(const SuiteReport& report) {
  std::ostringstream out;
  out << "gripper,mode,object_id,object,trials,successes,success_rate,median_peak_table_force,mean_grasp_time,"
         "std_grasp_time,pinch,envelope\n";
  for (const ObjectReport& o : report.objects) {
    out << o.gripper << ',' << o.mode << ',' << o.object_id << ',' << o.object << ',' << o.trials.size() << ','
        << o.successes << ',' << fmt6(o.success_rate) << ',' << fmt6(o.median_peak_table_force) << ','
        << fmt6(o.mean_grasp_time) << ',' << fmt6(o.std_grasp_time) << ',' << o.pinch << ',' << o.envelope << '\n';
  }
  return out.str();
}

void emit_report(const SuiteReport& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  if (format == ReportFormat::json) {
    out << report_to_json(report).dump(2) << '\n';
  } else {
    out << report_to_csv(report);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace f1grasp
