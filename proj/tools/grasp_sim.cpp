#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "f1grasp/controller.hpp"
#include "f1grasp/harness.hpp"
#include "f1grasp/server.hpp"
#include "f1grasp/teleop.hpp"

#ifndef F1GRASP_DATA_DIR
#define F1GRASP_DATA_DIR "data"
#endif

using namespace f1grasp;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kFault = 3;

struct RunOptions {
  std::string suite = std::string(F1GRASP_DATA_DIR) + "/objects.json";
  std::vector<std::string> grippers{"f1"};
  std::string hand_file;
  std::string mode = "primitive";
  int trials = 20;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  std::vector<std::string> objects;
  double alignment = 45.0;
  double sigma_center = 0.0;
  std::string poses;
  unsigned threads = 0;
  std::string trajectory;
};

int cmd_run(const RunOptions& o) {
  const auto suite = load_object_suite(o.suite);
  const TrialMode mode = trial_mode_from_string(o.mode);
  std::vector<SuiteObject> chosen;
  if (!o.objects.empty()) {
    for (const std::string& name : o.objects) chosen.push_back(find_object(suite, name));
  } else if (mode == TrialMode::autonomous) {
    for (int id : autonomous_object_ids()) chosen.push_back(find_object(suite, std::to_string(id)));
  } else {
    chosen = suite;
  }
  std::optional<std::vector<GraspPose>> poses;
  if (!o.poses.empty()) poses = load_external_poses(o.poses);
  std::vector<TrialConfig> configs;
  for (const std::string& g : o.grippers) {
    const HandConfig hand =
        o.hand_file.empty() ? make_hand_config(hand_variant_from_string(g)) : load_hand_config(o.hand_file);
    for (const SuiteObject& obj : chosen) {
      TrialConfig c;
      c.hand = hand;
      c.object = obj;
      c.mode = mode;
      c.n_trials = o.trials;
      c.seed = o.seed;
      c.alignment_min_deg = -o.alignment;
      c.alignment_max_deg = o.alignment;
      c.estimator.noise_sigma_center = o.sigma_center;
      c.external_poses = poses;
      c.validate();
      configs.push_back(std::move(c));
    }
  }
  if (configs.empty()) throw ValidationError("no objects selected");
  if (!o.trajectory.empty()) {
    std::vector<WorldState> traj;
    run_trial(configs.front(), 0, &traj);
    std::ofstream out(o.trajectory);
    if (!out) throw ValidationError("cannot write " + o.trajectory);
    write_trajectory_log(out, traj, configs.front().sim);
  }
  const SuiteReport report = run_suite(configs, o.threads);
  ReportFormat fmt = ReportFormat::json;
  if (o.format == "csv" || (o.format.empty() && o.out.size() > 4 && o.out.substr(o.out.size() - 4) == ".csv"))
    fmt = ReportFormat::csv;
  if (o.out.empty()) {
    std::cout << (fmt == ReportFormat::json ? report_to_json(report).dump(2) + "\n" : report_to_csv(report));
  } else {
    emit_report(report, o.out, fmt);
  }
  for (const GripperSummary& g : report.grippers) {
    std::cerr << g.gripper << ": " << g.successes << "/" << g.trials << " succeeded, median peak table force "
              << g.median_peak_table_force << " N\n";
  }
  for (const ObjectReport& obj : report.objects) {
    for (const TrialResult& t : obj.trials) {
      if (t.fault) {
        std::cerr << "fault: " << obj.object << " trial " << t.index << ": " << t.fault_reason << '\n';
        return kFault;
      }
    }
  }
  return kOk;
}

int cmd_replay(const std::string& path, const std::string& suite_path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::string first;
  while (std::getline(in, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
  }
  json head;
  if (!first.empty()) {
    try {
      head = json::parse(first);
    } catch (const json::parse_error& e) {
      throw ValidationError(path + " line 1: " + e.what());
    }
  }
  in.clear();
  in.seekg(0);
  if (head.is_object() && head.value("type", std::string()) == "session") {
    const ReplayReport r = replay_session_log(in, load_object_suite(suite_path), seed);
    json out{{"kind", "session"},
             {"ticks", r.ticks},
             {"phase", to_string(r.phase)},
             {"diverged", r.diverged},
             {"result", trial_result_to_json(r.result)}};
    if (r.diverged) {
      out["detail"] = r.detail;
      out["divergence_tick"] = r.divergence_tick;
    }
    std::cout << out.dump(2) << '\n';
    return r.diverged || r.result.fault ? kFault : kOk;
  }
  const TrajectorySummary s = summarize_trajectory_log(in);
  std::cout << json{{"kind", "trajectory"},
                    {"steps", s.steps},
                    {"duration", s.duration},
                    {"final_q", s.final_q},
                    {"peak_table_force", s.peak_table_force},
                    {"peak_object_force", s.peak_object_force},
                    {"tip_travel", s.tip_travel}}
                   .dump(2)
            << '\n';
  return kOk;
}

int cmd_objects(const std::string& suite_path, bool as_json) {
  const auto suite = load_object_suite(suite_path);
  if (as_json) {
    std::cout << object_suite_to_json(suite).dump(2) << '\n';
    return kOk;
  }
  for (const SuiteObject& o : suite) {
    std::printf("%3d  %-16s %6.1f g  %5.1f x %5.1f mm\n", o.id, o.model.name.c_str(), o.model.mass * 1e3,
                o.model.width() * 1e3, o.model.height() * 1e3);
  }
  return kOk;
}

int cmd_serve(const std::string& suite_path, const std::string& address, unsigned short port,
              const std::string& object, const std::string& gripper, std::uint64_t seed, const std::string& record_dir) {
  ServerConfig c;
  c.suite = load_object_suite(suite_path);
  c.address = address;
  c.port = port;
  c.record_dir = record_dir;
  c.defaults.trial.object = object.empty() ? c.suite.front() : find_object(c.suite, object);
  c.defaults.trial.hand = make_hand_config(hand_variant_from_string(gripper));
  c.defaults.trial.seed = seed;
  c.defaults.trial.alignment_min_deg = -10.0;
  c.defaults.trial.alignment_max_deg = 10.0;
  c.handle_signals = true;
  TeleopServer server(std::move(c));
  const unsigned short bound = server.listen();
  std::cerr << "listening on ws://" << address << ":" << bound << "/\n";
  server.run();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar grasp simulator"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "Run a batch of grasp trials");
  run->add_option("--suite", ro.suite, "Object suite JSON");
  run->add_option("--gripper", ro.grippers, "f1, f1-wide, f1-extended or baseline (repeatable)");
  run->add_option("--hand", ro.hand_file, "Hand configuration JSON (overrides --gripper)");
  run->add_option("--mode", ro.mode, "primitive or auto");
  run->add_option("--trials", ro.trials, "Trials per object")->check(CLI::PositiveNumber);
  run->add_option("--seed", ro.seed, "Suite seed");
  run->add_option("--out", ro.out, "Report path (.json or .csv); stdout if omitted");
  run->add_option("--format", ro.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--object", ro.objects, "Restrict to these objects (name or id, repeatable)");
  run->add_option("--alignment-deg", ro.alignment, "Half-width of the alignment error range")
      ->check(CLI::Range(0.0, 90.0));
  run->add_option("--sigma-center", ro.sigma_center, "Estimator center noise [m]")->check(CLI::NonNegativeNumber);
  run->add_option("--poses", ro.poses, "External grasp pose file used instead of the estimator");
  run->add_option("--threads", ro.threads, "Worker threads (0 = all cores)");
  run->add_option("--trajectory", ro.trajectory, "Write the step log of the first trial here");

  std::string log;
  std::string replay_suite = std::string(F1GRASP_DATA_DIR) + "/objects.json";
  std::optional<std::uint64_t> replay_seed;
  auto* replay = app.add_subcommand("replay", "Summarize a trajectory log or re-run a session log");
  replay->add_option("--log", log, "Log file (JSON lines)")->required();
  replay->add_option("--suite", replay_suite, "Object suite for session logs");
  replay->add_option("--seed", replay_seed, "Replace the recorded session seed");

  std::string objects_suite = std::string(F1GRASP_DATA_DIR) + "/objects.json";
  bool list = false;
  bool as_json = false;
  auto* objects = app.add_subcommand("objects", "Show the object suite");
  objects->add_option("--suite", objects_suite, "Object suite JSON");
  objects->add_flag("--list", list, "List objects");
  objects->add_flag("--json", as_json, "Print the suite as JSON");

  std::string serve_suite = std::string(F1GRASP_DATA_DIR) + "/objects.json";
  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  std::string serve_object;
  std::string serve_gripper = "f1";
  std::uint64_t serve_seed = 0;
  std::string record_dir;
  auto* serve = app.add_subcommand("serve", "Run the teleoperation WebSocket server");
  serve->add_option("--suite", serve_suite, "Object suite JSON");
  serve->add_option("--address", address, "Listen address");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--object", serve_object, "Initial object");
  serve->add_option("--gripper", serve_gripper, "Initial gripper");
  serve->add_option("--seed", serve_seed, "Initial seed");
  serve->add_option("--record-dir", record_dir, "Write session logs here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(ro);
    if (*replay) return cmd_replay(log, replay_suite, replay_seed);
    if (*objects) return cmd_objects(objects_suite, as_json && !list);
    if (*serve) return cmd_serve(serve_suite, address, port, serve_object, serve_gripper, serve_seed, record_dir);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFault;
  }
  return kOk;
}
