#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "f1grasp/harness.hpp"

namespace py = pybind11;
using namespace f1grasp;

namespace {

std::vector<TrialConfig> configs(const std::string& suite_path, const std::vector<std::string>& grippers,
                                 const std::vector<std::string>& objects, const std::string& mode, int trials,
                                 std::uint64_t seed, double alignment_deg, double sigma_center) {
  const auto suite = load_object_suite(suite_path);
  const TrialMode m = trial_mode_from_string(mode);
  std::vector<SuiteObject> chosen;
  if (!objects.empty()) {
    for (const std::string& o : objects) chosen.push_back(find_object(suite, o));
  } else if (m == TrialMode::autonomous) {
    for (int id : autonomous_object_ids()) chosen.push_back(find_object(suite, std::to_string(id)));
  } else {
    chosen = suite;
  }
  std::vector<TrialConfig> out;
  for (const std::string& g : grippers) {
    for (const SuiteObject& o : chosen) {
      TrialConfig c;
      c.hand = make_hand_config(hand_variant_from_string(g));
      c.object = o;
      c.mode = m;
      c.n_trials = trials;
      c.seed = seed;
      c.alignment_min_deg = -alignment_deg;
      c.alignment_max_deg = alignment_deg;
      c.estimator.noise_sigma_center = sigma_center;
      c.validate();
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def(
      "run_suite",
      [](const std::string& suite, const std::vector<std::string>& grippers, const std::vector<std::string>& objects,
         const std::string& mode, int trials, std::uint64_t seed, double alignment_deg, double sigma_center,
         unsigned threads) {
        const auto cs = configs(suite, grippers, objects, mode, trials, seed, alignment_deg, sigma_center);
        py::gil_scoped_release release;
        return report_to_json(run_suite(cs, threads)).dump();
      },
      py::arg("suite"), py::arg("grippers"), py::arg("objects"), py::arg("mode"), py::arg("trials"), py::arg("seed"),
      py::arg("alignment_deg"), py::arg("sigma_center"), py::arg("threads"));

  m.def(
      "run_trial",
      [](const std::string& suite, const std::string& gripper, const std::string& object, const std::string& mode,
         int index, std::uint64_t seed, double alignment_deg, double sigma_center) {
        const TrialConfig c =
            configs(suite, {gripper}, {object}, mode, index + 1, seed, alignment_deg, sigma_center).front();
        return trial_result_to_json(run_trial(c, index)).dump();
      },
      py::arg("suite"), py::arg("gripper"), py::arg("object"), py::arg("mode"), py::arg("index"), py::arg("seed"),
      py::arg("alignment_deg"), py::arg("sigma_center"));

  m.def("load_suite", [](const std::string& path) { return object_suite_to_json(load_object_suite(path)).dump(); });
  m.def("hand_config", [](const std::string& variant) {
    return hand_config_to_json(make_hand_config(hand_variant_from_string(variant))).dump();
  });
  m.def("unloaded_aperture", [](const std::string& variant, double q) {
    return unloaded_aperture(make_hand_config(hand_variant_from_string(variant)), q);
  });
  m.def("aperture_inverse", [](const std::string& variant, double width) {
    return aperture_inverse(make_hand_config(hand_variant_from_string(variant)), width);
  });

  m.def(
      "primitive_translation",
      [](const std::string& variant, double D, int n_steps) {
        const HandConfig hand = make_hand_config(hand_variant_from_string(variant));
        const Simulator sim(hand, std::nullopt);
        const WorldState w0 = sim.initial_state(open_hand(hand, {0.2, 0.05}, aperture_inverse(hand, D)), {});
        const PrimitiveOutcome out = execute_primitive(sim, w0, plan_primitive(w0, hand, D, {1.0, 0.0}, n_steps));
        const Vec2 d = out.final.hand.tip_frame.translation - w0.hand.tip_frame.translation;
        return std::pair<double, double>{d.x, d.z};
      },
      py::arg("variant"), py::arg("D"), py::arg("n_steps") = 200);

  m.def(
      "lift_test",
      [](const std::vector<std::pair<double, double>>& vertices,
         const std::vector<std::tuple<double, double, double, double, double>>& contacts, double mass,
         double mu_finger) {
        ObjectModel o;
        o.name = "object";
        std::vector<Vec2> v;
        for (const auto& [x, z] : vertices) v.push_back({x, z});
        o.cross_section = Polygon2(std::move(v));
        o.mass = mass;
        o.mu_finger = mu_finger;
        o.validate();
        const SimConfig cfg;
        std::vector<ContactPoint> cs;
        for (const auto& [x, z, nx, nz, force] : contacts) {
          ContactPoint c;
          c.position = {x, z};
          c.normal = Vec2{nx, nz}.normalized();
          c.penetration_depth = force / cfg.contact_stiffness;
          c.body_pair = {Body::distal, Body::object};
          cs.push_back(c);
        }
        return lift_test(cs, o, {});
      },
      py::arg("vertices"), py::arg("contacts"), py::arg("mass"), py::arg("mu_finger"));
}
