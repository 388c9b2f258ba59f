#include "cmservo/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

namespace cmservo::scenario {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ValidationError(field, msg);
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

// Fields are addressed by dotted path in error messages; the lookup key in
// the enclosing object is the last path segment.
std::string key_of(const std::string& path) {
  const auto pos = path.rfind('.');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

const json* find_field(const json& j, const std::string& field) {
  return find(j, key_of(field).c_str());
}

double get_number(const json& j, const std::string& field, double fallback) {
  const json* v = find_field(j, field);
  if (!v) return fallback;
  if (!v->is_number()) fail(field, "expected a number");
  return v->get<double>();
}

int get_int(const json& j, const std::string& field, int fallback) {
  const json* v = find_field(j, field);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(field, "expected an integer");
  return v->get<int>();
}

std::string get_string(const json& j, const std::string& field, const std::string& fallback) {
  const json* v = find_field(j, field);
  if (!v) return fallback;
  if (!v->is_string()) fail(field, "expected a string");
  return v->get<std::string>();
}

Vec vec_from_json(const json& v, const std::string& field, int expected = -1) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  Vec out(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(field, "expected an array of numbers");
    out(static_cast<int>(i)) = v[i].get<double>();
  }
  if (expected >= 0 && out.size() != expected) {
    fail(field, "expected " + std::to_string(expected) + " entries");
  }
  return out;
}

Vec get_vec(const json& j, const std::string& field, const Vec& fallback, int expected = -1) {
  const json* v = find_field(j, field);
  if (!v) return fallback;
  return vec_from_json(*v, field, expected);
}

Eigen::Vector3d get_vec3(const json& j, const std::string& field,
                         const Eigen::Vector3d& fallback) {
  const json* v = find_field(j, field);
  if (!v) return fallback;
  const Vec raw = vec_from_json(*v, field, 3);
  return {raw(0), raw(1), raw(2)};
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

sim::ObstacleSpec obstacle_from_json(const json& j, const std::string& field) {
  sim::ObstacleSpec spec;
  const json* geometry = find(j, "geometry");
  if (!geometry) fail(field + ".geometry", "missing");
  const std::string geo_type = get_string(*geometry, field + ".geometry.type", "");
  if (geo_type == "half_space") {
    sim::HalfSpace hs;
    hs.point = get_vec3(*geometry, field + ".geometry.point_mm", Eigen::Vector3d::Zero());
    hs.normal = get_vec3(*geometry, field + ".geometry.normal", Eigen::Vector3d::UnitZ());
    const double norm = hs.normal.norm();
    if (norm < 1e-12) fail(field + ".geometry.normal", "zero normal");
    hs.normal /= norm;
    spec.geometry = hs;
  } else if (geo_type == "sphere") {
    sim::Sphere sp;
    sp.center = get_vec3(*geometry, field + ".geometry.center_mm", Eigen::Vector3d::Zero());
    sp.radius = get_number(*geometry, field + ".geometry.radius_mm", 0.0);
    spec.geometry = sp;
  } else {
    fail(field + ".geometry.type", "expected half_space or sphere");
  }

  const json* stiffness = find(j, "stiffness");
  const std::string stiff_type =
      stiffness ? get_string(*stiffness, field + ".stiffness.type", "rigid") : "rigid";
  if (stiff_type == "rigid") {
    spec.stiffness = sim::RigidStiffness{};
  } else if (stiff_type == "elastic") {
    spec.stiffness = sim::ElasticStiffness{get_number(*stiffness, field + ".stiffness.k", 1.0)};
  } else if (stiff_type == "variable") {
    spec.stiffness = sim::VariableStiffness{
        get_number(*stiffness, field + ".stiffness.k_soft", 0.1),
        get_number(*stiffness, field + ".stiffness.k_stiff", 10.0),
        get_number(*stiffness, field + ".stiffness.depth_threshold_mm", 3.0)};
  } else {
    fail(field + ".stiffness.type", "expected rigid, elastic or variable");
  }

  spec.tangential_drag = get_number(j, field + ".tangential_drag", 0.0);
  try {
    spec.validate();
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
  return spec;
}

json obstacle_to_json(const sim::ObstacleSpec& spec) {
  json j;
  if (const auto* hs = std::get_if<sim::HalfSpace>(&spec.geometry)) {
    j["geometry"] = {{"type", "half_space"},
                     {"point_mm", vec3_to_json(hs->point)},
                     {"normal", vec3_to_json(hs->normal)}};
  } else {
    const auto& sp = std::get<sim::Sphere>(spec.geometry);
    j["geometry"] = {{"type", "sphere"},
                     {"center_mm", vec3_to_json(sp.center)},
                     {"radius_mm", sp.radius}};
  }
  if (std::holds_alternative<sim::RigidStiffness>(spec.stiffness)) {
    j["stiffness"] = {{"type", "rigid"}};
  } else if (const auto* el = std::get_if<sim::ElasticStiffness>(&spec.stiffness)) {
    j["stiffness"] = {{"type", "elastic"}, {"k", el->k}};
  } else {
    const auto& var = std::get<sim::VariableStiffness>(spec.stiffness);
    j["stiffness"] = {{"type", "variable"},
                      {"k_soft", var.k_soft},
                      {"k_stiff", var.k_stiff},
                      {"depth_threshold_mm", var.depth_threshold}};
  }
  j["tangential_drag"] = spec.tangential_drag;
  return j;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.schema_version = get_int(j, "schema_version", 1);
  if (cfg.schema_version != 1) fail("schema_version", "unsupported schema version");
  cfg.name = get_string(j, "name", "scenario");
  const json* seed = find(j, "seed");
  if (!seed) fail("seed", "missing (runs must be reproducible)");
  if (!seed->is_number_unsigned() && !seed->is_number_integer()) fail("seed", "expected an integer");
  cfg.seed = seed->get<std::uint64_t>();

  if (const json* cm = find(j, "cm")) {
    cfg.cm.length_mm = get_number(*cm, "cm.length_mm", cfg.cm.length_mm);
    cfg.cm.bend_gain = get_number(*cm, "cm.bend_gain", cfg.cm.bend_gain);
    if (const json* fractions = find(*cm, "sample_fractions")) {
      const Vec f = vec_from_json(*fractions, "cm.sample_fractions");
      cfg.cm.sample_fractions.assign(f.data(), f.data() + f.size());
    }
    cfg.cm.backlash_width = get_number(*cm, "cm.backlash_width", cfg.cm.backlash_width);
    cfg.structural_stiffness =
        get_number(*cm, "cm.structural_stiffness", cfg.structural_stiffness);
    cfg.initial_theta = get_vec(*cm, "cm.initial_theta", cfg.initial_theta, 3);
  }
  try {
    cfg.cm.validate();
  } catch (const std::exception& e) {
    fail("cm", e.what());
  }

  if (const json* cam = find(j, "camera")) {
    cfg.camera.focal_px = get_number(*cam, "camera.focal_px", cfg.camera.focal_px);
    cfg.camera.eye_mm = get_vec3(*cam, "camera.position_mm", cfg.camera.eye_mm);
    cfg.camera.target_mm = get_vec3(*cam, "camera.look_at_mm", cfg.camera.target_mm);
    cfg.camera.up = get_vec3(*cam, "camera.up", cfg.camera.up);
    if (const json* proj = find(*cam, "P")) {
      if (!proj->is_array() || proj->size() != 3) fail("camera.P", "expected 3 rows");
      Eigen::Matrix<double, 3, 4> P;
      for (int r = 0; r < 3; ++r) {
        const Vec row = vec_from_json((*proj)[static_cast<size_t>(r)], "camera.P", 4);
        P.row(r) = row.transpose();
      }
      cfg.camera.projection_override = P;
    }
  }
  cfg.noise_sigma_px = get_number(j, "noise_sigma_px", cfg.noise_sigma_px);
  if (cfg.noise_sigma_px < 0.0) fail("noise_sigma_px", "must be >= 0");

  if (const json* obstacles = find(j, "obstacles")) {
    if (!obstacles->is_array()) fail("obstacles", "expected an array");
    for (size_t i = 0; i < obstacles->size(); ++i) {
      cfg.obstacles.push_back(obstacle_from_json(
          (*obstacles)[i], "obstacles[" + std::to_string(i) + "]"));
    }
  }

  if (const json* ctrl = find(j, "controller")) {
    cfg.beta = get_number(*ctrl, "controller.beta", cfg.beta);
    cfg.epsilon = get_number(*ctrl, "controller.epsilon", cfg.epsilon);
    cfg.max_steps = get_int(*ctrl, "controller.max_steps", cfg.max_steps);
    cfg.dt = get_number(*ctrl, "controller.dt", cfg.dt);
    cfg.lambda_theta = get_vec(*ctrl, "controller.lambda_theta", cfg.lambda_theta);
    cfg.lambda_features = get_vec(*ctrl, "controller.lambda_features", cfg.lambda_features);
    if (const json* jinit = find(*ctrl, "j_init")) {
      cfg.j_init_mode = get_string(*jinit, "controller.j_init.mode", cfg.j_init_mode);
      cfg.j_init_scale = get_number(*jinit, "controller.j_init.scale", cfg.j_init_scale);
    }
    if (const json* bounds = find(*ctrl, "step_bounds")) {
      cfg.step_lower = get_vec(*bounds, "controller.step_bounds.lower", cfg.step_lower, 3);
      cfg.step_upper = get_vec(*bounds, "controller.step_bounds.upper", cfg.step_upper, 3);
    }
    if (const json* ineq = find(*ctrl, "inequalities")) {
      const json* A = find(*ineq, "A");
      const json* b = find(*ineq, "b");
      if (A && A->is_array() && !A->empty()) {
        cfg.inequality_A.resize(static_cast<int>(A->size()), 3);
        for (size_t r = 0; r < A->size(); ++r) {
          const Vec row =
              vec_from_json((*A)[r], "controller.inequalities.A[" + std::to_string(r) + "]", 3);
          cfg.inequality_A.row(static_cast<int>(r)) = row.transpose();
        }
        if (!b) fail("controller.inequalities.b", "missing");
        cfg.inequality_b = vec_from_json(*b, "controller.inequalities.b",
                                         static_cast<int>(A->size()));
      }
    }
  }
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) fail("controller.beta", "must lie in [0, 1]");
  if (!(cfg.epsilon > 0.0)) fail("controller.epsilon", "must be > 0");
  if (cfg.max_steps < 0) fail("controller.max_steps", "must be >= 0");
  if (!(cfg.dt > 0.0)) fail("controller.dt", "must be > 0");
  if (cfg.j_init_mode != "ones" && cfg.j_init_mode != "identity" && cfg.j_init_mode != "scaled") {
    fail("controller.j_init.mode", "expected ones, identity or scaled");
  }
  if ((cfg.step_lower.array() > cfg.step_upper.array()).any()) {
    fail("controller.step_bounds", "lower must be <= upper elementwise (delta_min <= delta_max)");
  }

  const json* objective = find(j, "objective");
  if (!objective) fail("objective", "missing");
  const std::string obj_type = get_string(*objective, "objective.type", "");
  const json* indices = find(*objective, "indices");
  if (!indices) fail("objective.indices", "missing");
  cfg.objective.indices.clear();
  for (size_t i = 0; i < indices->size(); ++i) {
    if (!(*indices)[i].is_number_integer()) fail("objective.indices", "expected integers");
    cfg.objective.indices.push_back((*indices)[i].get<int>());
  }
  if (obj_type == "overlay") {
    cfg.objective.type = ObjectiveSpec::Type::kOverlay;
    try {
      FfvKind::overlay(cfg.objective.indices);
    } catch (const std::exception& e) {
      fail("objective.indices", e.what());
    }
    if (const json* theta = find(*objective, "target_theta")) {
      cfg.objective.target_theta = vec_from_json(*theta, "objective.target_theta", 3);
    }
    if (const json* targets = find(*objective, "targets_px")) {
      if (!targets->is_array() || targets->size() != cfg.objective.indices.size()) {
        fail("objective.targets_px", "expected one [p, q] pair per selected index");
      }
      for (size_t i = 0; i < targets->size(); ++i) {
        const Vec t = vec_from_json((*targets)[i], "objective.targets_px", 2);
        cfg.objective.targets_px.emplace_back(t(0), t(1));
      }
    } else if (!cfg.objective.target_theta) {
      fail("objective.targets_px", "missing (or provide target_theta)");
    }
  } else if (obj_type == "curvature") {
    cfg.objective.type = ObjectiveSpec::Type::kCurvature;
    if (cfg.objective.indices.size() != 3) {
      fail("objective.indices", "curvature control needs exactly three indices");
    }
    try {
      FfvKind::curvature({cfg.objective.indices[0], cfg.objective.indices[1],
                          cfg.objective.indices[2]});
    } catch (const std::exception& e) {
      fail("objective.indices", e.what());
    }
    cfg.objective.desired_radius_px = get_number(*objective, "objective.desired_radius_px", 0.0);
    if (!(cfg.objective.desired_radius_px > 0.0)) {
      fail("objective.desired_radius_px", "must be > 0");
    }
  } else {
    fail("objective.type", "expected overlay or curvature");
  }
  for (int idx : cfg.objective.indices) {
    if (idx < 0 || idx >= cfg.cm.point_count()) {
      fail("objective.indices", "index out of range for cm.sample_fractions");
    }
  }

  if (const json* prescan = find(j, "prescan")) {
    cfg.prescan.grid = get_int(*prescan, "prescan.grid", cfg.prescan.grid);
    cfg.prescan.theta_a_min = get_number(*prescan, "prescan.theta_a_min", cfg.prescan.theta_a_min);
    cfg.prescan.theta_a_max = get_number(*prescan, "prescan.theta_a_max", cfg.prescan.theta_a_max);
    cfg.prescan.theta_b_min = get_number(*prescan, "prescan.theta_b_min", cfg.prescan.theta_b_min);
    cfg.prescan.theta_b_max = get_number(*prescan, "prescan.theta_b_max", cfg.prescan.theta_b_max);
    if (cfg.prescan.grid < 2) fail("prescan.grid", "must be >= 2");
  }
  return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  json cm;
  cm["length_mm"] = cfg.cm.length_mm;
  cm["bend_gain"] = cfg.cm.bend_gain;
  cm["sample_fractions"] = cfg.cm.sample_fractions;
  cm["backlash_width"] = cfg.cm.backlash_width;
  cm["structural_stiffness"] = cfg.structural_stiffness;
  cm["initial_theta"] = vec_to_json(cfg.initial_theta);
  j["cm"] = cm;
  json cam;
  cam["focal_px"] = cfg.camera.focal_px;
  cam["position_mm"] = vec3_to_json(cfg.camera.eye_mm);
  cam["look_at_mm"] = vec3_to_json(cfg.camera.target_mm);
  cam["up"] = vec3_to_json(cfg.camera.up);
  if (cfg.camera.projection_override) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
      rows.push_back(vec_to_json(cfg.camera.projection_override->row(r).transpose()));
    }
    cam["P"] = rows;
  }
  j["camera"] = cam;
  j["noise_sigma_px"] = cfg.noise_sigma_px;
  json obstacles = json::array();
  for (const auto& o : cfg.obstacles) obstacles.push_back(obstacle_to_json(o));
  j["obstacles"] = obstacles;
  json ctrl;
  ctrl["beta"] = cfg.beta;
  ctrl["epsilon"] = cfg.epsilon;
  ctrl["max_steps"] = cfg.max_steps;
  ctrl["dt"] = cfg.dt;
  ctrl["lambda_theta"] = vec_to_json(cfg.lambda_theta);
  ctrl["lambda_features"] = vec_to_json(cfg.lambda_features);
  ctrl["j_init"] = {{"mode", cfg.j_init_mode}, {"scale", cfg.j_init_scale}};
  ctrl["step_bounds"] = {{"lower", vec_to_json(cfg.step_lower)},
                         {"upper", vec_to_json(cfg.step_upper)}};
  json ineq;
  json A = json::array();
  for (int r = 0; r < cfg.inequality_A.rows(); ++r) {
    A.push_back(vec_to_json(cfg.inequality_A.row(r).transpose()));
  }
  ineq["A"] = A;
  ineq["b"] = vec_to_json(cfg.inequality_b);
  ctrl["inequalities"] = ineq;
  j["controller"] = ctrl;
  json objective;
  if (cfg.objective.type == ObjectiveSpec::Type::kOverlay) {
    objective["type"] = "overlay";
    objective["indices"] = cfg.objective.indices;
    if (!cfg.objective.targets_px.empty()) {
      json targets = json::array();
      for (const auto& t : cfg.objective.targets_px) {
        targets.push_back(json::array({t.x(), t.y()}));
      }
      objective["targets_px"] = targets;
    }
    if (cfg.objective.target_theta) {
      objective["target_theta"] = vec_to_json(*cfg.objective.target_theta);
    }
  } else {
    objective["type"] = "curvature";
    objective["indices"] = cfg.objective.indices;
    objective["desired_radius_px"] = cfg.objective.desired_radius_px;
  }
  j["objective"] = objective;
  j["prescan"] = {{"grid", cfg.prescan.grid},
                  {"theta_a_min", cfg.prescan.theta_a_min},
                  {"theta_a_max", cfg.prescan.theta_a_max},
                  {"theta_b_min", cfg.prescan.theta_b_min},
                  {"theta_b_max", cfg.prescan.theta_b_max}};
  return j;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open scenario file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("json", e.what());  // nlohmann reports the byte offset of the error
  }
  return scenario_from_json(j);
}

namespace {

sim::CameraModel make_camera(const ScenarioConfig& cfg, double sigma) {
  if (cfg.camera.projection_override) {
    return sim::CameraModel(*cfg.camera.projection_override, sigma);
  }
  return sim::CameraModel::look_at(cfg.camera.eye_mm, cfg.camera.target_mm, cfg.camera.up,
                                   cfg.camera.focal_px, sigma);
}

/// Exact (noise-free) resolved feature pixels for a given pose of this
/// scenario's plant, obstacles included.
FeaturePointSet resolved_pixels_at(const ScenarioConfig& cfg, const Vec& theta) {
  sim::SimWorld world(cfg.cm, make_camera(cfg, 0.0), cfg.obstacles, cfg.structural_stiffness,
                      cfg.seed, ActuationVector(theta));
  return world.measure();
}

}  // namespace

sim::SimWorld make_world(const ScenarioConfig& cfg) {
  return sim::SimWorld(cfg.cm, make_camera(cfg, cfg.noise_sigma_px), cfg.obstacles,
                       cfg.structural_stiffness, cfg.seed, ActuationVector(cfg.initial_theta));
}

FeedbackFeatureVector resolve_gamma_d(const ScenarioConfig& cfg) {
  if (cfg.objective.type == ObjectiveSpec::Type::kCurvature) {
    Vec g(1);
    g(0) = 1.0 / cfg.objective.desired_radius_px;
    return FeedbackFeatureVector(g);
  }
  std::vector<Eigen::Vector2d> targets = cfg.objective.targets_px;
  if (cfg.objective.target_theta) {
    const FeaturePointSet px = resolved_pixels_at(cfg, *cfg.objective.target_theta);
    targets.clear();
    for (int idx : cfg.objective.indices) targets.push_back(px.point(idx));
  }
  Vec g(2 * static_cast<int>(targets.size()));
  for (size_t i = 0; i < targets.size(); ++i) {
    g(2 * static_cast<int>(i)) = targets[i].x();
    g(2 * static_cast<int>(i) + 1) = targets[i].y();
  }
  return FeedbackFeatureVector(g);
}

ControllerConfig make_controller_config(const ScenarioConfig& cfg) {
  ControllerConfig ctrl;
  ctrl.beta = cfg.beta;
  ctrl.epsilon = cfg.epsilon;
  ctrl.max_steps = cfg.max_steps;
  ctrl.dt = cfg.dt;
  ctrl.lambda_theta = cfg.lambda_theta;
  ctrl.lambda_features = cfg.lambda_features;
  ctrl.constraints = ConstraintSet(cfg.inequality_A, cfg.inequality_b, cfg.step_lower,
                                   cfg.step_upper);
  ctrl.gamma_d = resolve_gamma_d(cfg);
  if (cfg.objective.type == ObjectiveSpec::Type::kCurvature) {
    ctrl.ffv = FfvKind::curvature(
        {cfg.objective.indices[0], cfg.objective.indices[1], cfg.objective.indices[2]});
  } else {
    ctrl.ffv = FfvKind::overlay(cfg.objective.indices);
  }
  JacobianInitMode mode = JacobianInitMode::kOnes;
  double scale = 1.0;
  if (cfg.j_init_mode == "identity") {
    mode = JacobianInitMode::kIdentityLike;
  } else if (cfg.j_init_mode == "scaled") {
    mode = JacobianInitMode::kScaled;
    scale = cfg.j_init_scale;
  }
  ctrl.j_init = init_jacobian(3, ctrl.gamma_d.dim(), mode, scale, cfg.beta);
  return ctrl;
}

namespace {

// Andrew monotone chain; returns the hull counter-clockwise.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  const size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

bool inside_hull(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& p,
                 double margin_px) {
  if (hull.size() < 3) {
    for (const auto& h : hull) {
      if ((h - p).norm() <= margin_px) return true;
    }
    return false;
  }
  for (size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d& a = hull[i];
    const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
    const Eigen::Vector2d edge = b - a;
    const double cross = edge.x() * (p.y() - a.y()) - edge.y() * (p.x() - a.x());
    if (cross < -margin_px * edge.norm()) return false;
  }
  return true;
}

}  // namespace

PrescanResult prescan_objective(const ScenarioConfig& cfg) {
  PrescanResult result;
  const int grid = cfg.prescan.grid;
  const double roll = cfg.initial_theta(2);

  std::vector<std::vector<Eigen::Vector2d>> per_index(cfg.objective.indices.size());
  double radius_min = std::numeric_limits<double>::infinity();
  double radius_max = 0.0;

  std::optional<FfvKind> curvature_kind;
  if (cfg.objective.type == ObjectiveSpec::Type::kCurvature) {
    curvature_kind = FfvKind::curvature(
        {cfg.objective.indices[0], cfg.objective.indices[1], cfg.objective.indices[2]});
  }

  const sim::CameraModel camera = make_camera(cfg, 0.0);
  for (int ia = 0; ia < grid; ++ia) {
    for (int ib = 0; ib < grid; ++ib) {
      Vec theta(3);
      theta(0) = cfg.prescan.theta_a_min +
                 (cfg.prescan.theta_a_max - cfg.prescan.theta_a_min) * ia / (grid - 1);
      theta(1) = cfg.prescan.theta_b_min +
                 (cfg.prescan.theta_b_max - cfg.prescan.theta_b_min) * ib / (grid - 1);
      theta(2) = roll;
      const ActuationVector pose(theta);
      const sim::CmState state{pose, pose};
      FeaturePointSet px = sim::project_points(camera, sim::forward_kinematics(cfg.cm, state));
      if (curvature_kind) {
        try {
          const double kappa = eval_ffv(*curvature_kind, px).values()(0);
          const double radius = 1.0 / std::max(kappa, 1e-9);
          radius_min = std::min(radius_min, radius);
          radius_max = std::max(radius_max, radius);
        } catch (const std::domain_error&) {
          // degenerate projection at this grid pose; skip
        }
      } else {
        for (size_t k = 0; k < cfg.objective.indices.size(); ++k) {
          per_index[k].push_back(px.point(cfg.objective.indices[k]));
        }
      }
    }
  }

  if (curvature_kind) {
    result.radius_min_px = radius_min;
    result.radius_max_px = radius_max;
    result.reachable = cfg.objective.desired_radius_px >= radius_min - 1.0 &&
                       cfg.objective.desired_radius_px <= radius_max + 1.0;
    return result;
  }

  const FeedbackFeatureVector gamma_d = resolve_gamma_d(cfg);
  result.reachable = true;
  for (size_t k = 0; k < cfg.objective.indices.size(); ++k) {
    const Eigen::Vector2d target(gamma_d.values()(2 * static_cast<int>(k)),
                                 gamma_d.values()(2 * static_cast<int>(k) + 1));
    const auto hull = convex_hull(per_index[k]);
    if (!inside_hull(hull, target, 2.0)) result.reachable = false;
  }
  return result;
}

ScenarioRunResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioRunResult result;
  result.prescan = prescan_objective(cfg);

  sim::SimWorld world = make_world(cfg);
  SimPlant plant(world);
  const ControllerConfig ctrl_cfg = make_controller_config(cfg);
  ControlRunResult ctrl = run_control_loop(ctrl_cfg, plant);

  result.records = std::move(ctrl.records);
  result.converged = ctrl.converged;
  result.steps = ctrl.steps_commanded;
  result.final_error = ctrl.final_error;
  result.final_ede_px = result.records.back().ede;
  result.final_gamma = result.records.back().gamma;

  for (size_t i = 0; i < result.records.size(); ++i) {
    const sim::StepTruth& truth =
        i == 0 ? plant.initial_truth() : plant.truths().at(i - 1);
    result.records[i].theta_effective = truth.theta_effective.values();
    result.records[i].contact = truth.contact;
  }
  result.phases = segment_phases(result.records);
  return result;
}

void write_csv(std::ostream& out, const std::vector<StepRecord>& records) {
  if (records.empty()) throw std::invalid_argument("write_csv: empty log");
  const int n = static_cast<int>(records.front().theta.size());
  const int m = static_cast<int>(records.front().features_flat.size()) / 2;
  const int big_n = static_cast<int>(records.front().gamma.size());

  out << "step";
  for (int i = 1; i <= n; ++i) out << ",theta_" << i;
  for (int i = 1; i <= n; ++i) out << ",theta_eff_" << i;
  for (int i = 1; i <= m; ++i) out << ",v_" << i << "p,v_" << i << "q";
  for (int i = 1; i <= big_n; ++i) out << ",gamma_" << i;
  out << ",ede_px,ymm,contact,converged\n";

  for (const StepRecord& rec : records) {
    out << rec.step;
    for (int i = 0; i < n; ++i) out << ',' << format_double(rec.theta(i));
    const Vec& eff = rec.theta_effective.size() == n ? rec.theta_effective : rec.theta;
    for (int i = 0; i < n; ++i) out << ',' << format_double(eff(i));
    for (int i = 0; i < 2 * m; ++i) out << ',' << format_double(rec.features_flat(i));
    for (int i = 0; i < big_n; ++i) out << ',' << format_double(rec.gamma(i));
    out << ',' << format_double(rec.ede) << ',' << format_double(rec.ymm) << ','
        << (rec.contact ? 1 : 0) << ',' << (rec.converged ? 1 : 0) << '\n';
  }
}

json summary_to_json(const ScenarioConfig& cfg, const ScenarioRunResult& result,
                     const std::string& csv_name) {
  json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["converged"] = result.converged;
  j["steps"] = result.steps;
  j["final_error"] = result.final_error;
  j["final_ede_px"] = result.final_ede_px;
  j["final_gamma"] = vec_to_json(result.final_gamma);
  j["gamma_d"] = vec_to_json(resolve_gamma_d(cfg).values());
  j["objective_reachable"] = result.prescan.reachable;
  if (cfg.objective.type == ObjectiveSpec::Type::kCurvature) {
    j["achievable_radius_px"] = {{"min", result.prescan.radius_min_px},
                                 {"max", result.prescan.radius_max_px}};
  }
  json phases = json::array();
  for (const auto& seg : result.phases.segments) {
    phases.push_back({{"start", seg.start}, {"end", seg.end}, {"label", phase_name(seg.label)}});
  }
  j["phases"] = phases;
  j["csv"] = csv_name;
  return j;
}

ScenarioRunResult run_scenario_to_dir(const ScenarioConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  ScenarioRunResult result = run_scenario(cfg);

  const std::string csv_name = cfg.name + "_log.csv";
  {
    std::ofstream csv(fs::path(out_dir) / csv_name, std::ios::binary);
    if (!csv) throw std::ios_base::failure("cannot write " + csv_name);
    write_csv(csv, result.records);
  }
  {
    std::ofstream summary(fs::path(out_dir) / (cfg.name + "_summary.json"));
    if (!summary) throw std::ios_base::failure("cannot write summary for " + cfg.name);
    summary << summary_to_json(cfg, result, csv_name).dump(2) << '\n';
  }
  {
    std::ofstream echo(fs::path(out_dir) / (cfg.name + "_config.json"));
    if (!echo) throw std::ios_base::failure("cannot write config echo for " + cfg.name);
    echo << scenario_to_json(cfg).dump(2) << '\n';
  }
  return result;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& parameter,
                                const std::vector<double>& values,
                                const std::string& out_dir) {
  if (values.empty()) fail("values", "empty sweep value list");
  if (parameter != "beta" && parameter != "j_init_scale") {
    fail("param", "expected beta or j_init_scale");
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail("values", "non-finite sweep value");
    if (parameter == "beta" && !(v >= 0.0 && v <= 1.0)) {
      fail("values", "beta values must lie in [0, 1]");
    }
    if (parameter == "j_init_scale" && v == 0.0) fail("values", "scale must be nonzero");
  }

  std::vector<SweepRow> rows(values.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      ScenarioConfig cfg = base;
      char suffix[48];
      std::snprintf(suffix, sizeof(suffix), "%s_%g", parameter.c_str(), values[i]);
      cfg.name = base.name + "_" + suffix;
      if (parameter == "beta") {
        cfg.beta = values[i];
      } else {
        cfg.j_init_mode = "scaled";
        cfg.j_init_scale = values[i];
      }
      rows[i].parameter = parameter;
      rows[i].value = values[i];
      try {
        const ScenarioRunResult r = run_scenario_to_dir(cfg, out_dir);
        rows[i].converged = r.converged;
        rows[i].steps = r.steps;
        rows[i].final_error = r.final_error;
      } catch (const std::exception&) {
        rows[i].failed = true;
      }
    }
  };
  const size_t n_workers =
      std::min<size_t>(values.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string stem = base.name + "_sweep_" + parameter;
  {
    std::ofstream csv(fs::path(out_dir) / (stem + ".csv"), std::ios::binary);
    if (!csv) throw std::ios_base::failure("cannot write sweep table");
    csv << "parameter,value,converged,steps,final_error,failed\n";
    for (const auto& row : rows) {
      csv << row.parameter << ',' << format_double(row.value) << ',' << (row.converged ? 1 : 0)
          << ',' << row.steps << ',' << format_double(row.final_error) << ','
          << (row.failed ? 1 : 0) << '\n';
    }
  }
  {
    json table = json::array();
    for (const auto& row : rows) {
      table.push_back({{"parameter", row.parameter},
                       {"value", row.value},
                       {"converged", row.converged},
                       {"steps", row.steps},
                       {"final_error", row.final_error},
                       {"failed", row.failed}});
    }
    std::ofstream out(fs::path(out_dir) / (stem + ".json"));
    if (!out) throw std::ios_base::failure("cannot write sweep table");
    out << table.dump(2) << '\n';
  }
  return rows;
}

}  // namespace cmservo::scenario
