#pragma once

#include "cmservo/controller.hpp"
#include "cmservo/metrics.hpp"
#include "cmservo/sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cmservo::scenario {

/// Config or input problems that map to CLI exit code 2; `field` names the
/// offending entry.
struct ValidationError : std::runtime_error {
  ValidationError(std::string field_name, const std::string& msg)
      : std::runtime_error(field_name + ": " + msg), field(std::move(field_name)) {}
  std::string field;
};

struct ObjectiveSpec {
  enum class Type { kOverlay, kCurvature };
  Type type = Type::kOverlay;
  std::vector<int> indices;                   // zero-based feature point indices
  std::vector<Eigen::Vector2d> targets_px;    // overlay targets, one per index
  std::optional<Vec> target_theta;            // overlay: derive targets from this pose
  double desired_radius_px = 0.0;             // curvature target (1/kappa_d)
};

struct CameraSpec {
  double focal_px = 500.0;
  Eigen::Vector3d eye_mm{60.0, -130.0, 60.0};
  Eigen::Vector3d target_mm{0.0, 0.0, 20.0};
  Eigen::Vector3d up{0.0, 0.0, 1.0};
  std::optional<Eigen::Matrix<double, 3, 4>> projection_override;
};

struct PrescanSpec {
  int grid = 13;
  double theta_a_min = -1.2, theta_a_max = 1.2;
  double theta_b_min = -1.2, theta_b_max = 1.2;
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string name = "scenario";
  std::uint64_t seed = 0;

  sim::CmModel cm;
  double structural_stiffness = 1.0;
  Vec initial_theta = Vec::Zero(3);
  CameraSpec camera;
  double noise_sigma_px = 0.5;
  std::vector<sim::ObstacleSpec> obstacles;

  double beta = 0.7;
  double epsilon = 1.0;
  int max_steps = 1000;
  double dt = 1.0 / 15.0;
  Vec lambda_theta = Vec::Constant(3, 2.0);
  Vec lambda_features = Vec::Constant(2, 2.0);
  std::string j_init_mode = "ones";  // ones | identity | scaled
  double j_init_scale = 1.0;
  Vec step_lower = Vec::Constant(3, -0.5);
  Vec step_upper = Vec::Constant(3, 0.5);
  Mat inequality_A = Mat(0, 3);
  Vec inequality_b = Vec(0);

  ObjectiveSpec objective;
  PrescanSpec prescan;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario_file(const std::string& path);

/// Builds the hidden plant for a config (target_theta resolution uses the
/// same construction).
sim::SimWorld make_world(const ScenarioConfig& cfg);

/// Resolves overlay pixel targets / desired curvature into a gamma_d vector.
FeedbackFeatureVector resolve_gamma_d(const ScenarioConfig& cfg);

ControllerConfig make_controller_config(const ScenarioConfig& cfg);

/// PlantFeedback adapter over SimWorld that keeps the per-command truth so
/// the runner can merge it into the log afterwards.
class SimPlant final : public PlantFeedback {
 public:
  explicit SimPlant(sim::SimWorld& world) : world_(world), initial_truth_(world.truth()) {}

  void command(const ActuationDelta& delta) override {
    world_.apply_delta(delta);
    truths_.push_back(world_.truth());
  }
  FeaturePointSet observe() override { return world_.measure(); }
  int actuation_dim() const override { return world_.actuation_dim(); }

  const sim::StepTruth& initial_truth() const { return initial_truth_; }
  const std::vector<sim::StepTruth>& truths() const { return truths_; }

 private:
  sim::SimWorld& world_;
  sim::StepTruth initial_truth_;
  std::vector<sim::StepTruth> truths_;
};

struct PrescanResult {
  bool reachable = true;
  double radius_min_px = 0.0;  // curvature objectives only
  double radius_max_px = 0.0;
};

/// Coarse grid over the bending channels maps achievable tip pixels (free
/// kinematics; obstructed scenarios may aim through obstacles on purpose).
/// Overlay targets outside the scanned convex hull are flagged, not rejected.
PrescanResult prescan_objective(const ScenarioConfig& cfg);

struct ScenarioRunResult {
  std::vector<StepRecord> records;  // truth merged in
  bool converged = false;
  int steps = 0;
  double final_error = 0.0;
  double final_ede_px = 0.0;
  Vec final_gamma;
  PhaseSegmentation phases;
  PrescanResult prescan;
};

ScenarioRunResult run_scenario(const ScenarioConfig& cfg);

/// Fixed log schema: step, theta_1..n, theta_eff_1..n, v_1p, v_1q, ...,
/// gamma_1..N, ede_px, ymm, contact, converged; floats at 17 significant
/// digits so reruns are byte-identical.
void write_csv(std::ostream& out, const std::vector<StepRecord>& records);

nlohmann::json summary_to_json(const ScenarioConfig& cfg, const ScenarioRunResult& result,
                               const std::string& csv_name);

/// Runs a scenario file and writes <name>_log.csv, <name>_summary.json and
/// <name>_config.json under out_dir.
ScenarioRunResult run_scenario_to_dir(const ScenarioConfig& cfg, const std::string& out_dir);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  bool converged = false;
  bool failed = false;  // run threw; recorded, does not abort the sweep
  int steps = 0;
  double final_error = 0.0;
};

/// parameter is "beta" or "j_init_scale"; one scenario per value on a small
/// worker pool, per-run outputs plus a comparison table in out_dir.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& parameter,
                                const std::vector<double>& values,
                                const std::string& out_dir);

}  // namespace cmservo::scenario
