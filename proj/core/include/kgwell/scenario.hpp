#pragma once

#include "kgwell/assembly.hpp"
#include "kgwell/config.hpp"
#include "kgwell/constants.hpp"
#include "kgwell/diagnostics.hpp"
#include "kgwell/dynamics.hpp"
#include "kgwell/geometry.hpp"
#include "kgwell/mesh.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace kgwell {

enum class MeshKind { Interval, Rectangle, File };

struct MeshConfig {
  MeshKind kind = MeshKind::Interval;
  double a = 0.0, b = 1.0;
  Index elements = 50;
  Point lo = Point(0.0, 0.0), hi = Point(1.0, 1.0);
  Index nx = 8, ny = 8;
  std::string file;
};

enum class DampingKind { Multiplier, Constant };

/// Closed-form initial field. Displacements are normalized to unit V-norm,
/// velocities to unit L2 norm, then multiplied by the amplitude (times
/// lambda* when `lambda_star_units`).
struct FieldConfig {
  std::string preset = "zero";  // zero | eigenfunction | bump | polynomial | file
  double amplitude = 0.0;
  bool lambda_star_units = false;
  std::vector<double> center;  // bump centre, defaults to the domain centre
  double width = 0.25;         // bump radius
  int degree = 2;              // polynomial: sum_i (x_i - x0_i)^degree
  std::string file;            // one nodal value per mesh vertex
};

struct ScenarioConfig {
  std::string name = "scenario";
  MeshConfig mesh;
  Point x0 = Point::Zero();
  double rho = 1.0;
  std::optional<double> theta;
  DampingKind damping = DampingKind::Multiplier;
  double damping_value = 1.0;
  bool damping_enabled = true;  // off: B = 0 (undamped fixture)
  bool coupling = true;
  int quadrature_order = 0;  // 0: CouplingSpec::default_order(rho)
  FieldConfig u0, v0, u1, v1;
  std::optional<double> dt;  // default min(h/2, 0.01)
  double t_end = 10.0;
  int stride = 10;
  StepOptions solver;
  double safety_factor = 1.1;
  WellSet admissibility_set = WellSet::General;
  double bound_tolerance = 1.0;
  double dissipation_slack_factor = 10.0;  // slack = factor * dt * E(0)

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Builds a scenario from parsed key/value pairs. Requires `mesh.kind`.
ScenarioConfig scenario_from_config(const KeyValueConfig& config);

/// Discrete best constants before and after the safety factor.
struct ConstantsBundle {
  double c0_raw = 0.0, c1_raw = 0.0, c2_raw = 0.0, c3_raw = 0.0;
  double safety_factor = 1.0;
  EigenPair eigen;
  WellConstants well;
};

/// Mesh, boundary partition and operators of a scenario. Held behind a
/// unique_ptr so references into it stay valid.
struct Problem {
  Mesh mesh;
  BoundaryPartition partition;
  DiscreteOperators operators;
  CouplingSpec coupling;
};

std::unique_ptr<Problem> build_problem(const ScenarioConfig& config);

ConstantsBundle compute_constants(const Problem& problem, double safety_factor);

struct InitialData {
  SimState state;
  double boundary_mismatch = 0.0;  // largest |value| dropped at Gamma0 vertices
  double compatibility_residual = 0.0;  // |(K u0 + B u1)| on Gamma1 vertices, u and v combined
};

InitialData build_initial_data(const ScenarioConfig& config, const Problem& problem, const ConstantsBundle& constants);

double default_time_step(const Mesh& mesh);

struct SimulationResult {
  std::unique_ptr<Problem> problem;
  ConstantsBundle constants;
  InitialData initial;
  AdmissibilityReport admissibility;      // the configured set
  AdmissibilityReport admissibility_rho1; // rho = 1 set, for reference
  double dt = 0.0;
  Trajectory trajectory;
};

/// Samples the trajectory every `stride` steps plus the final time.
/// `on_sample` (optional) sees each sample as it is emitted. A null
/// `coupling` drops the coupling term from the sampled energies.
Trajectory integrate(const SimState& initial, const MidpointStepper& stepper, double t_end, int stride,
                     const DiscreteOperators& operators, const CouplingEvaluator* coupling,
                     const WellConstants& constants,
                     const std::function<void(const TrajectorySample&)>& on_sample = {});

/// Everything up to time integration: problem, constants, initial data,
/// admissibility and dt. The trajectory is left empty.
SimulationResult prepare(const ScenarioConfig& config);

/// Integrates a prepared result in place.
void run_integration(SimulationResult& result, const ScenarioConfig& config,
                     const std::function<void(const TrajectorySample&)>& on_sample = {});

/// prepare + run_integration. Step failures propagate as NonlinearSolveFailure.
SimulationResult simulate(const ScenarioConfig& config);

}  // namespace kgwell
