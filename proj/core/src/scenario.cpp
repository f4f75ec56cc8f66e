#include "kgwell/scenario.hpp"

#include "kgwell/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace kgwell {

namespace {

Point read_point(const KeyValueConfig& cfg, const std::string& key, const Point& fallback, int dim) {
  const auto v = cfg.get_doubles(key, {});
  if (v.empty()) return fallback;
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError("key '" + key + "': expected " + std::to_string(dim) + " coordinate(s)");
  }
  Point p = Point::Zero();
  for (int i = 0; i < dim; ++i) p[i] = v[static_cast<std::size_t>(i)];
  return p;
}

FieldConfig read_field(const KeyValueConfig& cfg, const std::string& prefix) {
  FieldConfig f;
  f.preset = cfg.get_string(prefix + ".preset", "zero");
  f.amplitude = cfg.get_double(prefix + ".amplitude", f.preset == "zero" ? 0.0 : 1.0);
  const std::string units = cfg.get_string(prefix + ".units", "absolute");
  if (units == "lambda_star") {
    f.lambda_star_units = true;
  } else if (units != "absolute") {
    throw ConfigError("key '" + prefix + ".units': expected 'absolute' or 'lambda_star'");
  }
  f.center = cfg.get_doubles(prefix + ".center", {});
  f.width = cfg.get_double(prefix + ".width", f.width);
  f.degree = static_cast<int>(cfg.get_int(prefix + ".degree", f.degree));
  f.file = cfg.get_string(prefix + ".file", "");
  static const char* presets[] = {"zero", "eigenfunction", "bump", "polynomial", "file"};
  if (std::none_of(std::begin(presets), std::end(presets), [&](const char* p) { return f.preset == p; })) {
    throw ConfigError("key '" + prefix + ".preset': unknown preset '" + f.preset + "'");
  }
  if (f.preset == "file" && f.file.empty()) throw ConfigError("missing required key '" + prefix + ".file'");
  return f;
}

Vector nodal_values(const FieldConfig& f, const ScenarioConfig& sc, const Mesh& mesh) {
  const Index nn = mesh.vertex_count();
  Vector out = Vector::Zero(nn);
  if (f.preset == "bump") {
    Point c = Point::Zero();
    for (const auto& v : mesh.vertices()) c += v;
    c /= static_cast<double>(nn);
    for (std::size_t i = 0; i < f.center.size() && i < 2; ++i) c[static_cast<int>(i)] = f.center[i];
    for (Index i = 0; i < nn; ++i) {
      const double r = (mesh.vertex(i) - c).norm() / f.width;
      if (r < 1.0) {
        const double s = std::cos(0.5 * std::numbers::pi * r);
        out[i] = s * s;
      }
    }
  } else if (f.preset == "polynomial") {
    for (Index i = 0; i < nn; ++i) {
      const Point m = multiplier_field(mesh.vertex(i), sc.x0);
      double s = 0.0;
      for (int d = 0; d < mesh.dimension(); ++d) s += std::pow(m[d], f.degree);
      out[i] = s;
    }
  } else if (f.preset == "file") {
    std::ifstream in(f.file);
    if (!in) throw ConfigError("cannot open coefficient file '" + f.file + "'");
    for (Index i = 0; i < nn; ++i) {
      if (!(in >> out[i])) throw ConfigError("coefficient file '" + f.file + "' has fewer than " + std::to_string(nn) + " values");
    }
  }
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("model.rho must be positive");
  if (dt && !(*dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (!(t_end > 0.0)) throw ConfigError("time.t_end must be positive");
  if (dt && t_end < *dt) throw ConfigError("time.t_end must be at least time.dt");
  if (stride < 1) throw ConfigError("time.stride must be at least 1");
  if (damping == DampingKind::Constant && !(damping_value > 0.0)) {
    throw ConfigError("damping.value must be positive (it is also the floor delta0)");
  }
  if (!(safety_factor >= 1.0)) throw ConfigError("constants.safety_factor must be >= 1");
  if (!(solver.tol > 0.0) || solver.max_iter < 1) throw ConfigError("solver.tol and solver.max_iter must be positive");
  if (quadrature_order != 0 && quadrature_order < static_cast<int>(std::ceil(2.0 * rho + 2.0))) {
    throw ConfigError("quadrature.order must be at least ceil(2 rho + 2)");
  }
  if (mesh.kind == MeshKind::Interval && (!(mesh.a < mesh.b) || mesh.elements < 1)) {
    throw ConfigError("interval mesh needs mesh.a < mesh.b and mesh.elements >= 1");
  }
  if (mesh.kind == MeshKind::Rectangle &&
      (!(mesh.lo[0] < mesh.hi[0] && mesh.lo[1] < mesh.hi[1]) || mesh.nx < 1 || mesh.ny < 1)) {
    throw ConfigError("rectangle mesh needs mesh.lo < mesh.hi and mesh.nx, mesh.ny >= 1");
  }
}

ScenarioConfig scenario_from_config(const KeyValueConfig& cfg) {
  ScenarioConfig sc;
  sc.name = cfg.get_string("name", sc.name);

  const std::string kind = cfg.require("mesh.kind");
  int dim = 1;
  if (kind == "interval") {
    sc.mesh.kind = MeshKind::Interval;
    sc.mesh.a = cfg.get_double("mesh.a", 0.0);
    sc.mesh.b = cfg.get_double("mesh.b", 1.0);
    sc.mesh.elements = cfg.get_int("mesh.elements", 50);
  } else if (kind == "rectangle") {
    dim = 2;
    sc.mesh.kind = MeshKind::Rectangle;
    sc.mesh.lo = read_point(cfg, "mesh.lo", Point(0, 0), 2);
    sc.mesh.hi = read_point(cfg, "mesh.hi", Point(1, 1), 2);
    sc.mesh.nx = cfg.get_int("mesh.nx", 8);
    sc.mesh.ny = cfg.get_int("mesh.ny", sc.mesh.nx);
  } else if (kind == "file") {
    sc.mesh.kind = MeshKind::File;
    sc.mesh.file = cfg.require("mesh.file");
    dim = static_cast<int>(cfg.get_int("mesh.dimension", 0));
    if (dim == 0) {
      std::ifstream in(sc.mesh.file);
      if (!in) throw ConfigError("cannot open mesh file '" + sc.mesh.file + "'");
      dim = read_mesh(in).mesh.dimension();
    }
  } else {
    throw ConfigError("key 'mesh.kind': expected interval, rectangle or file");
  }

  sc.x0 = read_point(cfg, "geometry.x0", Point::Zero(), dim);
  sc.rho = cfg.get_double("model.rho", 1.0);
  if (cfg.has("model.theta")) sc.theta = cfg.require_double("model.theta");
  sc.coupling = cfg.get_bool("model.coupling", true);

  const std::string damping = cfg.get_string("damping.kind", "multiplier");
  if (damping == "multiplier") {
    sc.damping = DampingKind::Multiplier;
  } else if (damping == "constant") {
    sc.damping = DampingKind::Constant;
    sc.damping_value = cfg.require_double("damping.value");
  } else {
    throw ConfigError("key 'damping.kind': expected multiplier or constant");
  }
  sc.damping_enabled = cfg.get_bool("damping.enabled", true);

  sc.quadrature_order = static_cast<int>(cfg.get_int("quadrature.order", 0));
  sc.u0 = read_field(cfg, "initial.u");
  sc.v0 = read_field(cfg, "initial.v");
  sc.u1 = read_field(cfg, "initial.du");
  sc.v1 = read_field(cfg, "initial.dv");

  if (cfg.has("time.dt")) sc.dt = cfg.require_double("time.dt");
  sc.t_end = cfg.get_double("time.t_end", sc.t_end);
  sc.stride = static_cast<int>(cfg.get_int("time.stride", sc.stride));

  sc.solver.tol = cfg.get_double("solver.tol", sc.solver.tol);
  sc.solver.max_iter = static_cast<int>(cfg.get_int("solver.max_iter", sc.solver.max_iter));
  sc.solver.newton = cfg.get_bool("solver.newton", false);
  sc.solver.coupling = sc.coupling;

  sc.safety_factor = cfg.get_double("constants.safety_factor", sc.safety_factor);
  const std::string set = cfg.get_string("constants.set", "general");
  if (set == "general") {
    sc.admissibility_set = WellSet::General;
  } else if (set == "rho_one") {
    sc.admissibility_set = WellSet::RhoOne;
  } else {
    throw ConfigError("key 'constants.set': expected general or rho_one");
  }
  sc.bound_tolerance = cfg.get_double("checks.bound_tolerance", sc.bound_tolerance);
  sc.dissipation_slack_factor = cfg.get_double("checks.dissipation_slack_factor", sc.dissipation_slack_factor);
  sc.validate();
  return sc;
}

std::unique_ptr<Problem> build_problem(const ScenarioConfig& config) {
  config.validate();
  Mesh mesh = [&] {
    switch (config.mesh.kind) {
      case MeshKind::Interval: return build_interval_mesh(config.mesh.a, config.mesh.b, config.mesh.elements);
      case MeshKind::Rectangle: return build_rectangle_mesh(config.mesh.lo, config.mesh.hi, config.mesh.nx, config.mesh.ny);
      case MeshKind::File: break;
    }
    std::ifstream in(config.mesh.file);
    if (!in) throw ConfigError("cannot open mesh file '" + config.mesh.file + "'");
    return read_mesh(in).mesh;
  }();
  mesh.validate();
  BoundaryPartition partition = classify_boundary(mesh, config.x0);
  const DampingSpec damping = config.damping == DampingKind::Multiplier ? DampingSpec::multiplier(partition)
                                                                       : DampingSpec::constant(config.damping_value);
  DiscreteOperators ops = assemble_operators(mesh, partition, damping);
  if (!config.damping_enabled) ops.B = SparseMatrix(ops.size(), ops.size());
  CouplingSpec coupling{config.rho, config.quadrature_order > 0 ? config.quadrature_order
                                                                : CouplingSpec::default_order(config.rho)};
  coupling.validate();
  return std::make_unique<Problem>(Problem{std::move(mesh), std::move(partition), std::move(ops), coupling});
}

ConstantsBundle compute_constants(const Problem& problem, double safety_factor) {
  ConstantsBundle b;
  b.safety_factor = safety_factor;
  b.eigen = first_eigenpair(problem.operators);
  const double rho = problem.coupling.rho;
  b.c0_raw = embedding_constant(problem.mesh, problem.operators, 2.0 * (rho + 1.0)).value;
  b.c1_raw = rho == 1.0 ? b.c0_raw : embedding_constant(problem.mesh, problem.operators, 4.0).value;
  b.c2_raw = trace_constant(problem.mesh, problem.partition, problem.operators, 4.0).value;
  b.c3_raw = trace_constant(problem.mesh, problem.partition, problem.operators, 2.0).value;
  b.well = well_constants(rho, problem.mesh.dimension(), safety_factor * b.c0_raw, safety_factor * b.c1_raw,
                          safety_factor * b.c2_raw, safety_factor * b.c3_raw, b.eigen.value, problem.partition.R,
                          problem.partition.m0);
  return b;
}

InitialData build_initial_data(const ScenarioConfig& config, const Problem& problem, const ConstantsBundle& constants) {
  const auto& ops = problem.operators;
  const auto& dofs = ops.dofs;
  InitialData out;
  out.state = SimState::zero(ops.size());

  const auto make = [&](const FieldConfig& f, bool velocity) -> Vector {
    if (f.preset == "zero" || f.amplitude == 0.0) return Vector::Zero(ops.size());
    Vector free;
    double dropped = 0.0;
    if (f.preset == "eigenfunction") {
      free = constants.eigen.vector;
    } else {
      const Vector nodal = nodal_values(f, config, problem.mesh);
      free = dofs.restrict(nodal);
      for (Index i = 0; i < dofs.node_count(); ++i) {
        if (dofs.free_of_node[static_cast<std::size_t>(i)] < 0) dropped = std::max(dropped, std::abs(nodal[i]));
      }
    }
    const double norm = std::sqrt(free.dot((velocity ? ops.M : ops.K) * free));
    if (!(norm > 0.0)) throw ConfigError("initial field preset '" + f.preset + "' vanishes on the free dofs");
    const double scale = f.amplitude * (f.lambda_star_units ? constants.well.lambda_star : 1.0) / norm;
    out.boundary_mismatch = std::max(out.boundary_mismatch, std::abs(scale) * dropped);
    return scale * free;
  };
  out.state.u = make(config.u0, false);
  out.state.v = make(config.v0, false);
  out.state.du = make(config.u1, true);
  out.state.dv = make(config.v1, true);

  std::vector<bool> on_gamma1(static_cast<std::size_t>(ops.size()), false);
  for (std::size_t fi = 0; fi < problem.mesh.facets().size(); ++fi) {
    if (!problem.partition.is_gamma1(fi)) continue;
    const auto& f = problem.mesh.facets()[fi];
    for (int k = 0; k < f.vertex_count(); ++k) {
      const Index d = dofs.free_of_node[static_cast<std::size_t>(f.vertices[static_cast<std::size_t>(k)])];
      if (d >= 0) on_gamma1[static_cast<std::size_t>(d)] = true;
    }
  }
  const Vector ru = ops.K * out.state.u + ops.B * out.state.du;
  const Vector rv = ops.K * out.state.v + ops.B * out.state.dv;
  double sq = 0.0;
  for (Index i = 0; i < ops.size(); ++i) {
    if (on_gamma1[static_cast<std::size_t>(i)]) sq += ru[i] * ru[i] + rv[i] * rv[i];
  }
  out.compatibility_residual = std::sqrt(sq);
  return out;
}

double default_time_step(const Mesh& mesh) { return std::min(0.5 * mesh.min_element_diameter(), 0.01); }

Trajectory integrate(const SimState& initial, const MidpointStepper& stepper, double t_end, int stride,
                     const DiscreteOperators& operators, const CouplingEvaluator* coupling,
                     const WellConstants& constants, const std::function<void(const TrajectorySample&)>& on_sample) {
  if (stride < 1) throw InvalidInput("stride must be at least 1");
  const double dt = stepper.dt();
  const auto steps = std::max<long>(1, static_cast<long>(std::ceil(t_end / dt - 1e-9)));
  Trajectory traj;
  SimState s = initial;
  s.t = 0.0;
  double dissipated = 0.0;
  double trace = 0.0;
  const auto emit = [&] {
    TrajectorySample sample{s, full_sample(s, operators, coupling, constants)};
    sample.energy.dissipated = dissipated;
    sample.energy.trace_dissipated = trace;
    if (on_sample) on_sample(sample);
    traj.samples.push_back(std::move(sample));
  };
  emit();
  for (long k = 1; k <= steps; ++k) {
    StepResult r = stepper.advance(s);
    s = std::move(r.state);
    s.t = static_cast<double>(k) * dt;
    dissipated += r.dissipation;
    trace += r.trace_dissipation;
    if (k % stride == 0 || k == steps) emit();
  }
  return traj;
}

SimulationResult prepare(const ScenarioConfig& config) {
  SimulationResult out;
  out.problem = build_problem(config);
  const Problem& p = *out.problem;
  out.constants = compute_constants(p, config.safety_factor);
  out.initial = build_initial_data(config, p, out.constants);
  const SimState& s0 = out.initial.state;
  out.admissibility = admissibility(s0.u, s0.v, s0.du, s0.dv, out.constants.well, p.operators, config.admissibility_set);
  out.admissibility_rho1 = admissibility(s0.u, s0.v, s0.du, s0.dv, out.constants.well, p.operators, WellSet::RhoOne);
  out.dt = config.dt.value_or(default_time_step(p.mesh));
  return out;
}

void run_integration(SimulationResult& result, const ScenarioConfig& config,
                     const std::function<void(const TrajectorySample&)>& on_sample) {
  const Problem& p = *result.problem;
  StepOptions opts = config.solver;
  opts.coupling = config.coupling;
  const MidpointStepper stepper(p.mesh, p.operators, p.coupling, result.dt, opts);
  const CouplingEvaluator coupling(p.mesh, p.operators.dofs, p.coupling);
  result.trajectory = integrate(result.initial.state, stepper, config.t_end, config.stride, p.operators,
                                config.coupling ? &coupling : nullptr, result.constants.well, on_sample);
}

SimulationResult simulate(const ScenarioConfig& config) {
  SimulationResult out = prepare(config);
  run_integration(out, config);
  return out;
}

}  // namespace kgwell
