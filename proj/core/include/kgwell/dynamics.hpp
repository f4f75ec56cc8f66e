#pragma once

#include "kgwell/assembly.hpp"
#include "kgwell/mesh.hpp"

#include <Eigen/SparseCholesky>

#include <memory>

namespace kgwell {

/// Coefficients of (u, v, u', v') over the free dofs at time t.
struct SimState {
  double t = 0.0;
  Vector u, v, du, dv;

  static SimState zero(Index n);
  /// Throws InvalidInput on a size mismatch or a non-finite entry.
  void validate(Index n) const;
};

struct StepOptions {
  double tol = 1e-10;  // on the preconditioned nonlinear residual, M-norm, relative
  int max_iter = 50;
  bool newton = false;  // needs rho >= 1; fixed-point iteration otherwise
  bool coupling = true;
};

struct StepResult {
  SimState state;
  /// dt * (a.B a + b.B b) with a, b the midpoint velocities: the energy
  /// removed through Gamma1 by this step.
  double dissipation = 0.0;
  /// Same with the plain Gamma1 mass T.
  double trace_dissipation = 0.0;
  int iterations = 0;
};

/// Implicit midpoint rule for
///   M u'' + B u' + K u + F_u(u, v) = 0,  M v'' + B v' + K v + F_v(u, v) = 0
/// written in first-order form. With a = (u'_n + u'_{n+1}) / 2 the step
/// solves
///   (2/dt M + dt/2 K + B) a = 2/dt M u'_n - K u_n - F_u(u_n + dt/2 a, v_n + dt/2 b)
/// (and the v counterpart), then sets u_{n+1} = u_n + dt a, u'_{n+1} = 2a - u'_n.
///
/// The stepper references the mesh and operators; both must outlive it.
class MidpointStepper {
 public:
  MidpointStepper(const Mesh& mesh, const DiscreteOperators& operators, CouplingSpec coupling, double dt,
                  StepOptions options = {});
  ~MidpointStepper();
  MidpointStepper(const MidpointStepper&) = delete;
  MidpointStepper& operator=(const MidpointStepper&) = delete;

  double dt() const { return dt_; }
  const StepOptions& options() const { return options_; }

  /// Throws NonlinearSolveFailure (carrying state.t) when the inner solve
  /// does not converge within options.max_iter iterations.
  StepResult advance(const SimState& state) const;

 private:
  bool newton_converge(const SimState& s, const Vector& rhs_u, const Vector& rhs_v, Vector& a, Vector& b,
                       int& iterations) const;

  const Mesh* mesh_;
  const DiscreteOperators* ops_;
  CouplingEvaluator coupling_;
  double dt_;
  StepOptions options_;
  SparseMatrix system_;  // 2/dt M + dt/2 K + B
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> solver_;
};

/// One step without reusing a factorization.
SimState step(const SimState& state, double dt, const Mesh& mesh, const DiscreteOperators& operators,
              const CouplingSpec& spec, const StepOptions& options = {});

}  // namespace kgwell
