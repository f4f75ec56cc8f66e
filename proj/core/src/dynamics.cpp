#include "kgwell/dynamics.hpp"

#include "kgwell/error.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace kgwell {

namespace {

double m_norm_sq(const SparseMatrix& m, const Vector& x) { return x.dot(m * x); }

void append_block(std::vector<Eigen::Triplet<double>>& t, const SparseMatrix& m, Index row0, Index col0,
                  double scale) {
  for (Index c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
    }
  }
}

}  // namespace

SimState SimState::zero(Index n) {
  SimState s;
  s.u = Vector::Zero(n);
  s.v = Vector::Zero(n);
  s.du = Vector::Zero(n);
  s.dv = Vector::Zero(n);
  return s;
}

void SimState::validate(Index n) const {
  if (u.size() != n || v.size() != n || du.size() != n || dv.size() != n) {
    throw InvalidInput("state vectors do not match the operator dimension");
  }
  if (!std::isfinite(t) || !u.allFinite() || !v.allFinite() || !du.allFinite() || !dv.allFinite()) {
    throw InvalidInput("state contains non-finite entries");
  }
}

MidpointStepper::MidpointStepper(const Mesh& mesh, const DiscreteOperators& operators, CouplingSpec coupling,
                                 double dt, StepOptions options)
    : mesh_(&mesh),
      ops_(&operators),
      coupling_(mesh, operators.dofs, coupling),
      dt_(dt),
      options_(options),
      solver_(std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>()) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive");
  if (options_.max_iter < 1) throw InvalidInput("max_iter must be at least 1");
  if (options_.newton && coupling.rho < 1.0) options_.newton = false;
  system_ = (2.0 / dt) * operators.M + (0.5 * dt) * operators.K + operators.B;
  solver_->compute(system_);
  if (solver_->info() != Eigen::Success) throw NumericalSetupError("midpoint system matrix factorization failed");
}

MidpointStepper::~MidpointStepper() = default;

bool MidpointStepper::newton_converge(const SimState& s, const Vector& rhs_u, const Vector& rhs_v, Vector& a,
                                      Vector& b, int& iterations) const {
  const Index n = ops_->size();
  const double h = 0.5 * dt_;
  Eigen::SparseLU<SparseMatrix> lu;
  for (; iterations < options_.max_iter; ++iterations) {
    const Vector um = s.u + h * a;
    const Vector vm = s.v + h * b;
    const auto [fu, fv] = coupling_.vectors(um, vm);
    Vector residual(2 * n);
    residual.head(n) = system_ * a - rhs_u + fu;
    residual.tail(n) = system_ * b - rhs_v + fv;

    const auto jac = coupling_.jacobian(um, vm);
    std::vector<Eigen::Triplet<double>> t;
    append_block(t, system_, 0, 0, 1.0);
    append_block(t, system_, n, n, 1.0);
    append_block(t, jac.uu, 0, 0, h);
    append_block(t, jac.uv, 0, n, h);
    append_block(t, jac.vu, n, 0, h);
    append_block(t, jac.vv, n, n, h);
    SparseMatrix j(2 * n, 2 * n);
    j.setFromTriplets(t.begin(), t.end());
    lu.compute(j);
    if (lu.info() != Eigen::Success) return false;
    const Vector delta = lu.solve(residual);
    if (!delta.allFinite()) return false;
    a -= delta.head(n);
    b -= delta.tail(n);
    const double inc = std::sqrt(m_norm_sq(ops_->M, delta.head(n)) + m_norm_sq(ops_->M, delta.tail(n)));
    const double scale = std::sqrt(m_norm_sq(ops_->M, a) + m_norm_sq(ops_->M, b));
    if (inc <= options_.tol * scale) {
      ++iterations;
      return true;
    }
  }
  return false;
}

StepResult MidpointStepper::advance(const SimState& s) const {
  const Index n = ops_->size();
  s.validate(n);
  const DiscreteOperators& ops = *ops_;
  const double h = 0.5 * dt_;
  const Vector rhs_u = (2.0 / dt_) * (ops.M * s.du) - ops.K * s.u;
  const Vector rhs_v = (2.0 / dt_) * (ops.M * s.dv) - ops.K * s.v;

  Vector a, b;
  int iterations = 0;
  if (!options_.coupling) {
    a = solver_->solve(rhs_u);
    b = solver_->solve(rhs_v);
    iterations = 1;
  } else if (options_.newton) {
    a = s.du;
    b = s.dv;
    if (!newton_converge(s, rhs_u, rhs_v, a, b, iterations)) {
      throw NonlinearSolveFailure("Newton iteration of the midpoint step failed to converge at t = " +
                                      std::to_string(s.t) + "; reduce dt",
                                  s.t);
    }
  } else {
    a = s.du;
    b = s.dv;
    bool converged = false;
    for (; iterations < options_.max_iter; ++iterations) {
      const auto [fu, fv] = coupling_.vectors(s.u + h * a, s.v + h * b);
      Vector a_new = solver_->solve(rhs_u - fu);
      Vector b_new = solver_->solve(rhs_v - fv);
      if (!a_new.allFinite() || !b_new.allFinite()) break;
      const double inc = std::sqrt(m_norm_sq(ops.M, a_new - a) + m_norm_sq(ops.M, b_new - b));
      const double scale = std::sqrt(m_norm_sq(ops.M, a_new) + m_norm_sq(ops.M, b_new));
      a = std::move(a_new);
      b = std::move(b_new);
      if (!std::isfinite(inc)) break;
      if (inc <= options_.tol * scale) {
        converged = true;
        ++iterations;
        break;
      }
    }
    if (!converged) {
      throw NonlinearSolveFailure("fixed-point iteration of the midpoint step failed to converge at t = " +
                                      std::to_string(s.t) + "; reduce dt",
                                  s.t);
    }
  }

  StepResult out;
  out.iterations = iterations;
  out.state.t = s.t + dt_;
  out.state.u = s.u + dt_ * a;
  out.state.v = s.v + dt_ * b;
  out.state.du = 2.0 * a - s.du;
  out.state.dv = 2.0 * b - s.dv;
  out.dissipation = dt_ * (m_norm_sq(ops.B, a) + m_norm_sq(ops.B, b));
  out.trace_dissipation = dt_ * (m_norm_sq(ops.T, a) + m_norm_sq(ops.T, b));
  return out;
}

SimState step(const SimState& state, double dt, const Mesh& mesh, const DiscreteOperators& operators,
              const CouplingSpec& spec, const StepOptions& options) {
  return MidpointStepper(mesh, operators, spec, dt, options).advance(state).state;
}

}  // namespace kgwell
