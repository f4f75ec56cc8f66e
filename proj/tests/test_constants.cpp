#include "kgwell/constants.hpp"
#include "kgwell/error.hpp"
#include "kgwell/geometry.hpp"
#include "oracle/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace kgwell;

namespace {

struct Problem1D {
  Mesh mesh;
  BoundaryPartition partition;
  DiscreteOperators ops;
  Problem1D(Index elements, double b = 1.0)
      : mesh(build_interval_mesh(0.0, b, elements)),
        partition(classify_boundary(mesh, Point::Zero())),
        ops(assemble_operators(mesh, partition, DampingSpec::multiplier(partition))) {}
};

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(Eigen, FirstEigenvalueUnitInterval) {
  Problem1D p(200);
  const EigenPair e = first_eigenpair(p.ops);
  EXPECT_LT(std::abs(e.value - kPi * kPi / 4.0) / (kPi * kPi / 4.0), 1e-3);
  const Vector r = p.ops.K * e.vector - e.value * (p.ops.M * e.vector);
  EXPECT_LT(r.norm() / (p.ops.M * e.vector).norm(), 1e-10);
}

TEST(Eigen, LengthScaling) {
  Problem1D p(200, 2.0);
  EXPECT_LT(std::abs(first_eigenvalue(p.ops) - kPi * kPi / 16.0) / (kPi * kPi / 16.0), 1e-3);
}

TEST(Eigen, RefinementDecreasesMonotonically) {
  double previous = std::numeric_limits<double>::infinity();
  for (Index n : {4, 8, 16, 32, 64}) {
    const double value = first_eigenvalue(Problem1D(n).ops);
    EXPECT_LT(value, previous);
    EXPECT_GT(value, kPi * kPi / 4.0);
    previous = value;
  }
}

TEST(Eigen, PermutationInvariant) {
  const Mesh mesh = build_rectangle_mesh({0, 0}, {1, 1}, 4, 4);
  auto elements = mesh.elements();
  std::mt19937 gen(1);
  std::shuffle(elements.begin(), elements.end(), gen);
  // Facets refer to elements by index; rebuild them for the shuffled order.
  auto facets = mesh.facets();
  for (auto& f : facets) {
    const auto& owner = mesh.elements()[static_cast<std::size_t>(f.element)];
    f.element = std::find(elements.begin(), elements.end(), owner) - elements.begin();
  }
  const Mesh shuffled(2, mesh.vertices(), elements, facets);
  const auto build = [](const Mesh& m) {
    const BoundaryPartition p = classify_boundary(m, Point(-0.1, -0.1));
    return std::make_pair(p, assemble_operators(m, p, DampingSpec::multiplier(p)));
  };
  const auto [pa, a] = build(mesh);
  const auto [pb, b] = build(shuffled);
  EXPECT_NEAR(first_eigenvalue(a), first_eigenvalue(b), 1e-10);
  EXPECT_NEAR(embedding_constant(mesh, a, 4.0).value, embedding_constant(shuffled, b, 4.0).value, 1e-8);
  EXPECT_NEAR(trace_constant(mesh, pa, a, 2.0).value, trace_constant(shuffled, pb, b, 2.0).value, 1e-8);
}

TEST(Embedding, BelowAnalyticBoundForP4) {
  Problem1D p(100);
  const SupremumResult r = embedding_constant(p.mesh, p.ops, 4.0);
  EXPECT_LE(r.value, std::pow(3.0, -0.25));
  EXPECT_GT(r.value, 0.5);
  // Oracle: random FE functions never beat the computed supremum.
  std::mt19937 gen(2);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    Vector w(p.ops.size());
    for (auto& c : w) c = nd(gen);
    const double q = std::pow(oracle::lp_integral(p.mesh, p.ops.dofs, w, 4.0), 0.25) / std::sqrt(w.dot(p.ops.K * w));
    EXPECT_LE(q, r.value * (1.0 + 1e-9));
  }
  const double at_max = std::pow(oracle::lp_integral(p.mesh, p.ops.dofs, r.maximizer, 4.0), 0.25) /
                        std::sqrt(r.maximizer.dot(p.ops.K * r.maximizer));
  EXPECT_NEAR(at_max, r.value, 1e-9);
}

TEST(Embedding, RayleighIdentityForP2) {
  Problem1D p(60);
  const double lambda1 = first_eigenvalue(p.ops);
  const SupremumResult r = embedding_constant(p.mesh, p.ops, 2.0);
  EXPECT_LE(r.value * r.value * lambda1, 1.0 + 1e-9);
  EXPECT_NEAR(r.value * r.value * lambda1, 1.0, 1e-8);
}

TEST(Embedding, QuotientIsScaleInvariant) {
  Problem1D p(30);
  const Vector w = Vector::LinSpaced(p.ops.size(), 0.1, 2.0);
  const auto quotient = [&](const Vector& x) {
    return lp_norm(p.mesh, p.ops.dofs, x, 4.0) / std::sqrt(x.dot(p.ops.K * x));
  };
  for (double s : {-3.0, 1e-3, 7.5}) EXPECT_NEAR(quotient(s * w), quotient(w), 1e-14);
  const SupremumResult r = embedding_constant(p.mesh, p.ops, 4.0);
  EXPECT_NEAR(std::sqrt(r.maximizer.dot(p.ops.K * r.maximizer)), 1.0, 1e-12);
}

TEST(Trace, UnitIntervalConstants) {
  Problem1D p(50);
  EXPECT_NEAR(trace_constant(p.mesh, p.partition, p.ops, 2.0).value, 1.0, 1e-9);
  EXPECT_NEAR(trace_constant(p.mesh, p.partition, p.ops, 4.0).value, 1.0, 1e-9);
  const Vector w = Vector::LinSpaced(p.ops.size(), 0.3, 1.0);
  for (double s : {-2.0, 0.01}) {
    EXPECT_NEAR(trace_lp_norm(p.mesh, p.partition, p.ops.dofs, s * w, 2.0) / std::sqrt((s * w).dot(p.ops.K * (s * w))),
                trace_lp_norm(p.mesh, p.partition, p.ops.dofs, w, 2.0) / std::sqrt(w.dot(p.ops.K * w)), 1e-14);
  }
}

TEST(WellConstants, RhoOneFromAnalyticC0) {
  const double c0 = std::pow(3.0, -0.25);
  const WellConstants w = well_constants(1.0, 1, c0, c0, 1.0, 1.0, 2.0, 1.0, 1.0);
  EXPECT_NEAR(w.N, 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(w.lambda_star, std::sqrt(3.0), 1e-14);
}

TEST(WellConstants, OneDimensionalDecayConstants) {
  for (double lambda1 : {0.3, 2.4674, 50.0}) {
    const WellConstants w = well_constants(1.0, 1, 0.7, 0.7, 1.0, 1.0, lambda1, 1.0, 1.0);
    EXPECT_EQ(w.P, 8.0);
    EXPECT_EQ(w.D, 2.0);
    EXPECT_EQ(w.tau, 1.0 / 16.0);
  }
}

TEST(WellConstants, TwoDimensionalFormula) {
  const WellConstants w = well_constants(1.0, 2, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(w.P, 12.0);
  EXPECT_DOUBLE_EQ(w.D, 3.0);
  EXPECT_DOUBLE_EQ(w.tau, 1.0 / 24.0);
  // N1 = (c1^4/2)(n + 1/4) + R c2^4/2 + c1^4 (n - 1).
  const double c14 = std::pow(0.5, 4);
  EXPECT_DOUBLE_EQ(w.N1, c14 / 2 * 2.25 + 0.5 + c14);
  EXPECT_DOUBLE_EQ(w.lambda1_star, std::sqrt(1.0 / (4.0 * w.N1)));
}

TEST(WellConstants, LambdaStarDecreasesInN) {
  double previous = std::numeric_limits<double>::infinity();
  for (double c0 : {0.3, 0.5, 0.8, 1.2}) {
    const WellConstants w = well_constants(1.5, 2, c0, c0, 1.0, 1.0, 3.0, 1.5, 1.1);
    EXPECT_LT(w.lambda_star, previous);
    EXPECT_GT(w.tau, 0.0);
    previous = w.lambda_star;
  }
}

TEST(WellFunction, ValuesAndSign) {
  for (double rho : {0.5, 1.0, 2.0}) {
    const double N = 0.3;
    const double ls = std::pow(1.0 / (4.0 * N), 1.0 / (2.0 * rho));
    EXPECT_EQ(well_function(0.0, N, rho), 0.0);
    EXPECT_NEAR(well_function(ls, N, rho), 0.0, 1e-14);
    EXPECT_GT(well_function(0.5 * ls, N, rho), 0.0);
    EXPECT_LT(well_function(1.5 * ls, N, rho), 0.0);
  }
  const double N = 0.2, ls = std::sqrt(1.0 / (4.0 * N));
  EXPECT_NEAR(well_function(ls / 2.0, N, 1.0), 3.0 * ls * ls / 64.0, 1e-15);
  EXPECT_THROW(well_function(-1.0, N, 1.0), InvalidInput);
}

TEST(Admissibility, Examples) {
  Problem1D p(40);
  const EigenPair e = first_eigenpair(p.ops);
  const WellConstants w = well_constants(1.0, 1, 0.7, 0.7, 1.0, 1.0, e.value, 1.0, 1.0);
  const Vector zero = Vector::Zero(p.ops.size());

  const AdmissibilityReport z = admissibility(zero, zero, zero, zero, w, p.ops);
  EXPECT_EQ(z.L, 0.0);
  EXPECT_TRUE(z.admissible);

  const AdmissibilityReport edge = admissibility(w.lambda_star * e.vector, zero, zero, zero, w, p.ops);
  EXPECT_FALSE(edge.norms_below_lambda_star);
  EXPECT_FALSE(edge.admissible);

  const Vector small = (w.lambda_star / 10.0) * e.vector;
  const AdmissibilityReport a = admissibility(small, small, zero, zero, w, p.ops);
  const double ls2 = w.lambda_star * w.lambda_star;
  EXPECT_NEAR(a.L, ls2 * (1.0 / 100.0 + 1.0 / 20000.0), 1e-14);
  EXPECT_TRUE(a.admissible);
  EXPECT_EQ(a.admissible, a.norms_below_lambda_star && a.L_below_quarter_lambda_star_sq);
}

TEST(Validator, Table) {
  EXPECT_TRUE(validate_hypotheses(1.0, 3, std::nullopt).valid());
  EXPECT_TRUE(validate_hypotheses(1.0, 3, std::nullopt).decay_applicable());
  EXPECT_TRUE(validate_hypotheses(2.0 / 5.0, 7, 7.0 / 5.0).valid());
  EXPECT_FALSE(validate_hypotheses(1.0, 7, std::nullopt).valid());
  EXPECT_TRUE(validate_hypotheses(0.1, 2, 3.0).valid());
  EXPECT_FALSE(validate_hypotheses(0.1, 2, 1.0).valid());
  EXPECT_FALSE(validate_hypotheses(0.1, 4, std::nullopt).valid());
  EXPECT_FALSE(validate_hypotheses(1.0, 12, std::nullopt).valid());
  EXPECT_FALSE(validate_hypotheses(-1.0, 1, std::nullopt).valid());
}

TEST(Validator, ModerateDimensionBounds) {
  for (int n = 3; n <= 6; ++n) {
    const double lo = (n + 2.0) / (8.0 * n), hi = (n + 2.0) / (4.0 * (n - 2.0));
    EXPECT_TRUE(validate_hypotheses(lo, n, std::nullopt).valid());
    EXPECT_TRUE(validate_hypotheses(hi, n, std::nullopt).valid());
    EXPECT_FALSE(validate_hypotheses(lo * 0.99, n, std::nullopt).valid());
    EXPECT_FALSE(validate_hypotheses(hi * 1.01, n, std::nullopt).valid());
  }
}

TEST(Eigen, SingularOperatorsRejected) {
  Problem1D p(4);
  DiscreteOperators broken = p.ops;
  broken.M = SparseMatrix(p.ops.size(), p.ops.size());
  EXPECT_THROW(first_eigenpair(broken), NumericalSetupError);
}

TEST(Eigen, FineMeshConverges) {
  Problem1D p(4000);
  const EigenPair e = first_eigenpair(p.ops);
  EXPECT_LT(std::abs(e.value - kPi * kPi / 4.0) / (kPi * kPi / 4.0), 1e-6);
  EXPECT_LT(e.residual, 1e-6);  // rounding floor is about 1e-7 at h = 1/4000
}
