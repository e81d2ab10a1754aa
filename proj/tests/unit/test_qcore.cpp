#include <gtest/gtest.h>

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "nlact/errors.hpp"
#include "nlact/qcore.hpp"
#include "nlact/states.hpp"
#include "oracles.hpp"

using namespace nlact;
using qcore::ComplexMatrix;
using qcore::DensityMatrix;

namespace {

ComplexMatrix random_matrix(int r, int c, PhiloxEngine& rng) {
  ComplexMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.complex_normal();
  return m;
}

}  // namespace

TEST(Qcore, TotalDimLimits) {
  EXPECT_EQ(qcore::total_dim(std::vector<int>{2, 3, 4}), 24u);
  EXPECT_THROW(qcore::total_dim(std::vector<int>{}), ArgumentError);
  EXPECT_THROW(qcore::total_dim(std::vector<int>{2, 0}), ArgumentError);
  EXPECT_THROW(qcore::total_dim(std::vector<int>{64, 65}), SizeError);
  EXPECT_EQ(qcore::total_dim(std::vector<int>{64, 64}), 4096u);
}

TEST(Qcore, DensityMatrixValidation) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2) * 0.5;
  EXPECT_NO_THROW(DensityMatrix({2}, m));
  ComplexMatrix bad_trace = ComplexMatrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix({2}, bad_trace), ValidationError);
  ComplexMatrix non_herm = m;
  non_herm(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix({2}, non_herm), ValidationError);
  ComplexMatrix negative(2, 2);
  negative << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityMatrix({2}, negative), ValidationError);
  EXPECT_THROW(DensityMatrix({3}, m), ArgumentError);
}

TEST(Qcore, SanitizedClipsTinyNegativity) {
  ComplexMatrix m(2, 2);
  m << 1.0 + 1e-11, 0, 0, -1e-11;
  const auto rho = DensityMatrix::sanitized({2}, m);
  EXPECT_NEAR(rho.matrix()(1, 1).real(), 0.0, 1e-15);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-15);
  ComplexMatrix bad(2, 2);
  bad << 1.1, 0, 0, -0.1;
  EXPECT_THROW(DensityMatrix::sanitized({2}, bad), ValidationError);
}

TEST(Qcore, PureStateNorm) {
  qcore::ComplexVector v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(qcore::PureState({2}, v), ValidationError);
  const auto psi = qcore::PureState::normalized({2}, v);
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_THROW(qcore::PureState::normalized({2}, qcore::ComplexVector::Zero(2)), ValidationError);
}

TEST(Qcore, EigvalshMatchesJacobiOracle) {
  PhiloxEngine rng({11, 0});
  for (int n : {2, 3, 4, 6, 9}) {
    const ComplexMatrix g = random_matrix(n, n, rng);
    const ComplexMatrix h = g + g.adjoint();
    const auto ours = qcore::eigvalsh(h);
    const auto ref = oracle::jacobi_eigenvalues(h);
    ASSERT_EQ(ours.size(), ref.size());
    for (int i = 0; i < n; ++i) EXPECT_NEAR(ours(i), ref(i), 1e-10) << "n=" << n;
    for (int i = 1; i < n; ++i) EXPECT_GE(ours(i - 1), ours(i));
  }
  ComplexMatrix non_herm = ComplexMatrix::Identity(2, 2);
  non_herm(0, 1) = 1.0;
  EXPECT_THROW(qcore::eigvalsh(non_herm), ValidationError);
}

TEST(Qcore, EighReconstructs) {
  PhiloxEngine rng({12, 0});
  const ComplexMatrix g = random_matrix(5, 5, rng);
  const ComplexMatrix h = g + g.adjoint();
  const auto es = qcore::eigh(h);
  const ComplexMatrix back =
      es.vectors * es.values.cast<qcore::Complex>().asDiagonal() * es.vectors.adjoint();
  EXPECT_LT(qcore::max_abs(back - h), 1e-12);
}

TEST(Qcore, TensorMatchesElementwiseKronecker) {
  const auto a = states::random_mixed_hs({2}, {3, 0});
  const auto b = states::random_mixed_hs({3}, {3, 1});
  const auto ab = qcore::tensor(a, b);
  EXPECT_EQ(ab.dims(), (qcore::Dims{2, 3}));
  EXPECT_LT(qcore::max_abs(ab.matrix() - oracle::kron_elementwise(a.matrix(), b.matrix())), 1e-15);
  // |0>⊗|1> is basis index 1 on [2,2].
  const auto p = qcore::tensor(qcore::PureState::basis({2}, 0), qcore::PureState::basis({2}, 1));
  EXPECT_NEAR(std::abs(p.amplitudes()(1)), 1.0, 1e-15);
}

TEST(Qcore, PartialTraceMatchesBruteForce) {
  const qcore::Dims dims{2, 3, 2};
  const auto rho = states::random_mixed_hs(dims, {5, 0});
  for (const std::vector<int>& keep :
       {std::vector<int>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}}) {
    const auto red = qcore::partial_trace(rho, keep);
    const auto ref = oracle::partial_trace_bruteforce(rho.matrix(), dims, keep);
    EXPECT_LT(qcore::max_abs(red.matrix() - ref), 1e-14);
  }
  EXPECT_THROW(qcore::partial_trace(rho, {3}), ArgumentError);
}

TEST(Qcore, PartialTraceOfProduct) {
  const auto a = states::random_mixed_hs({2}, {6, 0});
  const auto b = states::random_mixed_hs({3}, {6, 1});
  const auto ab = qcore::tensor(a, b);
  EXPECT_LT(qcore::max_abs(qcore::partial_trace(ab, {0}).matrix() - a.matrix()), 1e-14);
  EXPECT_LT(qcore::max_abs(qcore::partial_trace(ab, {1}).matrix() - b.matrix()), 1e-14);
}

TEST(Qcore, PermuteSwapsFactors) {
  const auto a = states::random_mixed_hs({2}, {7, 0});
  const auto b = states::random_mixed_hs({3}, {7, 1});
  const std::vector<int> order{1, 0};
  const auto swapped = qcore::permute(qcore::tensor(a, b), order);
  EXPECT_EQ(swapped.dims(), (qcore::Dims{3, 2}));
  EXPECT_LT(qcore::max_abs(swapped.matrix() - qcore::tensor(b, a).matrix()), 1e-15);
}

TEST(Qcore, EntropyValues) {
  EXPECT_NEAR(qcore::von_neumann_entropy(DensityMatrix::maximally_mixed({2, 2})), 2.0, 1e-12);
  EXPECT_NEAR(qcore::von_neumann_entropy(DensityMatrix::from_pure(states::max_entangled(3))), 0.0,
              1e-12);
  EXPECT_NEAR(qcore::von_neumann_entropy(states::isotropic(0.5, 2)), 1.5487949406953985, 1e-12);
  const std::vector<double> p{0.5, 0.25, 0.25, 0.0};
  EXPECT_NEAR(qcore::shannon_entropy(p), 1.5, 1e-15);
}

TEST(Qcore, EntropyUnitaryInvariance) {
  PhiloxEngine rng({8, 0});
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = states::random_mixed_hs({2, 2}, {8, static_cast<std::uint64_t>(trial + 1)});
    const auto u = oracle::random_unitary(4, rng);
    const DensityMatrix rotated =
        DensityMatrix::sanitized({2, 2}, u * rho.matrix() * u.adjoint());
    EXPECT_NEAR(qcore::von_neumann_entropy(rho), qcore::von_neumann_entropy(rotated), 1e-10);
  }
}

TEST(Qcore, ApplyLeftMatchesEmbedding) {
  PhiloxEngine rng({9, 0});
  const std::vector<int> dims{2, 3, 2};
  const ComplexMatrix m = random_matrix(12, 12, rng);
  const ComplexMatrix op = random_matrix(6, 6, rng);
  // op on (2, 1): the first target is op's leftmost factor.
  const std::vector<int> targets{2, 1};
  const ComplexMatrix ours = qcore::apply_left(op, targets, dims, m);
  // Reference: reorder to [0, 2, 1] where op acts on the trailing pair.
  ComplexMatrix perm = ComplexMatrix::Zero(12, 12);  // |i0 i2 i1> <- |i0 i1 i2>
  for (int i0 = 0; i0 < 2; ++i0)
    for (int i1 = 0; i1 < 3; ++i1)
      for (int i2 = 0; i2 < 2; ++i2) perm(i0 * 6 + i2 * 3 + i1, i0 * 6 + i1 * 2 + i2) = 1.0;
  const ComplexMatrix full =
      perm.adjoint() * oracle::kron_elementwise(ComplexMatrix::Identity(2, 2), op) * perm;
  EXPECT_LT(qcore::max_abs(ours - full * m), 1e-12);
  EXPECT_LT(qcore::max_abs(qcore::embed(op, targets, dims) - full), 1e-14);
}

TEST(Qcore, ApplyLeftRectangular) {
  // |0><0| embedded from qubit into qutrit on subsystem 1.
  ComplexMatrix iso = ComplexMatrix::Zero(3, 2);
  iso(0, 0) = 1.0;
  iso(1, 1) = 1.0;
  const std::vector<int> dims{2, 2};
  const std::vector<int> targets{1};
  const std::vector<int> out_dims{3};
  const ComplexMatrix m = ComplexMatrix::Identity(4, 2);
  const ComplexMatrix r = qcore::apply_left(iso, targets, dims, m, out_dims);
  const ComplexMatrix ref = oracle::kron_elementwise(ComplexMatrix::Identity(2, 2), iso) * m;
  EXPECT_EQ(r.rows(), 6);
  EXPECT_LT(qcore::max_abs(r - ref), 1e-15);
}

TEST(Qcore, ProjectAndCondition) {
  const auto psi = DensityMatrix::from_pure(states::max_entangled(2));
  const std::vector<int> targets{0};
  const auto out = qcore::project_and_condition(psi, qcore::PureState::basis({2}, 0).projector(), targets);
  EXPECT_NEAR(out.probability, 0.5, 1e-15);
  ASSERT_TRUE(out.state);
  EXPECT_NEAR(out.state->matrix()(0, 0).real(), 1.0, 1e-14);

  ComplexMatrix not_proj = ComplexMatrix::Identity(2, 2) * 0.5;
  EXPECT_THROW(qcore::project_and_condition(psi, not_proj, targets), ValidationError);

  const auto prod = DensityMatrix::from_pure(
      qcore::tensor(qcore::PureState::basis({2}, 0), qcore::PureState::basis({2}, 0)));
  const auto zero = qcore::project_and_condition(prod, qcore::PureState::basis({2}, 1).projector(), targets);
  EXPECT_LT(zero.probability, 1e-15);
  EXPECT_FALSE(zero.state);
}

TEST(Qcore, ConditionAndReduceAgreesWithFullConditioning) {
  const qcore::Dims dims{2, 2, 3};
  const auto rho = states::random_mixed_hs(dims, {10, 0});
  PhiloxEngine rng({10, 1});
  const auto v = oracle::random_vector(6, rng);
  const ComplexMatrix proj = v * v.adjoint();
  const std::vector<int> targets{0, 2};
  const auto full = qcore::project_and_condition(rho, proj, targets);
  const auto reduced = qcore::condition_and_reduce(rho, proj, targets, {1});
  EXPECT_NEAR(full.probability, reduced.probability, 1e-14);
  ASSERT_TRUE(full.state && reduced.state);
  EXPECT_LT(qcore::max_abs(qcore::partial_trace(*full.state, {1}).matrix() - reduced.state->matrix()),
            1e-12);
  EXPECT_THROW(qcore::condition_and_reduce(rho, proj, targets, {0}), ArgumentError);
}

TEST(Qcore, WeylOperators) {
  for (int d : {2, 3, 4}) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const ComplexMatrix w = qcore::weyl(a, b, d);
        EXPECT_LT(qcore::max_abs(w * w.adjoint() - ComplexMatrix::Identity(d, d)), 1e-14);
        for (int a2 = 0; a2 < d; ++a2)
          for (int b2 = 0; b2 < d; ++b2) {
            const double ip = std::abs((w.adjoint() * qcore::weyl(a2, b2, d)).trace());
            EXPECT_NEAR(ip, (a == a2 && b == b2) ? d : 0.0, 1e-12);
          }
      }
    }
  }
  EXPECT_LT(qcore::max_abs(qcore::weyl(1, 0, 2) - qcore::pauli(1)), 1e-15);
  EXPECT_LT(qcore::max_abs(qcore::weyl(0, 1, 2) - qcore::pauli(3)), 1e-15);
}

TEST(Qcore, PauliAlgebra) {
  const qcore::Complex i(0, 1);
  EXPECT_LT(qcore::max_abs(qcore::pauli(1) * qcore::pauli(2) - i * qcore::pauli(3)), 1e-15);
  EXPECT_THROW(qcore::pauli(4), ArgumentError);
}

TEST(Qcore, FidelityAndExpectation) {
  const auto psi = states::max_entangled(2);
  EXPECT_NEAR(qcore::fidelity_pure(states::isotropic(0.3, 2), psi), 0.3 + 0.7 / 4, 1e-14);
  const std::vector<int> both{0, 1};
  const ComplexMatrix zz = Eigen::kroneckerProduct(qcore::pauli(3), qcore::pauli(3)).eval();
  EXPECT_NEAR(qcore::expectation(DensityMatrix::from_pure(psi), zz, both), 1.0, 1e-14);
  EXPECT_THROW(qcore::fidelity_pure(states::isotropic(0.3, 3), psi), ArgumentError);
}
