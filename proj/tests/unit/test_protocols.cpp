#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlact/criteria.hpp"
#include "nlact/errors.hpp"
#include "nlact/protocols.hpp"
#include "nlact/states.hpp"
#include "oracles.hpp"

using namespace nlact;
using protocols::BellIndex;
using qcore::ComplexMatrix;

namespace {

// Full-space Bell projection on (F1, B1) and (F2, B2) built index by index,
// followed by a brute-force partial trace to (A, C).
ComplexMatrix double_teleport_oracle(const qcore::PureState& phi, double p, BellIndex o1,
                                     BellIndex o2, double& prob) {
  const int d = phi.dims()[0];
  const ComplexMatrix iso = states::isotropic(p, d).matrix();
  const ComplexMatrix full =
      oracle::kron_elementwise(iso, oracle::kron_elementwise(phi.projector(), iso));
  const ComplexMatrix p1 = protocols::bell_state(d, o1).projector();  // (F1, B1)
  const ComplexMatrix p2 = protocols::bell_state(d, o2).projector();  // (F2, B2)
  const int n = static_cast<int>(full.rows());
  ComplexMatrix proj = ComplexMatrix::Zero(n, n);
  const auto dig = [d](int idx, int* out) {
    for (int s = 5; s >= 0; --s) {
      out[s] = idx % d;
      idx /= d;
    }
  };
  int r[6], c[6];
  for (int i = 0; i < n; ++i) {
    dig(i, r);
    for (int j = 0; j < n; ++j) {
      dig(j, c);
      if (r[0] != c[0] || r[5] != c[5]) continue;
      proj(i, j) = p1(r[2] * d + r[1], c[2] * d + c[1]) * p2(r[3] * d + r[4], c[3] * d + c[4]);
    }
  }
  const ComplexMatrix post = proj * full * proj;
  prob = post.trace().real();
  return oracle::partial_trace_bruteforce(post, {d, d, d, d, d, d}, {0, 5}) / prob;
}

}  // namespace

TEST(Protocols, BellBasisOrthonormal) {
  for (int d : {2, 3}) {
    for (int i = 0; i < d * d; ++i)
      for (int j = 0; j < d * d; ++j) {
        const auto a = protocols::bell_state(d, {i / d, i % d});
        const auto b = protocols::bell_state(d, {j / d, j % d});
        EXPECT_NEAR(std::abs(a.amplitudes().dot(b.amplitudes())), i == j ? 1.0 : 0.0, 1e-14);
      }
  }
  EXPECT_THROW(protocols::bell_state(2, {2, 0}), ArgumentError);
}

TEST(Protocols, DoubleTeleportMatchesOracle) {
  PhiloxEngine rng({41, 0});
  const auto phi = qcore::PureState({2, 2}, oracle::random_vector(4, rng));
  for (int o1 = 0; o1 < 4; ++o1)
    for (int o2 = 0; o2 < 4; ++o2) {
      double prob = 0;
      const BellIndex b1{o1 / 2, o1 % 2}, b2{o2 / 2, o2 % 2};
      const ComplexMatrix ref = double_teleport_oracle(phi, 0.6, b1, b2, prob);
      const auto out = protocols::double_teleport(phi, 0.6, {b1, b2});
      EXPECT_NEAR(out.success_probability, prob, 1e-14);
      EXPECT_NEAR(out.success_probability, 1.0 / 16, 1e-13);
      ASSERT_TRUE(out.conditional_state);
      EXPECT_LT(qcore::max_abs(out.conditional_state->matrix() - ref), 1e-13);
    }
}

TEST(Protocols, CorrectedBranchesEqualMixture) {
  PhiloxEngine rng({42, 0});
  for (int d : {2, 3}) {
    const auto phi = qcore::PureState({d, d}, oracle::random_vector(d * d, rng));
    const double p = rng.uniform_open();
    const auto mix = protocols::teleport_mixture(phi, p);
    const std::vector<std::pair<BellIndex, BellIndex>> outcomes =
        d == 2 ? std::vector<std::pair<BellIndex, BellIndex>>{{{0, 0}, {0, 0}}, {{1, 1}, {0, 1}},
                                                             {{1, 0}, {1, 1}}}
               : std::vector<std::pair<BellIndex, BellIndex>>{{{0, 0}, {0, 0}}, {{2, 1}, {1, 2}}};
    for (const auto& o : outcomes) {
      const auto out = protocols::double_teleport(phi, p, o, {.apply_correction = true});
      ASSERT_TRUE(out.conditional_state);
      EXPECT_LT(qcore::max_abs(out.conditional_state->matrix() - mix.matrix()), 1e-10) << "d=" << d;
      EXPECT_NEAR(out.success_probability, 1.0 / std::pow(d, 4), 1e-12);
    }
  }
}

TEST(Protocols, MixtureEndpoints) {
  const auto phi = states::max_entangled(2);
  EXPECT_LT(qcore::max_abs(protocols::teleport_mixture(phi, 1.0).matrix() - phi.projector()), 1e-15);
  EXPECT_LT(qcore::max_abs(protocols::teleport_mixture(phi, 0.0).matrix() -
                           ComplexMatrix::Identity(4, 4) / 4.0),
            1e-15);
}

TEST(Protocols, ActivatedChshOnPsiPlus) {
  const auto phi = states::max_entangled(2);
  for (double p : {0.0, 0.5, 0.8, 0.85, 1.0}) {
    const auto out = protocols::double_teleport(phi, p, {{0, 0}, {0, 0}});
    const double chsh = criteria::classify(*out.conditional_state).chsh_max;
    EXPECT_NEAR(chsh, 2 * std::sqrt(2.0) * p * p, 1e-12);
  }
}

TEST(Protocols, TeleportDimensionCap) {
  EXPECT_THROW(protocols::double_teleport(states::max_entangled(4), 0.5, {{0, 0}, {0, 0}}),
               SizeError);
  EXPECT_THROW(protocols::double_teleport(states::max_entangled(2), 1.2, {{0, 0}, {0, 0}}),
               ArgumentError);
}

TEST(Protocols, DistributionDecomposition) {
  PhiloxEngine rng({43, 0});
  const auto phi = qcore::PureState({2, 2}, oracle::random_vector(4, rng));
  const auto alice = protocols::qubit_measurement(Eigen::Vector3d(0, 0, 1));
  const auto charlie = protocols::qubit_measurement(Eigen::Vector3d(1, 0, 1).normalized());
  for (double p : {0.2, 0.7, 1.0}) {
    const auto dist = protocols::teleport_distribution(phi, p, alice, charlie);
    EXPECT_NEAR(dist.joint.sum(), 1.0, 1e-13);
    EXPECT_NEAR(dist.weight, p * p, 1e-15);
    EXPECT_LT(dist.residual, 1e-10);
    if (p < 1.0) {
      EXPECT_GT(dist.p_loc.minCoeff(), -1e-12);
      EXPECT_NEAR(dist.p_loc.sum(), 1.0, 1e-12);
    }
    const double lin = protocols::correlator(dist.joint) - (p * p * protocols::correlator(dist.p_phi) +
                                                (1 - p * p) * protocols::correlator(dist.p_loc));
    EXPECT_NEAR(lin, 0.0, 1e-12);
  }
}

TEST(Protocols, PovmValidation) {
  protocols::Povm bad{ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)};
  EXPECT_THROW(protocols::validate_povm(bad, 2), ValidationError);
  EXPECT_NO_THROW(protocols::validate_povm(protocols::qubit_measurement({1, 0, 0}), 2));
  EXPECT_THROW(protocols::qubit_measurement({1, 1, 0}), ArgumentError);
}

TEST(Protocols, ErasedProtocolProbabilities) {
  for (double k : {1.0, 2.0, 5.0, 10.0}) {
    const auto tree = protocols::erased_outcome_tree(k);
    ASSERT_EQ(tree.size(), 7u);
    double total = 0;
    for (const auto& leaf : tree) total += leaf.success_probability;
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (int bell = 0; bell < 4; ++bell) {
      const auto& leaf = tree[bell];
      EXPECT_EQ(leaf.outcome_labels, (std::vector<int>{0, 0, bell}));
      EXPECT_NEAR(leaf.stage_probabilities[0], 1 / (k * k), 1e-12);
      EXPECT_NEAR(leaf.stage_probabilities[1], 0.25, 1e-12);
      ASSERT_TRUE(leaf.conditional_state);
      const auto target = protocols::erased_target_state(bell);
      EXPECT_NEAR(qcore::fidelity_pure(*leaf.conditional_state, target), 1.0, 1e-10);
      EXPECT_NEAR(criteria::classify(*leaf.conditional_state).chsh_max, 2 * std::sqrt(2.0), 1e-9);
    }
    for (std::size_t i = 4; i < 7; ++i) {
      EXPECT_EQ(tree[i].outcome_labels[2], -1);
      if (tree[i].conditional_state) {
        EXPECT_LE(criteria::horodecki_m(*tree[i].conditional_state), 1e-10);
      }
    }
  }
}

TEST(Protocols, ErasedStateNotDistillableByHashing) {
  for (double k : {2.0, 5.0, 10.0})
    EXPECT_FALSE(criteria::hashing_criterion(states::erased(k), {0}).distillable);
}

TEST(Protocols, SymmetricExtensionMarginals) {
  for (int k : {2, 3, 4}) {
    const auto ext = protocols::build_symmetric_extension(k);
    for (int i = 1; i <= k; ++i) {
      const auto marg = qcore::partial_trace(ext, {0, i});
      EXPECT_LT(qcore::max_abs(marg.matrix() - states::erased(k).matrix()), 1e-12);
    }
  }
  EXPECT_THROW(protocols::build_symmetric_extension(5), SizeError);
  EXPECT_THROW(protocols::build_symmetric_extension(1), SizeError);
}

TEST(Protocols, SymmetricExtensionPermutationInvariant) {
  const auto ext = protocols::build_symmetric_extension(3);
  for (const std::vector<int>& order : {std::vector<int>{0, 2, 1, 3}, {0, 3, 2, 1}, {0, 2, 3, 1}}) {
    EXPECT_LT(qcore::max_abs(qcore::permute(ext, order).matrix() - ext.matrix()), 1e-15);
  }
}

TEST(Protocols, LocalityObservation) {
  // Ψ+ ⊗ Ψ+ on (A, B1, B2, C) with Bob measuring Ψ+ on (B1, B2) swaps the
  // entanglement onto (A, C).
  const auto psi = qcore::DensityMatrix::from_pure(states::max_entangled(2));
  const auto four = qcore::tensor(psi, psi);
  const int targets[] = {1, 2};
  EXPECT_TRUE(protocols::verify_locality_observation(four, states::max_entangled(2).projector(),
                                                     targets, {0, 3}));
  const auto product = qcore::tensor(qcore::DensityMatrix::maximally_mixed({2, 2}),
                                     qcore::DensityMatrix::maximally_mixed({2, 2}));
  EXPECT_FALSE(protocols::verify_locality_observation(product, states::max_entangled(2).projector(),
                                                      targets, {0, 3}));
  const auto ext = protocols::build_symmetric_extension(2);
  const int t1[] = {1};
  EXPECT_THROW(protocols::verify_locality_observation(
                   ext, qcore::PureState::basis({3}, 2).projector(), t1, {0, 2}),
               UnsupportedCutError);
}

TEST(Protocols, OutcomeAverageIsUnconditionedMarginal) {
  PhiloxEngine rng({44, 0});
  const auto phi = qcore::PureState({2, 2}, oracle::random_vector(4, rng));
  const double p = 0.55;
  ComplexMatrix avg = ComplexMatrix::Zero(4, 4);
  double total = 0;
  for (int o1 = 0; o1 < 4; ++o1)
    for (int o2 = 0; o2 < 4; ++o2) {
      const auto out = protocols::double_teleport(phi, p, {{o1 / 2, o1 % 2}, {o2 / 2, o2 % 2}});
      total += out.success_probability;
      avg += out.success_probability * out.conditional_state->matrix();
    }
  EXPECT_NEAR(total, 1.0, 1e-12);
  // Without Bob's result, Alice and Charlie each hold half of a Ψ+-derived
  // isotropic state: I/2 ⊗ I/2.
  EXPECT_LT(qcore::max_abs(avg - ComplexMatrix::Identity(4, 4) / 4.0), 1e-10);
}

TEST(Protocols, ZeroVisibilityGivesMaximallyMixed) {
  const auto phi = states::max_entangled(3);
  for (const auto& o : {std::pair<BellIndex, BellIndex>{{0, 0}, {0, 0}}, {{1, 2}, {2, 0}}}) {
    const auto out = protocols::double_teleport(phi, 0.0, o);
    EXPECT_LT(qcore::max_abs(out.conditional_state->matrix() - ComplexMatrix::Identity(9, 9) / 9.0),
              1e-12);
  }
}

TEST(Protocols, DoubleTeleportCertifiesAboveThreshold) {
  const auto out = protocols::double_teleport(states::max_entangled(2), 0.95, {{0, 0}, {0, 0}});
  EXPECT_GT(criteria::horodecki_m(*out.conditional_state), 1.0);
}
