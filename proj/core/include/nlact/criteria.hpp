#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "nlact/qcore.hpp"

namespace nlact::criteria {

// Strict-inequality margin: M = 1 and entropy ties classify as
// non-violating / non-distillable.
inline constexpr double kTieTolerance = 1e-9;

// T_ij = Tr[ρ (σ_i ⊗ σ_j)], i, j = 1..3.
struct CorrelationMatrix {
  Eigen::Matrix3d t;
};

struct HashingResult {
  double s_a = 0.0;   // bits
  double s_b = 0.0;
  double s_ab = 0.0;
  bool distillable = false;

  double margin() const { return std::max(s_a, s_b) - s_ab; }
};

// Outcome of the two-step test: CHSH first, then the hashing bound for the
// states that do not violate it. nonlocal_resource is a sufficient
// condition only; a false flag does not certify locality.
struct Classification {
  double m_value = 0.0;
  double chsh_max = 0.0;  // 2√M
  double s_a = 0.0;
  double s_b = 0.0;
  double s_ab = 0.0;
  bool violates_chsh = false;
  bool hashing_distillable = false;
  bool nonlocal_resource = false;
};

// Bloch unit vectors for Alice (a, a') and Bob (b, b').
struct ChshSettings {
  Eigen::Vector3d a;
  Eigen::Vector3d a_prime;
  Eigen::Vector3d b;
  Eigen::Vector3d b_prime;
};

// All of the following require dims [2, 2] (ArgumentError otherwise).
CorrelationMatrix correlation_matrix(const qcore::DensityMatrix& rho);

// Sum of the two largest eigenvalues of TᵀT; the maximal CHSH value is 2√M.
double horodecki_m(const qcore::DensityMatrix& rho);
double horodecki_m(const CorrelationMatrix& t);

// E(a,b) + E(a,b') + E(a',b) − E(a',b') with E(a,b) = Tr[ρ (a·σ ⊗ b·σ)],
// evaluated from the observables directly. ArgumentError unless every
// setting is a unit vector within 1e-10.
double chsh_value(const qcore::DensityMatrix& rho, const ChshSettings& settings);

// Entropies of the parts of the bipartition (part_a | rest) and the
// one-way distillability flag max{S_A, S_B} − S_AB > kTieTolerance.
HashingResult hashing_criterion(const qcore::DensityMatrix& rho,
                                std::vector<int> part_a);

Classification classify(const qcore::DensityMatrix& rho);

}  // namespace nlact::criteria
