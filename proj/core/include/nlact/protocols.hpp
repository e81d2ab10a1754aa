#pragma once

// Tripartite activation protocols. Alice and Charlie each share a copy of a
// bipartite state with Bob; Bob measures his two halves and the conditional
// Alice-Charlie state is tested for CHSH violation. A violating conditional
// state certifies the parent state as nonlocal, since local states only ever
// condition to local states.
//
// Everything here is exact density-matrix algebra; no sampling.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlact/qcore.hpp"

namespace nlact::protocols {

// Largest local dimension for double teleportation (state dimension d^6).
inline constexpr int kMaxTeleportDim = 3;
// Largest k for the explicit symmetric extension (dimension 2·3^k).
inline constexpr int kMaxExtensionK = 4;

// Generalized Bell state (I ⊗ X^a Z^b)|Ψ+^d>.
struct BellIndex {
  int a = 0;
  int b = 0;

  friend bool operator==(const BellIndex&, const BellIndex&) = default;
};

qcore::PureState bell_state(int d, BellIndex index);

struct ProtocolOutcome {
  // Probability of reaching this branch from the start of the protocol.
  double success_probability = 0.0;
  // Alice-Charlie state; present whenever success_probability > 1e-12.
  std::optional<qcore::DensityMatrix> conditional_state;
  // Bob's measurement results, in protocol order.
  std::vector<int> outcome_labels;
  // Conditional probability of each measurement stage given the previous.
  std::vector<double> stage_probabilities;
};

struct TeleportOptions {
  // Apply the Weyl corrections to Alice and Charlie so every outcome
  // reproduces the Ψ+ branch. Off: the branch is post-selected as is.
  bool apply_correction = false;
};

// Bob prepares |φ> on (F1, F2) and performs generalized Bell measurements on
// (F1, B1) and (F2, B2) of ρ^iso_{AB1} ⊗ |φ><φ| ⊗ ρ^iso_{B2C}, simulated on
// the full d^6 space. Returns the Alice-Charlie state for the given pair of
// outcomes. Requires 2 ≤ d ≤ kMaxTeleportDim (SizeError otherwise).
ProtocolOutcome double_teleport(const qcore::PureState& phi, double p,
                                std::pair<BellIndex, BellIndex> outcome,
                                TeleportOptions options = {});

// Closed form of the Ψ+ ⊗ Ψ+ branch:
//   p²|φ><φ| + p(1−p) σ_A ⊗ I/d + p(1−p) I/d ⊗ σ_C + (1−p)² I/d ⊗ I/d.
qcore::DensityMatrix teleport_mixture(const qcore::PureState& phi, double p);

// Each element Hermitian and PSD, summing to the identity (ValidationError
// otherwise).
using Povm = std::vector<qcore::ComplexMatrix>;

void validate_povm(const Povm& povm, int d);

// Projective ±1 measurement along a Bloch direction: {(I + n·σ)/2, (I − n·σ)/2}.
Povm qubit_measurement(const Eigen::Vector3d& direction);

struct TeleportDistribution {
  Eigen::MatrixXd joint;  // joint(x, z) = P(Alice x, Charlie z)
  Eigen::MatrixXd p_phi;  // same measurement on |φ><φ|
  Eigen::MatrixXd p_loc;  // (joint − p² p_phi) / (1 − p²); zero when p = 1
  double weight = 0.0;    // p²
  // max |p_loc − product-form remainder built from σ_A, σ_C and I/d|
  double residual = 0.0;
};

TeleportDistribution teleport_distribution(const qcore::PureState& phi, double p,
                                           const Povm& alice, const Povm& charlie);

// P(x = z) − P(x ≠ z) for a two-outcome table.
double correlator(const Eigen::MatrixXd& table);

// Two copies ρ^eras_{AB1} ⊗ ρ^eras_{B2C} (Bob holds both qutrits). Bob filters
// B1 and B2 with {M0 = |0><0| + |1><1|, M1 = |2><2|}; on (M0, M0) he makes a
// Bell measurement on (B1, B2). `bell_outcome` ∈ 0..3 is 2a + b for the
// qubit Bell state (I ⊗ X^a Z^b)|Ψ+>.
ProtocolOutcome erased_protocol(double k, int bell_outcome);

// Every leaf of the erased-state protocol: four Bell outcomes on (M0, M0),
// then (M0, M1), (M1, M0), (M1, M1). Labels are {m1, m2, bell} with bell = −1
// where no Bell measurement is made.
std::vector<ProtocolOutcome> erased_outcome_tree(double k);

// Alice-Charlie Bell state produced by Bell outcome 2a + b in erased_protocol.
qcore::PureState erased_target_state(int bell_outcome);

// (1/k) Σ_i |Ψ+><Ψ+|_{A B_i} ⊗ (⊗_{j≠i} |2><2|_{B_j}) on dims [2, 3, ..., 3].
// Every (A, B_i) marginal equals states::erased(k).
qcore::DensityMatrix build_symmetric_extension(int k);

// Conditions rho on `projector` (acting on `targets`), keeps the subsystems
// in `keep`, and reports whether the resulting two-qubit state violates
// CHSH. True certifies rho nonlocal. Throws UnsupportedCutError if the kept
// state is not two-qubit. A zero-probability outcome certifies nothing.
bool verify_locality_observation(const qcore::DensityMatrix& rho,
                                 const qcore::ComplexMatrix& projector,
                                 std::span<const int> targets,
                                 std::vector<int> keep);

}  // namespace nlact::protocols
