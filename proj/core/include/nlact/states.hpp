#pragma once

#include "nlact/qcore.hpp"
#include "nlact/rng.hpp"

namespace nlact::states {

// (Σ_i |ii>)/√d on dims [d, d]. ArgumentError for d < 2.
qcore::PureState max_entangled(int d);

// p |Ψ+^d><Ψ+^d| + (1 − p) I/d² on dims [d, d].
qcore::DensityMatrix isotropic(double p, int d);

// Qubit-qutrit erased state on dims [2, 3]:
//   (1/k) |Ψ+^2><Ψ+^2| + (1 − 1/k) I_A/2 ⊗ |2><2|_B,
// with Ψ+^2 living on the {|0>,|1>} levels of the qutrit. Requires k ≥ 1.
qcore::DensityMatrix erased(double k);

// Hilbert-Schmidt random state: G G† / Tr(G G†) with G a square Ginibre
// matrix of independent standard complex Gaussians.
qcore::DensityMatrix random_mixed_hs(const qcore::Dims& dims, RngSeed seed);

// Fubini-Study (Haar) random pure state: a normalized complex Gaussian vector.
qcore::PureState random_pure_fs(const qcore::Dims& dims, RngSeed seed);

}  // namespace nlact::states
