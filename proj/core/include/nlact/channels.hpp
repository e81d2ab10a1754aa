#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nlact/qcore.hpp"

namespace nlact::channels {

enum class ChannelLabel { AD, PD, D, depolarizing_d, erasure, custom };

std::string_view to_string(ChannelLabel label);

// Phase-damping parametrization. Standard: √(1 − t/2) I, √(t/2) σ3, the
// identity at t = 0 and full dephasing at t = 1. Verbatim: √t I, √(1 − t) σ3,
// σ3 conjugation at t = 0 and the identity at t = 1.
enum class PdMode { standard, verbatim };

// Operator-sum channel ρ ↦ Σ E_i ρ E_i†. Construction enforces
// ‖Σ E_i† E_i − I‖_max ≤ 1e-10.
class KrausChannel {
 public:
  KrausChannel(std::vector<qcore::ComplexMatrix> kraus_ops, ChannelLabel label,
               std::optional<double> strength = std::nullopt);

  const std::vector<qcore::ComplexMatrix>& kraus_ops() const noexcept { return ops_; }
  ChannelLabel label() const noexcept { return label_; }
  std::optional<double> strength() const noexcept { return strength_; }
  int dim_in() const noexcept { return static_cast<int>(ops_.front().cols()); }
  int dim_out() const noexcept { return static_cast<int>(ops_.front().rows()); }

  // ‖Σ E_i† E_i − I‖_max
  double completeness_defect() const;

 private:
  std::vector<qcore::ComplexMatrix> ops_;
  ChannelLabel label_;
  std::optional<double> strength_;
};

// Amplitude damping: E0 = |0><0| + √(1−t)|1><1|, E1 = √t |0><1|.
KrausChannel make_ad(double t);
KrausChannel make_pd(double t, PdMode mode = PdMode::standard);
// Depolarization: E0 = √(1 − 3t/4) I, E_i = √(t/4) σ_i; equals (1−t)ρ + t I/2.
KrausChannel make_d(double t);
// Λ_p(σ) = p σ + (1 − p) I/d, built from the d² Weyl operators.
KrausChannel make_depolarizing(double p, int d);
// Qubit-to-qutrit erasure: keeps the input with probability 1/k, otherwise
// replaces it by the flag level |2>. Choi state is states::erased(k).
KrausChannel make_erasure(double k);

// Apply ch to subsystem `subsystem` of rho. The output dims replace that
// subsystem's dimension with ch.dim_out().
qcore::DensityMatrix apply(const KrausChannel& ch, const qcore::DensityMatrix& rho,
                           int subsystem);

// Which decoherence family local_decohere instantiates at each t.
enum class DecoherenceKind { AD, PD, PD_verbatim, D };

std::string_view to_string(DecoherenceKind kind);
KrausChannel make_decoherence(DecoherenceKind kind, double t);

// Both qubits of a two-qubit pure state evolve under the same channel for
// the same t.
qcore::DensityMatrix local_decohere(const qcore::PureState& psi,
                                    DecoherenceKind kind, double t);
// Same, for an already-built single-qubit channel.
qcore::DensityMatrix local_decohere(const qcore::PureState& psi,
                                    const KrausChannel& ch);

}  // namespace nlact::channels
