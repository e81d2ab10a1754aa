#pragma once

// Monte Carlo experiment driver. State i of any experiment draws from
// stream (seed, i), so results do not depend on the thread count, and all
// aggregation runs in state-index order after the parallel phase.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlact/channels.hpp"
#include "nlact/criteria.hpp"
#include "nlact/rng.hpp"

namespace nlact::harness {

enum class Experiment { census, decoherence_sweep, protocol_verify, extension_verify, iso_curve };
enum class OutputFormat { csv, json };

std::string_view to_string(Experiment e);

struct ExperimentConfig {
  Experiment experiment = Experiment::census;
  std::size_t n_states = 100000;
  std::size_t n_time_steps = 200;
  channels::DecoherenceKind channel = channels::DecoherenceKind::AD;
  std::uint64_t seed = 1;
  std::string output_path;  // empty: no record file
  OutputFormat output_format = OutputFormat::csv;
  unsigned threads = 0;     // 0: hardware concurrency
  double p = 1.0;           // protocol_verify
  int d = 0;                // protocol_verify; 0 runs d = 2 and d = 3
  double k = 3.0;           // protocol_verify, extension_verify
  bool keep_steps = true;   // retain per-step classifications in sweep records
};

// ArgumentError for configurations the selected experiment cannot run.
void validate(const ExperimentConfig& cfg);

// Fraction with its binomial standard error √(f(1−f)/n).
struct Proportion {
  std::size_t count = 0;
  std::size_t trials = 0;
  double value = 0.0;
  double std_error = 0.0;
};

Proportion make_proportion(std::size_t count, std::size_t trials);

// ---------------------------------------------------------------------------
// Census of Hilbert-Schmidt random two-qubit states

struct CensusRecord {
  std::size_t state_index = 0;
  RngSeed seed_used;
  criteria::Classification classification;
};

struct CensusSummary {
  std::size_t n_states = 0;
  Proportion no_chsh_violation;         // of all states
  Proportion nlr_of_all;                // nonlocal_resource, of all states
  Proportion nlr_of_nonviolating;       // nonlocal_resource, of non-violating states
};

struct CensusResult {
  std::vector<CensusRecord> records;
  CensusSummary summary;
};

CensusResult run_census(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Local decoherence sweeps of Fubini-Study random pure states

struct StepResult {
  double t = 0.0;
  criteria::Classification classification;
};

struct ActivationInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  // (t_end − t_start) + one grid spacing: closed grid cells, in units of t.
  double width = 0.0;
  bool multi_interval = false;
  // Active steps × grid spacing; equals width when the set is contiguous.
  double total_measure = 0.0;
  std::size_t active_steps = 0;
};

struct ExperimentRecord {
  std::size_t state_index = 0;
  RngSeed seed_used;
  std::vector<StepResult> per_step;  // empty unless cfg.keep_steps
  std::optional<ActivationInterval> activation_interval;
  // Last grid t at which the evolved state still violates CHSH.
  std::optional<double> last_chsh_violation_t;
};

struct SweepSummary {
  channels::DecoherenceKind channel = channels::DecoherenceKind::AD;
  std::size_t n_states = 0;
  std::size_t n_time_steps = 0;
  Proportion activated;                 // states with nonlocal_resource at some t
  double pct_nlr_states = 0.0;          // 100 × activated.value
  // Interval measure statistics over activated states only.
  double mean_interval_width = 0.0;
  double std_interval_width = 0.0;
  // Same with non-activated states contributing zero.
  double mean_interval_width_all = 0.0;
  double std_interval_width_all = 0.0;
  std::size_t n_multi_interval = 0;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;
  SweepSummary summary;
};

// n equally spaced points covering [0, 1] including both ends (n ≥ 2).
std::vector<double> time_grid(std::size_t n);

// Activation interval of a boolean series on an equally spaced grid.
std::optional<ActivationInterval> extract_interval(std::span<const double> grid,
                                                   const std::vector<bool>& active);

SweepResult run_decoherence_sweep(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Structural verification of the protocols

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<Check> checks;

  bool all_passed() const;
  void add(std::string name, double residual, double tolerance);
};

VerifyReport run_protocol_verify(const ExperimentConfig& cfg);
VerifyReport run_extension_verify(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Isotropic-state curves for d = 2

struct IsoCurveRow {
  double p = 0.0;
  double m_value = 0.0;
  double chsh_max = 0.0;
  double hashing_margin = 0.0;  // max{S_A, S_B} − S_AB
  // CHSH maximum of the Alice-Charlie state after double teleportation of
  // Ψ+ through two copies, from the full protocol simulation.
  double activated_chsh = 0.0;
};

inline constexpr std::size_t kIsoCurvePoints = 201;

std::vector<IsoCurveRow> run_iso_curve(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Output. Floats are written with 12 significant digits.

void write_census(std::ostream& os, const CensusResult& result, OutputFormat format);
void write_sweep(std::ostream& os, const SweepResult& result, OutputFormat format);
void write_iso_curve(std::ostream& os, std::span<const IsoCurveRow> rows,
                     OutputFormat format);
void write_report(std::ostream& os, const VerifyReport& report, OutputFormat format);

void write_summary(std::ostream& os, const CensusSummary& s);
void write_summary(std::ostream& os, const SweepSummary& s);

// Writes through a temporary file renamed into place; on any failure the
// partial output is removed and IoError carries the path and cause.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer);

}  // namespace nlact::harness
