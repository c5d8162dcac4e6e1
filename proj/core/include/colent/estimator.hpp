#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "colent/cellspace.hpp"
#include "colent/refinement.hpp"
#include "colent/symbolic.hpp"

namespace colent {

struct GrowthPoint {
  std::size_t n = 0;
  std::uint64_t count = 0;
  bool exact = true;
};

struct GrowthSeries {
  std::string label;
  std::vector<GrowthPoint> points;
  /// Set when the experiment stopped before n_max; the reason says why.
  bool truncated = false;
  std::string truncation_reason;

  /// Appends a point; n must increase strictly and count must be >= 1.
  void add(std::size_t n, std::uint64_t count, bool exact = true);
  bool all_exact() const;
};

enum class RateMethod { tail_max, regression };

struct RateEstimate {
  double slope = 0.0;
  RateMethod method = RateMethod::tail_max;
  std::size_t tail_window = 2;
  double residual = 0.0;
  /// Some contributing count was heuristic, so the slope only bounds from above.
  bool upper_bound_only = false;
};

/// Finite-horizon proxy for limsup (1/n) log count over the last
/// max(2, ceil(P/3)) of the P points.
///
/// tail_max: the largest (1/n) log count in the window; the residual is
/// its spread. regression: least-squares slope of log count against n in
/// the window; the residual is the RMS deviation. Throws StructuralError for
/// fewer than 3 points.
RateEstimate growth_rate(const GrowthSeries& series, RateMethod method = RateMethod::tail_max);

enum class Mode { plain, coloured, cpc, qd };

const char* mode_name(Mode mode);
/// Accepts plain|N, coloured|Nc, cpc, qd; throws StructuralError otherwise.
Mode parse_mode(const std::string& text);

struct AuditRow {
  std::size_t n = 0;
  std::size_t rank = 0;
  double approx_error = 0.0;
  double mult_defect = 0.0;
  double trace_defect = 0.0;
};

struct ExperimentOptions {
  SolverOptions solver;
  /// Colour budget; 0 means dimension + 1.
  std::size_t colours = 0;
  /// Accuracy for the quasidiagonal conversion.
  double epsilon = 0.5;
};

struct ExperimentResult {
  Mode mode = Mode::coloured;
  GrowthSeries series;
  std::vector<AuditRow> audit;  ///< cpc and qd modes only
};

/// For n = 1..n_max: builds the dynamical join of length n and records the
/// requested count. cpc counts the rank of the partition-of-unity system of
/// the minimal coloured refinement; qd converts that system with the uniform
/// trace, auditing the indicators of the cover elements and their first n-1
/// translates together with the unit.
///
/// Errors at some n stop the series there with a truncation marker instead
/// of propagating, so the points already computed survive.
ExperimentResult entropy_experiment(const ModelBundle& model, std::size_t n_max, Mode mode,
                                    const ExperimentOptions& options = {});

/// Subshift source: the cylinder model is rebuilt at depth n for every n,
/// so any n_max is admissible (up to the model size cap).
ExperimentResult entropy_experiment(const TransferMatrix& matrix, std::size_t n_max, Mode mode,
                                    const ExperimentOptions& options = {});

enum class Verdict { ok, violated, withheld };
const char* verdict_name(Verdict v);

struct SandwichReport {
  std::size_t n = 0;
  std::size_t colours = 0;
  std::size_t subcover = 0;
  std::size_t coloured = 0;
  std::size_t bound = 0;  ///< colours * subcover
  bool subcover_exact = false;
  bool coloured_exact = false;
  Verdict verdict = Verdict::withheld;
  std::string reason;
};

/// Checks N <= N_c <= (d+1) N on the length-n dynamical join. The verdict is
/// withheld unless both counts are exact; a witness failing validation or
/// an infeasible colouring counts as a violation.
SandwichReport sandwich_verdict(const ModelBundle& model, std::size_t n,
                                const SolverOptions& options = {});

struct PermanenceCheck {
  std::string law;    ///< power, direct_sum, conjugacy
  std::string label;  ///< which model(s)
  bool passed = false;
  double deviation = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct PermanenceOptions {
  std::size_t max_power = 5;
  /// Largest n for the cell-model checks (direct-sum counts, conjugacy).
  std::size_t cell_depth = 6;
  /// Length of the block-diagonal cylinder series behind the direct-sum slope.
  std::size_t slope_horizon = 36;
  std::uint64_t seed = 1;
  SolverOptions solver;
};

/// Power law on every model, direct-sum max law on every consecutive pair,
/// conjugacy invariance under a seeded random relabelling of each model.
/// Failures are reported, never thrown.
std::vector<PermanenceCheck> permanence_suite(const std::vector<TransferMatrix>& models,
                                              const std::vector<std::string>& labels,
                                              const PermanenceOptions& options = {});

}  // namespace colent
