#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shiftdyn/shift_dynamics.hpp"

namespace shiftdyn {

enum class SeriesVerdict { Converges, Diverges, Inconclusive };

std::string to_string(SeriesVerdict v);

struct SeriesTolerances {
  double divergence_bound = 1e6;
  double cauchy_tol = 1e-8;       // last-quarter increase accepted as settled
  double ratio_margin = 1e-3;     // convergence needs tail ratio < 1 - margin
  double raabe_convergent = 1.5;  // tail decay exponent estimate, safe side of 1
  double raabe_divergent = 1.05;
  double zero_floor = 1e-14;
};

/// Finite-horizon convergence evidence for a nonnegative series. The verdict
/// is a three-valued judgement of the observed tail, never a proof: geometric
/// or settled tails converge, harmonic-or-slower tails (Raabe estimate at or
/// below 1) diverge, anything in between stays inconclusive.
struct SeriesReport {
  std::vector<double> terms;
  std::vector<double> partial_sums;
  std::size_t horizon = 0;
  double tail_ratio = 0.0;
  double raabe = 0.0;
  double last_quarter_increase = 0.0;
  SeriesVerdict verdict = SeriesVerdict::Inconclusive;
  std::string reason;
};

SeriesReport classify_series(std::vector<double> terms, const SeriesTolerances& tol = {});

/// Observed return set within [0, horizon].
struct ReturnSet {
  std::vector<index_t> members;  // sorted, unique
  index_t horizon = 0;

  static ReturnSet from_members(std::vector<index_t> members, index_t horizon);
  bool contains(index_t n) const;
  std::size_t count_leq(index_t n) const;
  /// Smallest n0 such that [n0, horizon] is fully contained; horizon+1 if
  /// even the last point is missing.
  index_t trailing_run_start() const;
  /// Remove [0, n] and rebase to zero (finite-invariance helper).
  ReturnSet drop_initial(index_t n) const;
};

/// Finite-horizon liminf proxy: minimum of #(members in [0,n]) / (n+1) over
/// the trailing half n in [horizon/2, horizon].
double lower_density(const ReturnSet& rs);

/// Finite-horizon membership semantics for the named Furstenberg families.
/// The thresholds are explicit so verdicts stay falsifiable; acceptance is
/// hereditary upward and honors the chain Cof => LowerDensity(d) => Inf by
/// construction.
struct FurstenbergFamily {
  enum class Variant { Inf, Cof, LowerDensity };
  Variant variant = Variant::Inf;
  double delta = 0.5;        // LowerDensity only
  index_t min_members = 25;  // Inf and LowerDensity floor
  index_t tail_window = 25;  // Cof: trailing run must start this early

  static FurstenbergFamily inf();
  static FurstenbergFamily cof();
  static FurstenbergFamily lower_density_family(double delta);

  bool accepts(const ReturnSet& rs) const;
  std::string describe() const;
};

struct CriterionVerdict {
  enum class Holds { Yes, No, Inconclusive };
  Holds holds = Holds::Inconclusive;
  std::vector<std::string> implications;
  std::vector<std::string> notes;
};

std::string to_string(CriterionVerdict::Holds h);

/// A quantity tabulated along the k range that is expected to tend to zero.
struct DecayColumn {
  std::string name;
  std::vector<double> values;

  bool decayed(double tol) const;  // final value below tol, tail non-increasing
};

/// Series of product norms || W_{j+c} ... W_{j+1} D || (or the inverse-weight
/// mirror) for c = n, 2n, ..., L*n, evaluated by incremental coefficient
/// walks when D is a single shift term.
std::vector<double> product_norm_series(const WeightSequencePtr& W, index_t j, index_t n,
                                        const Operator& D, std::size_t L, bool forward);

struct FhcOptions {
  int k_count = 8;
  std::size_t L_max = 500;
  SeriesTolerances series;
  double approx_tol = 1e-6;
};

struct FhcSeriesEntry {
  index_t j = 0;
  int k = 1;
  index_t n_k = 0;
  SeriesReport forward_squared;
  SeriesReport backward_squared;
  SeriesReport forward_unsquared;  // evidence for the non-squared comparison
};

struct FhcVerdict {
  CriterionVerdict core;
  std::vector<FhcSeriesEntry> entries;
  std::vector<DecayColumn> approximant_columns;
};

/// Sufficient condition for the frequent hypercyclicity criterion: both
/// squared product-norm series converge for every j in [-J, J] and every
/// sampled k, and the approximants tend to P_m.
FhcVerdict check_fhc(const GeneralizedShift& shift, index_t J, index_t m,
                     const IncreasingSequence& nk, const ApproximantFamily& approx,
                     const FhcOptions& opts = {});

struct ChaosSeriesEntry {
  index_t j = 0;
  int k = 1;
  index_t n_k = 0;
  SeriesReport forward_op;
  SeriesReport backward_op;
  double forward_tail_increase = 0.0;  // operator-norm Cauchy difference
  double backward_tail_increase = 0.0;
};

struct ChaosVerdict {
  CriterionVerdict core;
  std::vector<ChaosSeriesEntry> entries;
  std::vector<DecayColumn> approximant_columns;
};

/// Untwisted shifts only (U = I): convergence of the operator-valued Gram
/// series, equivalent to chaos and to the frequent hypercyclicity criterion.
/// Term norms equal the squared product norms (C*-identity); the reports
/// carry the operator-level Cauchy differences as additional evidence.
ChaosVerdict check_chaos_equiv(const GeneralizedShift& shift, index_t J, index_t m,
                               const IncreasingSequence& nk, const ApproximantFamily& approx,
                               const FhcOptions& opts = {});

struct StarRow {
  index_t n = 0;
  int s = 0;
  int l = 0;
  double norm = 0.0;
};

struct StarCheck {
  bool holds = false;
  double worst = 0.0;
  std::vector<StarRow> rows;
  static constexpr double kTolerance = 1e-12;
};

/// Verify P_m U^{(s)n} U^{(l)-n} P_m = 0 for all distinct s, l and all
/// n in [Nm_claim, Nm_claim + probe_range].
StarCheck check_star_condition(const std::vector<Operator>& unitaries, index_t m,
                               index_t Nm_claim, index_t probe_range);

struct DisjointOptions {
  int k_count = 3;
  double column_tol = 1e-6;
  index_t Nm_claim = -1;  // defaults to 2m+1
  index_t star_probe = 50;
  SeriesTolerances series;  // unused; kept for config plumbing symmetry
};

struct DisjointVerdict {
  CriterionVerdict core;
  StarCheck star;
  std::vector<index_t> nk_values;
  std::vector<DecayColumn> columns;
};

/// Disjointness columns for a tuple of shifts: approximant gaps, forward and
/// backward product norms, and the mixed forward/backward cross products for
/// each ordered pair of distinct shifts. Yes when every column decays below
/// the tolerance along the sampled k range.
DisjointVerdict check_disjoint(const std::vector<GeneralizedShift>& shifts, index_t J, index_t m,
                               const IncreasingSequence& nk, const ApproximantFamily& approx,
                               const DisjointOptions& opts = {});

struct FtransRow {
  index_t n = 0;
  index_t t_n = 0;
  double dD = 0.0;
  double dG = 0.0;
  double fwd = 0.0;
  double bwd = 0.0;
  bool hit = false;
};

struct FtransVerdict {
  CriterionVerdict core;
  std::vector<FtransRow> rows;  // worst case over j per n
  ReturnSet hits;
};

/// Transitivity along the family: the quadruple (approximant gaps, forward
/// norm, backward norm) must fall below eps on a set of exponents belonging
/// to the family.
FtransVerdict check_f_transitivity(const GeneralizedShift& shift, const IncreasingSequence& tn,
                                   index_t J, index_t m, const FurstenbergFamily& family,
                                   const ApproximantFamily& approx, double eps, index_t horizon);

struct UniformConvergenceResult {
  bool holds = false;
  ReturnSet common_hits;
  std::vector<std::string> notes;
};

/// Uniform family convergence of finitely many sequences: each entry of
/// `distances` lists d(x_n^{(i)}, target_i) for n = 0..horizon; the common
/// hit set {n : all distances < eps} must belong to the family.
UniformConvergenceResult check_uniform_f_convergence(
    const std::vector<std::vector<double>>& distances, const FurstenbergFamily& family,
    double eps);

struct SampleSets {
  std::vector<HVector> forward_samples;
  std::vector<HVector> backward_samples;
};

/// Unit-ball samples e_{-m}, ..., e_m for both directions.
SampleSets make_basis_samples(index_t m);

struct SampledRow {
  index_t n = 0;
  index_t t_n = 0;
  double fwd = 0.0;
  double bwd = 0.0;
  bool hit = false;
};

struct SampledVerdict {
  CriterionVerdict core;
  std::vector<SampledRow> rows;
  ReturnSet hits;
};

/// Pointwise sampled transitivity check: forward products applied to the
/// first sample set and inverse products applied to the second must both
/// fall below eps along a family set. Samples stand in for dense subsets of
/// the unit ball, so the result is evidence, not a certificate.
SampledVerdict check_sampled_transitivity(const GeneralizedShift& shift,
                                          const IncreasingSequence& tn, index_t J,
                                          const std::function<SampleSets(index_t)>& samples,
                                          const FurstenbergFamily& family, double eps,
                                          index_t horizon);

}  // namespace shiftdyn
