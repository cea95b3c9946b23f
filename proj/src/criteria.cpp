#include "shiftdyn/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace shiftdyn {

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Converges: return "Converges";
    case SeriesVerdict::Diverges: return "Diverges";
    case SeriesVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string to_string(CriterionVerdict::Holds h) {
  switch (h) {
    case CriterionVerdict::Holds::Yes: return "Yes";
    case CriterionVerdict::Holds::No: return "No";
    case CriterionVerdict::Holds::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

SeriesReport classify_series(std::vector<double> terms, const SeriesTolerances& tol) {
  SeriesReport r;
  r.terms = std::move(terms);
  r.horizon = r.terms.size();
  r.partial_sums.reserve(r.horizon);
  double s = 0.0;
  for (double t : r.terms) {
    s += t;
    r.partial_sums.push_back(s);
  }
  if (r.horizon == 0) {
    r.reason = "no terms";
    return r;
  }
  const double last = r.partial_sums.back();
  if (std::isnan(last)) {
    r.reason = "non-finite terms";
    return r;
  }
  if (last > tol.divergence_bound) {
    r.verdict = SeriesVerdict::Diverges;
    r.reason = "partial sums exceed the divergence bound";
    return r;
  }

  const std::size_t tail_len = std::max<std::size_t>(1, r.horizon / 4);
  const std::size_t tail_start = r.horizon - tail_len;
  r.last_quarter_increase =
      last - (tail_start == 0 ? 0.0 : r.partial_sums[tail_start - 1]);
  const double floor = tol.zero_floor * std::max(1.0, last);

  bool tail_zero = true;
  for (std::size_t i = tail_start; i < r.horizon; ++i) {
    if (r.terms[i] >= floor) {
      tail_zero = false;
      break;
    }
  }

  double ratio = 0.0;
  std::vector<double> raabes;
  for (std::size_t i = tail_start; i + 1 < r.horizon; ++i) {
    const double a = r.terms[i];
    const double b = r.terms[i + 1];
    if (a > floor) ratio = std::max(ratio, b / a);
    if (a > floor && b > floor) {
      raabes.push_back(static_cast<double>(i + 1) * (a / b - 1.0));
    }
  }
  r.tail_ratio = ratio;
  if (raabes.empty()) {
    r.raabe = std::numeric_limits<double>::infinity();
  } else {
    std::sort(raabes.begin(), raabes.end());
    const std::size_t mid = raabes.size() / 2;
    r.raabe = raabes.size() % 2 == 1 ? raabes[mid] : 0.5 * (raabes[mid - 1] + raabes[mid]);
  }

  if (tail_zero) {
    r.verdict = SeriesVerdict::Converges;
    r.reason = "tail terms are numerically zero";
    return r;
  }
  if (r.tail_ratio < 1.0 - tol.ratio_margin &&
      (r.last_quarter_increase < tol.cauchy_tol || r.raabe >= tol.raabe_convergent)) {
    r.verdict = SeriesVerdict::Converges;
    r.reason = r.last_quarter_increase < tol.cauchy_tol
                   ? "partial sums settled within the cauchy tolerance"
                   : "tail decay estimate safely above the summability threshold";
    return r;
  }
  if (r.raabe <= tol.raabe_divergent) {
    r.verdict = SeriesVerdict::Diverges;
    r.reason = "tail decay at or below the harmonic threshold";
    return r;
  }
  r.reason = "tail decay estimate in the indeterminate band";
  return r;
}

ReturnSet ReturnSet::from_members(std::vector<index_t> members, index_t horizon) {
  if (horizon < 0) throw InvalidParameter("return set horizon must be nonnegative");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (index_t n : members) {
    if (n < 0 || n > horizon) {
      throw InvalidParameter("return set member " + std::to_string(n) +
                             " outside [0, " + std::to_string(horizon) + "]");
    }
  }
  ReturnSet rs;
  rs.members = std::move(members);
  rs.horizon = horizon;
  return rs;
}

bool ReturnSet::contains(index_t n) const {
  return std::binary_search(members.begin(), members.end(), n);
}

std::size_t ReturnSet::count_leq(index_t n) const {
  return static_cast<std::size_t>(
      std::upper_bound(members.begin(), members.end(), n) - members.begin());
}

index_t ReturnSet::trailing_run_start() const {
  index_t expected = horizon;
  auto it = members.rbegin();
  while (it != members.rend() && *it == expected) {
    ++it;
    --expected;
  }
  return expected + 1;
}

ReturnSet ReturnSet::drop_initial(index_t n) const {
  ReturnSet out;
  out.horizon = std::max<index_t>(horizon - n - 1, 0);
  for (index_t v : members) {
    if (v > n) out.members.push_back(v - n - 1);
  }
  return out;
}

double lower_density(const ReturnSet& rs) {
  if (rs.horizon < 1) throw InvalidParameter("lower density requires horizon >= 1");
  double best = 1.0;
  for (index_t n = rs.horizon / 2; n <= rs.horizon; ++n) {
    best = std::min(best, static_cast<double>(rs.count_leq(n)) / static_cast<double>(n + 1));
  }
  return best;
}

FurstenbergFamily FurstenbergFamily::inf() {
  FurstenbergFamily f;
  f.variant = Variant::Inf;
  return f;
}

FurstenbergFamily FurstenbergFamily::cof() {
  FurstenbergFamily f;
  f.variant = Variant::Cof;
  return f;
}

FurstenbergFamily FurstenbergFamily::lower_density_family(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw InvalidParameter("lower-density parameter must lie in (0, 1]");
  }
  FurstenbergFamily f;
  f.variant = Variant::LowerDensity;
  f.delta = delta;
  return f;
}

namespace {

bool cof_accepts(const ReturnSet& rs, index_t tail_window) {
  if (rs.members.empty()) return false;
  return rs.trailing_run_start() <= rs.horizon - tail_window;
}

}  // namespace

bool FurstenbergFamily::accepts(const ReturnSet& rs) const {
  if (rs.members.empty()) return false;  // proper family
  switch (variant) {
    case Variant::Inf:
      return static_cast<index_t>(rs.members.size()) >= min_members;
    case Variant::Cof:
      return cof_accepts(rs, tail_window);
    case Variant::LowerDensity:
      // the member floor keeps the chain LowerDensity => Inf; accepting
      // anything the cof rule certifies keeps Cof => LowerDensity
      return static_cast<index_t>(rs.members.size()) >= min_members &&
             (lower_density(rs) >= delta || cof_accepts(rs, tail_window));
  }
  return false;
}

std::string FurstenbergFamily::describe() const {
  std::ostringstream os;
  switch (variant) {
    case Variant::Inf:
      os << "inf(min_members=" << min_members << ")";
      break;
    case Variant::Cof:
      os << "cof(tail_window=" << tail_window << ")";
      break;
    case Variant::LowerDensity:
      os << "lower_density(delta=" << delta << ",min_members=" << min_members << ")";
      break;
  }
  return os.str();
}

bool DecayColumn::decayed(double tol) const {
  if (values.empty()) return false;
  if (!(values.back() < tol)) return false;
  for (std::size_t i = std::max<std::size_t>(1, values.size() / 2); i < values.size(); ++i) {
    if (values[i] > values[i - 1] * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

std::vector<double> product_norm_series(const WeightSequencePtr& W, index_t j, index_t n,
                                        const Operator& D, std::size_t L, bool forward) {
  if (n < 1) throw InvalidParameter("series step must be positive");
  std::vector<double> norms;
  norms.reserve(L);
  if (D.single_shift()) {
    const BasisShiftOp& d = D.terms().front();
    if (!d.support.finite()) {
      throw InvalidParameter("series evaluation requires finite-support approximants");
    }
    struct Col {
      double base;
      WalkState st;
    };
    std::vector<Col> cols;
    for (index_t p = d.support.lo; p <= d.support.hi; ++p) {
      const double b = d.at(p);
      if (b == 0.0) continue;
      Col c;
      c.base = b;
      c.st.index = p + d.offset;
      cols.push_back(c);
    }
    for (std::size_t l = 1; l <= L; ++l) {
      double best = 0.0;
      for (auto& c : cols) {
        if (forward) {
          walk_forward(*W, j, c.st, n);
        } else {
          walk_backward(*W, j, c.st, n);
        }
        best = std::max(best, std::abs(c.base * c.st.coeff));
      }
      norms.push_back(best);
    }
    return norms;
  }
  for (std::size_t l = 1; l <= L; ++l) {
    const index_t count = n * static_cast<index_t>(l);
    norms.push_back(forward ? forward_product_norm(W, j, count, D)
                            : backward_product_norm(W, j, count, D));
  }
  return norms;
}

namespace {

std::vector<double> squared(std::vector<double> v) {
  for (double& x : v) x *= x;
  return v;
}

// Per-column running squared sums for the operator-valued Gram series; the
// operator-norm Cauchy difference over the last quarter is the worst column
// increase because the terms are positive diagonals.
struct GramSeriesEvidence {
  std::vector<double> term_norms;
  double tail_increase = 0.0;
};

GramSeriesEvidence gram_series(const WeightSequencePtr& W, index_t j, index_t n,
                               const Operator& D, std::size_t L, bool forward) {
  GramSeriesEvidence out;
  if (!D.single_shift()) {
    out.term_norms = squared(product_norm_series(W, j, n, D, L, forward));
    const std::size_t tail_start = L - std::max<std::size_t>(1, L / 4);
    for (std::size_t i = tail_start; i < out.term_norms.size(); ++i) {
      out.tail_increase += out.term_norms[i];  // upper bound for sums of terms
    }
    return out;
  }
  const BasisShiftOp& d = D.terms().front();
  if (!d.support.finite()) {
    throw InvalidParameter("series evaluation requires finite-support approximants");
  }
  struct Col {
    double base;
    WalkState st;
    double sum = 0.0;
    double sum_at_tail = 0.0;
  };
  std::vector<Col> cols;
  for (index_t p = d.support.lo; p <= d.support.hi; ++p) {
    const double b = d.at(p);
    if (b == 0.0) continue;
    Col c;
    c.base = b;
    c.st.index = p + d.offset;
    cols.push_back(c);
  }
  const std::size_t tail_start = L - std::max<std::size_t>(1, L / 4);
  out.term_norms.reserve(L);
  for (std::size_t l = 1; l <= L; ++l) {
    double best = 0.0;
    for (auto& c : cols) {
      if (forward) {
        walk_forward(*W, j, c.st, n);
      } else {
        walk_backward(*W, j, c.st, n);
      }
      const double sq = c.base * c.st.coeff * c.base * c.st.coeff;
      c.sum += sq;
      best = std::max(best, sq);
      if (l == tail_start) c.sum_at_tail = c.sum;
    }
    out.term_norms.push_back(best);
  }
  for (const auto& c : cols) {
    const double base_sum = tail_start == 0 ? 0.0 : c.sum_at_tail;
    out.tail_increase = std::max(out.tail_increase, c.sum - base_sum);
  }
  return out;
}

std::string j_tag(index_t j) { return "[j=" + std::to_string(j) + "]"; }

void fold_series_verdict(const SeriesReport& r, bool& all_converge, bool& any_diverge) {
  if (r.verdict != SeriesVerdict::Converges) all_converge = false;
  if (r.verdict == SeriesVerdict::Diverges) any_diverge = true;
}

}  // namespace

FhcVerdict check_fhc(const GeneralizedShift& shift, index_t J, index_t m,
                     const IncreasingSequence& nk, const ApproximantFamily& approx,
                     const FhcOptions& opts) {
  if (J < 0 || m < 1) throw InvalidParameter("window parameters require J >= 0 and m >= 1");
  if (opts.k_count < 1 || opts.L_max < 4) {
    throw InvalidParameter("criterion horizons require k_count >= 1 and L_max >= 4");
  }
  FhcVerdict out;
  const Operator pm = Operator::projection(m);
  bool all_converge = true;
  bool any_diverge = false;
  for (index_t j = -J; j <= J; ++j) {
    DecayColumn col{"dD" + j_tag(j), {}};
    for (int k = 1; k <= opts.k_count; ++k) {
      const index_t n = nk.value(static_cast<std::size_t>(k - 1));
      if (n < 1) throw InvalidParameter("criterion sequence terms must be positive");
      const Operator D = approx.D(j, k);
      col.values.push_back(operator_norm(subtract(D, pm)));

      FhcSeriesEntry e;
      e.j = j;
      e.k = k;
      e.n_k = n;
      const std::vector<double> fwd = product_norm_series(shift.W, j, n, D, opts.L_max, true);
      const std::vector<double> bwd = product_norm_series(shift.W, j, n, D, opts.L_max, false);
      e.forward_unsquared = classify_series(fwd, opts.series);
      e.forward_squared = classify_series(squared(fwd), opts.series);
      e.backward_squared = classify_series(squared(bwd), opts.series);
      fold_series_verdict(e.forward_squared, all_converge, any_diverge);
      fold_series_verdict(e.backward_squared, all_converge, any_diverge);
      out.entries.push_back(std::move(e));
    }
    out.approximant_columns.push_back(std::move(col));
  }
  bool approx_ok = true;
  bool approx_failed = false;
  for (const auto& col : out.approximant_columns) {
    if (!col.decayed(opts.approx_tol)) approx_ok = false;
    if (!col.values.empty() && !(col.values.back() < opts.approx_tol)) approx_failed = true;
  }
  if (all_converge && approx_ok) {
    out.core.holds = CriterionVerdict::Holds::Yes;
    out.core.implications = {"satisfies the frequent hypercyclicity criterion",
                             "frequently hypercyclic", "chaotic", "topologically mixing"};
  } else if (any_diverge || approx_failed) {
    out.core.holds = CriterionVerdict::Holds::No;
  } else {
    out.core.holds = CriterionVerdict::Holds::Inconclusive;
  }
  out.core.notes.push_back("sequence " + nk.describe() + ", k_count=" +
                           std::to_string(opts.k_count) + ", L_max=" +
                           std::to_string(opts.L_max));
  if (out.core.holds != CriterionVerdict::Holds::Yes) {
    out.core.notes.push_back(
        "the sufficient condition fails at this horizon; this does not decide frequent "
        "hypercyclicity of the operator");
  }
  return out;
}

ChaosVerdict check_chaos_equiv(const GeneralizedShift& shift, index_t J, index_t m,
                               const IncreasingSequence& nk, const ApproximantFamily& approx,
                               const FhcOptions& opts) {
  if (J < 0 || m < 1) throw InvalidParameter("window parameters require J >= 0 and m >= 1");
  const Operator udiff = subtract(shift.U, Operator::identity());
  const double udev = udiff.is_dense()
                          ? operator_norm(udiff)
                          : operator_norm(udiff, Projection{GeneralizedShift::kUnitaryProbeHalfWidth});
  if (udev > GeneralizedShift::kUnitaryTolerance) {
    throw InvalidParameter("chaos equivalence applies to untwisted shifts only (U must be I)");
  }
  ChaosVerdict out;
  const Operator pm = Operator::projection(m);
  bool all_converge = true;
  bool any_diverge = false;
  for (index_t j = -J; j <= J; ++j) {
    DecayColumn col{"dD" + j_tag(j), {}};
    for (int k = 1; k <= opts.k_count; ++k) {
      const index_t n = nk.value(static_cast<std::size_t>(k - 1));
      if (n < 1) throw InvalidParameter("criterion sequence terms must be positive");
      const Operator D = approx.D(j, k);
      col.values.push_back(operator_norm(subtract(D, pm)));

      ChaosSeriesEntry e;
      e.j = j;
      e.k = k;
      e.n_k = n;
      const GramSeriesEvidence fwd = gram_series(shift.W, j, n, D, opts.L_max, true);
      const GramSeriesEvidence bwd = gram_series(shift.W, j, n, D, opts.L_max, false);
      e.forward_op = classify_series(fwd.term_norms, opts.series);
      e.backward_op = classify_series(bwd.term_norms, opts.series);
      e.forward_tail_increase = fwd.tail_increase;
      e.backward_tail_increase = bwd.tail_increase;
      fold_series_verdict(e.forward_op, all_converge, any_diverge);
      fold_series_verdict(e.backward_op, all_converge, any_diverge);
      out.entries.push_back(std::move(e));
    }
    out.approximant_columns.push_back(std::move(col));
  }
  bool approx_ok = true;
  bool approx_failed = false;
  for (const auto& col : out.approximant_columns) {
    if (!col.decayed(opts.approx_tol)) approx_ok = false;
    if (!col.values.empty() && !(col.values.back() < opts.approx_tol)) approx_failed = true;
  }
  if (all_converge && approx_ok) {
    out.core.holds = CriterionVerdict::Holds::Yes;
    out.core.implications = {"chaotic",
                             "chaos is equivalent to the frequent hypercyclicity criterion "
                             "for untwisted shifts",
                             "frequently hypercyclic", "topologically mixing"};
  } else if (any_diverge || approx_failed) {
    out.core.holds = CriterionVerdict::Holds::No;
  } else {
    out.core.holds = CriterionVerdict::Holds::Inconclusive;
  }
  out.core.notes.push_back("sequence " + nk.describe() + ", k_count=" +
                           std::to_string(opts.k_count) + ", L_max=" +
                           std::to_string(opts.L_max));
  if (out.core.holds != CriterionVerdict::Holds::Yes) {
    out.core.notes.push_back(
        "the operator-series condition fails at this horizon; this does not decide chaos");
  }
  return out;
}

StarCheck check_star_condition(const std::vector<Operator>& unitaries, index_t m,
                               index_t Nm_claim, index_t probe_range) {
  if (unitaries.size() < 2) {
    throw InvalidParameter("the orthogonality condition needs at least two unitaries");
  }
  if (m < 1 || Nm_claim < 0 || probe_range < 0) {
    throw InvalidParameter("orthogonality check parameters out of range");
  }
  StarCheck out;
  out.holds = true;
  const Operator pm = Operator::projection(m);
  const int N = static_cast<int>(unitaries.size());
  for (int s = 0; s < N; ++s) {
    for (int l = 0; l < N; ++l) {
      if (s == l) continue;
      const Operator ul_adj = adjoint(unitaries[static_cast<std::size_t>(l)]);
      for (index_t n = Nm_claim; n <= Nm_claim + probe_range; ++n) {
        const Operator twisted =
            compose(pm, compose(unitary_power(unitaries[static_cast<std::size_t>(s)], n),
                                compose(unitary_power(ul_adj, n), pm)));
        const double norm = operator_norm(twisted);
        out.rows.push_back({n, s + 1, l + 1, norm});
        out.worst = std::max(out.worst, norm);
        if (!(norm < StarCheck::kTolerance)) out.holds = false;
      }
    }
  }
  return out;
}

DisjointVerdict check_disjoint(const std::vector<GeneralizedShift>& shifts, index_t J, index_t m,
                               const IncreasingSequence& nk, const ApproximantFamily& approx,
                               const DisjointOptions& opts) {
  const int N = static_cast<int>(shifts.size());
  if (N < 2) throw InvalidParameter("disjointness needs at least two shifts");
  if (J < 0 || m < 1) throw InvalidParameter("window parameters require J >= 0 and m >= 1");
  if (opts.k_count < 1) throw InvalidParameter("k_count must be positive");

  DisjointVerdict out;
  const index_t Nm = opts.Nm_claim < 0 ? 2 * m + 1 : opts.Nm_claim;
  std::vector<Operator> unitaries;
  unitaries.reserve(shifts.size());
  for (const auto& s : shifts) unitaries.push_back(s.U);
  out.star = check_star_condition(unitaries, m, Nm, opts.star_probe);
  if (!out.star.holds) {
    throw StarConditionUnverified("orthogonality condition fails for the supplied unitaries "
                                  "(claimed N_m=" + std::to_string(Nm) + ", worst norm " +
                                  std::to_string(out.star.worst) + ")");
  }

  for (int k = 1; k <= opts.k_count; ++k) {
    out.nk_values.push_back(nk.value(static_cast<std::size_t>(k - 1)));
  }
  const Operator pm = Operator::projection(m);

  auto column = [&](std::string name) {
    out.columns.push_back(DecayColumn{std::move(name), {}});
    return out.columns.size() - 1;
  };

  for (index_t j = -J; j <= J; ++j) {
    const std::size_t dd = column("dD" + j_tag(j));
    for (int k = 1; k <= opts.k_count; ++k) {
      out.columns[dd].values.push_back(operator_norm(subtract(approx.D(j, k), pm)));
    }
    for (int l = 1; l <= N; ++l) {
      const auto& Wl = shifts[static_cast<std::size_t>(l - 1)].W;
      const std::size_t dg = column("dG[l=" + std::to_string(l) + ",j=" + std::to_string(j) + "]");
      const std::size_t fw = column("fwd[l=" + std::to_string(l) + ",j=" + std::to_string(j) + "]");
      const std::size_t bw = column("bwd[l=" + std::to_string(l) + ",j=" + std::to_string(j) + "]");
      for (int k = 1; k <= opts.k_count; ++k) {
        const index_t n = out.nk_values[static_cast<std::size_t>(k - 1)];
        const Operator D = approx.D(j, k);
        const Operator G = approx.G(l, j, k);
        out.columns[dg].values.push_back(operator_norm(subtract(G, pm)));
        out.columns[fw].values.push_back(forward_product_norm(Wl, j, n, D));
        out.columns[bw].values.push_back(backward_product_norm(Wl, j, n, G));
      }
      for (int s = 1; s <= N; ++s) {
        if (s == l) continue;
        const auto& Ws = shifts[static_cast<std::size_t>(s - 1)].W;
        const std::size_t cr = column("cross[s=" + std::to_string(s) + ",l=" + std::to_string(l) +
                                      ",j=" + std::to_string(j) + "]");
        for (int k = 1; k <= opts.k_count; ++k) {
          const index_t n = out.nk_values[static_cast<std::size_t>(k - 1)];
          const Operator G = approx.G(l, j, k);
          const Operator mixed = compose(Operator(forward_chain(Ws, j - n, n)),
                                         compose(Operator(backward_chain(Wl, j, n)), G));
          out.columns[cr].values.push_back(operator_norm(mixed));
        }
      }
    }
  }

  bool all_decay = true;
  bool any_final_large = false;
  for (const auto& col : out.columns) {
    if (!col.decayed(opts.column_tol)) all_decay = false;
    if (!col.values.empty() && !(col.values.back() < opts.column_tol)) any_final_large = true;
  }
  if (all_decay) {
    out.core.holds = CriterionVerdict::Holds::Yes;
    out.core.implications = {"densely disjoint hypercyclic", "disjoint topologically transitive"};
    out.core.notes.push_back(
        "the decay columns involve the weights only, so the verdict holds for every tuple of "
        "unitaries passing the orthogonality check");
  } else if (any_final_large) {
    out.core.holds = CriterionVerdict::Holds::No;
  } else {
    out.core.holds = CriterionVerdict::Holds::Inconclusive;
  }
  if (out.core.holds != CriterionVerdict::Holds::Yes) {
    out.core.notes.push_back("columns fail to decay at this horizon; the tuple is not certified");
  }
  return out;
}

FtransVerdict check_f_transitivity(const GeneralizedShift& shift, const IncreasingSequence& tn,
                                   index_t J, index_t m, const FurstenbergFamily& family,
                                   const ApproximantFamily& approx, double eps, index_t horizon) {
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (J < 0 || m < 1) throw InvalidParameter("window parameters require J >= 0 and m >= 1");
  if (horizon < 1) throw InvalidParameter("horizon must be at least 1");
  FtransVerdict out;
  const Operator pm = Operator::projection(m);
  std::vector<index_t> hits;
  for (index_t n = 0; n <= horizon; ++n) {
    FtransRow row;
    row.n = n;
    row.t_n = tn.value(static_cast<std::size_t>(n));
    for (index_t j = -J; j <= J; ++j) {
      const int k = static_cast<int>(n);
      const Operator D = approx.D(j, k);
      const Operator G = approx.G(0, j, k);
      row.dD = std::max(row.dD, operator_norm(subtract(D, pm)));
      row.dG = std::max(row.dG, operator_norm(subtract(G, pm)));
      row.fwd = std::max(row.fwd, forward_product_norm(shift.W, j, row.t_n, D));
      row.bwd = std::max(row.bwd, backward_product_norm(shift.W, j, row.t_n, G));
    }
    row.hit = row.dD < eps && row.dG < eps && row.fwd < eps && row.bwd < eps;
    if (row.hit) hits.push_back(n);
    out.rows.push_back(row);
  }
  out.hits = ReturnSet::from_members(std::move(hits), horizon);
  if (family.accepts(out.hits)) {
    out.core.holds = CriterionVerdict::Holds::Yes;
    out.core.implications = {"transitive along " + family.describe()};
    if (family.variant == FurstenbergFamily::Variant::Cof) {
      out.core.implications.push_back("topologically mixing");
    }
    if (family.variant == FurstenbergFamily::Variant::Inf) {
      out.core.implications.push_back("topologically transitive");
    }
  } else {
    out.core.holds = CriterionVerdict::Holds::No;
    out.core.notes.push_back(
        "the hit set misses the family at this horizon; this does not refute transitivity");
  }
  return out;
}

UniformConvergenceResult check_uniform_f_convergence(
    const std::vector<std::vector<double>>& distances, const FurstenbergFamily& family,
    double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (distances.empty()) throw InvalidParameter("at least one sequence is required");
  const std::size_t len = distances.front().size();
  if (len == 0) throw InvalidParameter("sequences must be nonempty");
  for (const auto& d : distances) {
    if (d.size() != len) throw InvalidParameter("all sequences must share one horizon");
  }
  UniformConvergenceResult out;
  std::vector<index_t> hits;
  for (std::size_t n = 0; n < len; ++n) {
    bool all = true;
    for (const auto& d : distances) {
      if (!(d[n] < eps)) {
        all = false;
        break;
      }
    }
    if (all) hits.push_back(static_cast<index_t>(n));
  }
  out.common_hits = ReturnSet::from_members(std::move(hits), static_cast<index_t>(len - 1));
  out.holds = family.accepts(out.common_hits);
  return out;
}

SampleSets make_basis_samples(index_t m) {
  SampleSets s;
  for (index_t p = -m; p <= m; ++p) {
    s.forward_samples.push_back(HVector::basis(p));
    s.backward_samples.push_back(HVector::basis(p));
  }
  return s;
}

SampledVerdict check_sampled_transitivity(const GeneralizedShift& shift,
                                          const IncreasingSequence& tn, index_t J,
                                          const std::function<SampleSets(index_t)>& samples,
                                          const FurstenbergFamily& family, double eps,
                                          index_t horizon) {
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (J < 0 || horizon < 1) throw InvalidParameter("window and horizon out of range");
  if (!samples) throw InvalidParameter("sample sets are required");

  std::vector<SampleSets> per_j;
  bool all_empty = true;
  for (index_t j = -J; j <= J; ++j) {
    SampleSets s = samples(j);
    for (const auto* side : {&s.forward_samples, &s.backward_samples}) {
      for (const auto& v : *side) {
        if (v.norm() > 1.0 + 1e-12) {
          throw InvalidParameter("sample vectors must lie in the unit ball");
        }
      }
    }
    if (!s.forward_samples.empty() || !s.backward_samples.empty()) all_empty = false;
    per_j.push_back(std::move(s));
  }

  SampledVerdict out;
  std::vector<index_t> hits;
  for (index_t n = 0; n <= horizon; ++n) {
    SampledRow row;
    row.n = n;
    row.t_n = tn.value(static_cast<std::size_t>(n));
    for (index_t j = -J; j <= J; ++j) {
      const SampleSets& s = per_j[static_cast<std::size_t>(j + J)];
      const Operator fwd(forward_chain(shift.W, j, row.t_n));
      const Operator bwd(backward_chain(shift.W, j, row.t_n));
      for (const auto& x : s.forward_samples) {
        row.fwd = std::max(row.fwd, apply(fwd, x).norm());
      }
      for (const auto& y : s.backward_samples) {
        row.bwd = std::max(row.bwd, apply(bwd, y).norm());
      }
    }
    row.hit = row.fwd < eps && row.bwd < eps;
    if (row.hit) hits.push_back(n);
    out.rows.push_back(row);
  }
  out.hits = ReturnSet::from_members(std::move(hits), horizon);
  if (all_empty) {
    out.core.holds = CriterionVerdict::Holds::Yes;
    out.core.notes.push_back("warning: sample sets are empty, the hypothesis holds vacuously");
  } else if (family.accepts(out.hits)) {
    out.core.holds = CriterionVerdict::Holds::Yes;
  } else {
    out.core.holds = CriterionVerdict::Holds::No;
    out.core.notes.push_back("sampled decay misses the family at this horizon");
  }
  if (out.core.holds == CriterionVerdict::Holds::Yes) {
    out.core.implications = {"transitive along " + family.describe() +
                             " (evidence over the sampled vectors)"};
  }
  out.core.notes.push_back(
      "finite samples cannot certify density of the hypothesis sets; treat as evidence");
  return out;
}

}  // namespace shiftdyn
