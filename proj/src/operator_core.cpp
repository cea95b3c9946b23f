#include "shiftdyn/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <string>

namespace shiftdyn {

Support Support::intersect(const Support& a, const Support& b) {
  if (a.empty() || b.empty()) return none();
  if (a.kind == Kind::All) return b;
  if (b.kind == Kind::All) return a;
  return interval(std::max(a.lo, b.lo), std::min(a.hi, b.hi));
}

Support Support::hull(const Support& a, const Support& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.kind == Kind::All || b.kind == Kind::All) return all();
  return interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

BasisShiftOp BasisShiftOp::identity() {
  return {0, [](index_t) { return 1.0; }, Support::all()};
}

BasisShiftOp BasisShiftOp::zero() {
  return {0, [](index_t) { return 0.0; }, Support::none()};
}

BasisShiftOp BasisShiftOp::projection(index_t m) {
  if (m < 0) throw InvalidParameter("projection rank parameter must be nonnegative");
  return {0, [m](index_t j) { return (j >= -m && j <= m) ? 1.0 : 0.0; },
          Support::interval(-m, m)};
}

BasisShiftOp BasisShiftOp::constant(index_t offset, double value) {
  return {offset, [value](index_t) { return value; }, Support::all()};
}

BasisShiftOp BasisShiftOp::basis_projector(index_t p) {
  return {0, [p](index_t j) { return j == p ? 1.0 : 0.0; }, Support::interval(p, p)};
}

BasisShiftOp compose(const BasisShiftOp& a, const BasisShiftOp& b) {
  // (a o b) e_j = b.coeff(j) * a.coeff(j + b.offset) * e_{j + a.offset + b.offset}
  BasisShiftOp out;
  out.offset = a.offset + b.offset;
  out.support = Support::intersect(b.support, a.support.shifted(-b.offset));
  out.coeff = [ac = a.coeff, bc = b.coeff, d = b.offset](index_t j) {
    return bc(j) * ac(j + d);
  };
  return out;
}

BasisShiftOp adjoint(const BasisShiftOp& a) {
  BasisShiftOp out;
  out.offset = -a.offset;
  out.support = a.support.shifted(a.offset);
  // real scalars: adjoint coefficient is c(j - offset)
  out.coeff = [c = a.coeff, d = a.offset](index_t j) { return c(j - d); };
  return out;
}

BasisShiftOp inverse(const BasisShiftOp& a) {
  BasisShiftOp out;
  out.offset = -a.offset;
  out.support = a.support.shifted(a.offset);
  out.coeff = [c = a.coeff, d = a.offset](index_t j) {
    const double den = c(j - d);
    if (den == 0.0) {
      throw InvalidParameter("shift operator is not invertible at index " + std::to_string(j - d));
    }
    return 1.0 / den;
  };
  return out;
}

BasisShiftOp add_same_offset(const BasisShiftOp& a, const BasisShiftOp& b) {
  if (a.offset != b.offset) throw InvalidParameter("shift sum requires equal offsets");
  BasisShiftOp out;
  out.offset = a.offset;
  out.support = Support::hull(a.support, b.support);
  out.coeff = [ac = a.coeff, bc = b.coeff](index_t j) { return ac(j) + bc(j); };
  return out;
}

BasisShiftOp scale(const BasisShiftOp& a, double factor) {
  BasisShiftOp out = a;
  out.coeff = [c = a.coeff, factor](index_t j) { return factor * c(j); };
  return out;
}

DenseOp DenseOp::zero(IndexWindow w) {
  return {w, Eigen::MatrixXd::Zero(w.dim(), w.dim())};
}

Operator::Operator(BasisShiftOp term) : rep_(std::vector<BasisShiftOp>{}) {
  if (!term.support.empty()) rep_ = std::vector<BasisShiftOp>{std::move(term)};
}

Operator::Operator(std::vector<BasisShiftOp> terms) : rep_(std::vector<BasisShiftOp>{}) {
  // merge by offset so the exact representation stays canonical
  std::map<index_t, std::vector<BasisShiftOp>> by_offset;
  for (auto& t : terms) {
    if (t.support.empty()) continue;
    by_offset[t.offset].push_back(std::move(t));
  }
  std::vector<BasisShiftOp> merged;
  merged.reserve(by_offset.size());
  for (auto& [off, group] : by_offset) {
    BasisShiftOp acc = std::move(group.front());
    for (std::size_t i = 1; i < group.size(); ++i) acc = add_same_offset(acc, group[i]);
    merged.push_back(std::move(acc));
  }
  rep_ = std::move(merged);
}

std::vector<std::pair<index_t, double>> Operator::column(index_t j) const {
  std::vector<std::pair<index_t, double>> out;
  if (is_dense()) {
    const DenseOp& d = dense();
    if (!d.window.contains(j)) return out;
    for (index_t r = -d.window.M; r <= d.window.M; ++r) {
      const double v = d.at(r, j);
      if (v != 0.0) out.emplace_back(r, v);
    }
    return out;
  }
  for (const auto& t : terms()) {
    const double v = t.at(j);
    if (v != 0.0) out.emplace_back(j + t.offset, v);
  }
  std::sort(out.begin(), out.end());
  // collapse duplicate rows (cannot happen for distinct offsets, kept for safety)
  std::vector<std::pair<index_t, double>> dedup;
  for (const auto& [r, v] : out) {
    if (!dedup.empty() && dedup.back().first == r) {
      dedup.back().second += v;
    } else {
      dedup.emplace_back(r, v);
    }
  }
  return dedup;
}

Support Operator::column_support() const {
  Support s = Support::none();
  for (const auto& t : terms()) s = Support::hull(s, t.support);
  return s;
}

namespace {

DenseOp compose_shift_dense(const BasisShiftOp& a, const DenseOp& b) {
  // rows of b get shifted by a.offset and scaled by a.coeff(row)
  DenseOp out = DenseOp::zero(b.window);
  const index_t M = b.window.M;
  for (index_t p = -M; p <= M; ++p) {
    const double c = a.at(p);
    if (c == 0.0) continue;
    const index_t target = p + a.offset;
    const bool in = b.window.contains(target);
    for (index_t q = -M; q <= M; ++q) {
      const double v = b.at(p, q);
      if (v == 0.0) continue;
      if (!in) {
        throw WindowOverflow("composition maps basis index " + std::to_string(p) +
                             " to " + std::to_string(target) + " outside window M=" +
                             std::to_string(M));
      }
      out.entries(b.window.slot(target), b.window.slot(q)) += c * v;
    }
  }
  return out;
}

DenseOp compose_dense_shift(const DenseOp& a, const BasisShiftOp& b) {
  // column q of the result is b.coeff(q) times column q+b.offset of a
  DenseOp out = DenseOp::zero(a.window);
  const index_t M = a.window.M;
  for (index_t q = -M; q <= M; ++q) {
    const double c = b.at(q);
    if (c == 0.0) continue;
    const index_t src = q + b.offset;
    if (!a.window.contains(src)) {
      throw WindowOverflow("composition needs column " + std::to_string(src) +
                           " outside window M=" + std::to_string(M));
    }
    out.entries.col(a.window.slot(q)) = c * a.entries.col(a.window.slot(src));
  }
  return out;
}

}  // namespace

Operator compose(const Operator& a, const Operator& b) {
  if (a.is_exact() && b.is_exact()) {
    std::vector<BasisShiftOp> out;
    out.reserve(a.terms().size() * b.terms().size());
    for (const auto& ta : a.terms())
      for (const auto& tb : b.terms()) out.push_back(compose(ta, tb));
    return Operator(std::move(out));
  }
  if (a.is_exact()) {
    const DenseOp& db = b.dense();
    DenseOp acc = DenseOp::zero(db.window);
    for (const auto& t : a.terms()) acc.entries += compose_shift_dense(t, db).entries;
    return Operator(std::move(acc));
  }
  if (b.is_exact()) {
    const DenseOp& da = a.dense();
    DenseOp acc = DenseOp::zero(da.window);
    for (const auto& t : b.terms()) acc.entries += compose_dense_shift(da, t).entries;
    return Operator(std::move(acc));
  }
  if (!(a.dense().window == b.dense().window)) {
    throw InvalidParameter("dense composition requires matching windows");
  }
  DenseOp out{a.dense().window, a.dense().entries * b.dense().entries};
  return Operator(std::move(out));
}

Operator adjoint(const Operator& a) {
  if (a.is_dense()) {
    DenseOp out{a.dense().window, a.dense().entries.transpose()};
    return Operator(std::move(out));
  }
  std::vector<BasisShiftOp> out;
  out.reserve(a.terms().size());
  for (const auto& t : a.terms()) out.push_back(adjoint(t));
  return Operator(std::move(out));
}

Operator add(const Operator& a, const Operator& b) {
  if (a.is_exact() && b.is_exact()) {
    std::vector<BasisShiftOp> out = a.terms();
    out.insert(out.end(), b.terms().begin(), b.terms().end());
    return Operator(std::move(out));
  }
  if (a.is_dense() && b.is_dense()) {
    if (!(a.dense().window == b.dense().window)) {
      throw InvalidParameter("dense addition requires matching windows");
    }
    DenseOp out{a.dense().window, a.dense().entries + b.dense().entries};
    return Operator(std::move(out));
  }
  const Operator& exact = a.is_exact() ? a : b;
  const Operator& dense = a.is_dense() ? a : b;
  DenseOp mat = materialize(exact, dense.dense().window);
  DenseOp out{mat.window, mat.entries + dense.dense().entries};
  return Operator(std::move(out));
}

Operator subtract(const Operator& a, const Operator& b) { return add(a, scale(b, -1.0)); }

Operator scale(const Operator& a, double factor) {
  if (a.is_dense()) {
    DenseOp out{a.dense().window, factor * a.dense().entries};
    return Operator(std::move(out));
  }
  std::vector<BasisShiftOp> out;
  out.reserve(a.terms().size());
  for (const auto& t : a.terms()) out.push_back(scale(t, factor));
  return Operator(std::move(out));
}

DenseOp materialize(const Operator& a, IndexWindow w) {
  DenseOp out = DenseOp::zero(w);
  if (a.is_dense()) {
    const DenseOp& d = a.dense();
    if (d.window.M > w.M) {
      // shrinking would drop entries; only allow if everything dropped is zero
      for (index_t r = -d.window.M; r <= d.window.M; ++r) {
        for (index_t c = -d.window.M; c <= d.window.M; ++c) {
          if (d.at(r, c) != 0.0 && (!w.contains(r) || !w.contains(c))) {
            throw WindowOverflow("dense operator does not fit in the requested window");
          }
        }
      }
    }
    const index_t span = std::min(d.window.M, w.M);
    for (index_t r = -span; r <= span; ++r)
      for (index_t c = -span; c <= span; ++c) out.entries(w.slot(r), w.slot(c)) = d.at(r, c);
    return out;
  }
  for (const auto& t : a.terms()) {
    for (index_t j = -w.M; j <= w.M; ++j) {
      const double v = t.at(j);
      if (v == 0.0) continue;
      const index_t target = j + t.offset;
      if (!w.contains(target)) {
        throw WindowOverflow("materialization maps e_" + std::to_string(j) + " to index " +
                             std::to_string(target) + " outside window M=" + std::to_string(w.M));
      }
      out.entries(w.slot(target), w.slot(j)) += v;
    }
  }
  return out;
}

namespace {

Eigen::VectorXd deterministic_start(Eigen::Index dim, int variant) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v(i) = variant == 0 ? 1.0 + 1e-3 * static_cast<double>(i % 7)
                        : ((i % 2 == 0) ? 1.0 : -1.0) + 1e-3 * static_cast<double>(i % 5);
  }
  v.normalize();
  return v;
}

// Largest eigenvalue of a symmetric PSD matrix given through its matvec.
// Plain power iteration first; a Rayleigh value is only accepted when the
// eigen-residual confirms it. Clustered top eigenvalues stall the plain
// phase, so the fallback sharpens the spectral gap by repeated squaring of
// the explicit matrix before reading off the Rayleigh quotient.
double sym_top_eigenvalue(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& mv,
                          Eigen::Index dim,
                          const std::function<Eigen::MatrixXd()>& explicit_matrix,
                          const NormOptions& opts) {
  if (dim == 0) return 0.0;
  const std::size_t plain_cap = std::min<std::size_t>(opts.max_iterations, 2000);
  double best = 0.0;
  bool accepted = false;
  for (int start = 0; start < 2; ++start) {
    Eigen::VectorXd v = deterministic_start(dim, start);
    double lambda = 0.0;
    int settled = 0;
    bool zero = false;
    for (std::size_t it = 0; it < plain_cap; ++it) {
      const Eigen::VectorXd w = mv(v);
      const double wn = w.norm();
      if (wn <= 1e-300) {
        zero = true;
        break;
      }
      v = w / wn;
      const double next = v.dot(mv(v));
      if (std::abs(next - lambda) <= opts.sv_tolerance * std::max(std::abs(next), 1.0)) {
        ++settled;
      } else {
        settled = 0;
      }
      lambda = next;
      if (settled >= 8) break;
    }
    if (zero) {
      accepted = true;  // this start found the zero operator
      continue;
    }
    if (!std::isfinite(lambda)) continue;
    const Eigen::VectorXd residual = mv(v) - lambda * v;
    if (residual.norm() <= 1e-10 * std::max(std::abs(lambda), 1.0)) {
      accepted = true;
      best = std::max(best, lambda);
    }
  }
  if (accepted) return std::max(best, 0.0);

  const Eigen::MatrixXd m = explicit_matrix();
  const double scale = m.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) {
    throw NonConvergence("singular-value iteration met a non-finite matrix");
  }
  if (!(scale > 1e-300)) return 0.0;
  Eigen::MatrixXd b = m / scale;
  for (int s = 0; s < 60; ++s) {
    b = b * b;
    const double top = b.cwiseAbs().maxCoeff();
    if (!(top > 1e-300)) break;
    if (!std::isfinite(top)) {
      throw NonConvergence("singular-value iteration met a non-finite matrix");
    }
    b /= top;
  }
  Eigen::VectorXd v = b * deterministic_start(dim, 0);
  if (v.norm() <= 1e-300) v = b * deterministic_start(dim, 1);
  if (!(v.norm() > 1e-300) || !std::isfinite(v.norm())) {
    throw NonConvergence("singular-value iteration exceeded " +
                         std::to_string(opts.max_iterations) + " iterations");
  }
  v.normalize();
  double lambda = v.dot(mv(v));
  for (int it = 0; it < 64; ++it) {
    const Eigen::VectorXd u = mv(v);
    const double un = u.norm();
    if (un <= 1e-300) return 0.0;
    v = u / un;
    lambda = v.dot(mv(v));
  }
  if (!std::isfinite(lambda)) {
    throw NonConvergence("singular-value iteration exceeded " +
                         std::to_string(opts.max_iterations) + " iterations");
  }
  return std::max(lambda, 0.0);
}

}  // namespace

double psd_top_eigenvalue(const Eigen::MatrixXd& m, const NormOptions& opts) {
  return sym_top_eigenvalue([&m](const Eigen::VectorXd& x) { return (m * x).eval(); }, m.rows(),
                            [&m] { return m; }, opts);
}

namespace {

double dense_norm(const DenseOp& d, const NormOptions& opts) {
  if (d.entries.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Eigen::Index dim = d.entries.cols();
  std::vector<Eigen::Index> nnz;
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (d.entries.col(c).cwiseAbs().maxCoeff() != 0.0) nnz.push_back(c);
  }
  // zero columns contribute zero rows and columns to A^T A, so the iteration
  // can run on the Gram of the nonzero columns alone
  if (static_cast<Eigen::Index>(nnz.size()) * 4 <= dim) {
    const Eigen::Index k = static_cast<Eigen::Index>(nnz.size());
    Eigen::MatrixXd gram(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = a; b < k; ++b) {
        const double dot = d.entries.col(nnz[static_cast<std::size_t>(a)])
                               .dot(d.entries.col(nnz[static_cast<std::size_t>(b)]));
        gram(a, b) = dot;
        gram(b, a) = dot;
      }
    }
    return std::sqrt(psd_top_eigenvalue(gram, opts));
  }
  const double top = sym_top_eigenvalue(
      [&d](const Eigen::VectorXd& x) {
        return (d.entries.transpose() * (d.entries * x)).eval();
      },
      d.entries.cols(), [&d] { return (d.entries.transpose() * d.entries).eval(); }, opts);
  return std::sqrt(top);
}

// Norm of an exact shift sum with finite column support: power iteration on
// the Gram matrix of its columns.
double shift_sum_norm(const Operator& a, const NormOptions& opts) {
  const Support cols = a.column_support();
  if (cols.empty()) return 0.0;
  const index_t n = cols.hi - cols.lo + 1;
  if (n > 100000) throw InvalidParameter("column support too large for norm computation");
  std::vector<std::vector<std::pair<index_t, double>>> columns;
  columns.reserve(static_cast<std::size_t>(n));
  for (index_t j = cols.lo; j <= cols.hi; ++j) columns.push_back(a.column(j));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (index_t p = 0; p < n; ++p) {
    for (index_t q = p; q < n; ++q) {
      double dot = 0.0;
      auto itp = columns[p].begin();
      auto itq = columns[q].begin();
      while (itp != columns[p].end() && itq != columns[q].end()) {
        if (itp->first < itq->first) {
          ++itp;
        } else if (itq->first < itp->first) {
          ++itq;
        } else {
          dot += itp->second * itq->second;
          ++itp;
          ++itq;
        }
      }
      gram(p, q) = dot;
      gram(q, p) = dot;
    }
  }
  return std::sqrt(psd_top_eigenvalue(gram, opts));
}

}  // namespace

double HVector::norm() const {
  double sq = 0.0;
  for (const auto& [p, v] : coeffs) sq += v * v;
  return std::sqrt(sq);
}

HVector apply(const Operator& a, const HVector& x) {
  HVector out;
  for (const auto& [p, v] : x.coeffs) {
    if (v == 0.0) continue;
    for (const auto& [row, c] : a.column(p)) out.coeffs[row] += c * v;
  }
  return out;
}

double operator_norm(const Operator& a, std::optional<Projection> restriction,
                     const NormOptions& opts) {
  const Operator* target = &a;
  Operator restricted;
  if (restriction.has_value()) {
    restricted = compose(a, Operator::projection(restriction->m));
    target = &restricted;
  }
  if (target->is_dense()) return dense_norm(target->dense(), opts);
  if (target->is_zero_rep()) return 0.0;
  const Support cols = target->column_support();
  if (!cols.finite()) {
    throw InvalidParameter("operator norm requires a restriction or finite coefficient support");
  }
  if (target->single_shift()) {
    // images of distinct basis vectors are orthogonal: norm = max |coeff|
    const BasisShiftOp& t = target->terms().front();
    double best = 0.0;
    for (index_t j = cols.lo; j <= cols.hi; ++j) best = std::max(best, std::abs(t.at(j)));
    return best;
  }
  return shift_sum_norm(*target, opts);
}

}  // namespace shiftdyn
