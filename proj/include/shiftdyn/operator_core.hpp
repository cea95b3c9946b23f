#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "shiftdyn/errors.hpp"

namespace shiftdyn {

using index_t = std::int64_t;

/// Symmetric index window [-M, M] used by dense truncations.
struct IndexWindow {
  index_t M = 0;

  bool contains(index_t j) const { return j >= -M && j <= M; }
  index_t dim() const { return 2 * M + 1; }
  // basis index -> matrix row/column
  index_t slot(index_t j) const { return j + M; }
  index_t index_of_slot(index_t s) const { return s - M; }
  bool operator==(const IndexWindow&) const = default;
};

/// Certified superset of the indices where a coefficient function can be
/// nonzero. `All` means no finite certificate is available.
struct Support {
  enum class Kind { All, Interval, Empty };
  Kind kind = Kind::All;
  index_t lo = 0;
  index_t hi = -1;

  static Support all() { return {Kind::All, 0, -1}; }
  static Support none() { return {Kind::Empty, 0, -1}; }
  static Support interval(index_t lo, index_t hi) {
    if (lo > hi) return none();
    return {Kind::Interval, lo, hi};
  }

  bool finite() const { return kind != Kind::All; }
  bool empty() const { return kind == Kind::Empty; }
  bool contains(index_t j) const {
    switch (kind) {
      case Kind::All: return true;
      case Kind::Empty: return false;
      case Kind::Interval: return j >= lo && j <= hi;
    }
    return false;
  }

  Support shifted(index_t d) const {
    if (kind != Kind::Interval) return *this;
    return interval(lo + d, hi + d);
  }

  static Support intersect(const Support& a, const Support& b);
  static Support hull(const Support& a, const Support& b);
};

/// Weighted shift on the basis {e_j}: e_j -> coeff(j) * e_{j + offset}.
/// The coefficient function is total; `support` certifies where it can be
/// nonzero. Values are immutable after construction.
struct BasisShiftOp {
  index_t offset = 0;
  std::function<double(index_t)> coeff;
  Support support = Support::all();

  double at(index_t j) const { return support.contains(j) ? coeff(j) : 0.0; }

  static BasisShiftOp identity();
  static BasisShiftOp zero();
  /// Orthogonal projection P_m onto span{e_{-m}, ..., e_m}.
  static BasisShiftOp projection(index_t m);
  static BasisShiftOp constant(index_t offset, double value);
  /// Rank-one |e_p><e_p|.
  static BasisShiftOp basis_projector(index_t p);
};

BasisShiftOp compose(const BasisShiftOp& a, const BasisShiftOp& b);
BasisShiftOp adjoint(const BasisShiftOp& a);
/// Inverse of an invertible shift. A zero coefficient surfaces as
/// InvalidParameter at the first evaluation that divides by it.
BasisShiftOp inverse(const BasisShiftOp& a);
/// Pointwise sum; both terms must carry the same offset.
BasisShiftOp add_same_offset(const BasisShiftOp& a, const BasisShiftOp& b);
BasisShiftOp scale(const BasisShiftOp& a, double factor);

/// Finite matrix truncation on a symmetric window. Fallback representation
/// for operators without shift structure.
struct DenseOp {
  IndexWindow window;
  Eigen::MatrixXd entries;

  static DenseOp zero(IndexWindow w);
  double at(index_t row, index_t col) const {
    return entries(window.slot(row), window.slot(col));
  }
};

/// Rank-(2m+1) orthogonal projection onto L_m, used as a norm restriction.
struct Projection {
  index_t m = 0;
};

/// Handle for an operator on H: either an exact finite sum of shift terms
/// (distinct offsets) or a dense window truncation. Sums of shift terms keep
/// weight products and witness coordinates exact; anything else drops to
/// dense.
class Operator {
 public:
  Operator() : rep_(std::vector<BasisShiftOp>{}) {}  // zero operator
  Operator(BasisShiftOp term);                       // NOLINT(implicit)
  Operator(DenseOp dense) : rep_(std::move(dense)) {}  // NOLINT(implicit)
  explicit Operator(std::vector<BasisShiftOp> terms);

  static Operator identity() { return Operator(BasisShiftOp::identity()); }
  static Operator zero() { return Operator(); }
  static Operator projection(index_t m) { return Operator(BasisShiftOp::projection(m)); }

  bool is_dense() const { return std::holds_alternative<DenseOp>(rep_); }
  bool is_exact() const { return !is_dense(); }
  bool is_zero_rep() const { return is_exact() && terms().empty(); }
  bool single_shift() const { return is_exact() && terms().size() == 1; }

  const std::vector<BasisShiftOp>& terms() const { return std::get<std::vector<BasisShiftOp>>(rep_); }
  const DenseOp& dense() const { return std::get<DenseOp>(rep_); }

  /// Image of e_j as a list of (basis index, coefficient) pairs.
  std::vector<std::pair<index_t, double>> column(index_t j) const;

  /// Hull of the term supports (exact reps only).
  Support column_support() const;

 private:
  std::variant<std::vector<BasisShiftOp>, DenseOp> rep_;
};

Operator compose(const Operator& a, const Operator& b);
Operator adjoint(const Operator& a);
Operator add(const Operator& a, const Operator& b);
Operator subtract(const Operator& a, const Operator& b);
Operator scale(const Operator& a, double factor);

/// Materialize onto a window. Any nonzero coefficient whose image leaves the
/// window is a hard WindowOverflow, never a silent truncation.
DenseOp materialize(const Operator& a, IndexWindow w);

struct NormOptions {
  double sv_tolerance = 1e-12;  // relative tolerance of the A*A iteration
  std::size_t max_iterations = 100000;
};

/// Operator norm. Exact single-shift operators use the max coefficient
/// magnitude; shift sums use the Gram matrix of their finite column support;
/// dense operators use power iteration on A*A. An unrestricted operator with
/// infinite support is rejected.
double operator_norm(const Operator& a, std::optional<Projection> restriction = std::nullopt,
                     const NormOptions& opts = {});

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double psd_top_eigenvalue(const Eigen::MatrixXd& m, const NormOptions& opts = {});

/// Finitely supported vector in H, kept as index -> coefficient.
struct HVector {
  std::map<index_t, double> coeffs;

  static HVector basis(index_t p) { return {{{p, 1.0}}}; }
  double norm() const;
};

/// Image A x of a finitely supported vector.
HVector apply(const Operator& a, const HVector& x);

}  // namespace shiftdyn
