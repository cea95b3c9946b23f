#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "shiftdyn/module_space.hpp"
#include "shiftdyn/operator_core.hpp"

namespace shiftdyn {

/// Doubly infinite sequence of invertible weights j -> W_j together with the
/// inverse generator. Weights are memoized per index; the running sup of the
/// weight and inverse-weight norms over a probe window is recorded on first
/// access (uniform boundedness can only be monitored, not certified).
class WeightSequence {
 public:
  WeightSequence(std::string name, std::function<BasisShiftOp(index_t)> generator);

  const BasisShiftOp& weight(index_t j) const;
  const BasisShiftOp& inverse_weight(index_t j) const;

  struct ObservedBounds {
    double weight_sup = 0.0;
    double inverse_sup = 0.0;
  };
  ObservedBounds observed_bounds() const;

  const std::string& name() const { return name_; }

  static constexpr index_t kProbeHalfWidth = 32;

 private:
  std::string name_;
  std::function<BasisShiftOp(index_t)> generator_;
  mutable std::unordered_map<index_t, BasisShiftOp> cache_;
  mutable std::unordered_map<index_t, BasisShiftOp> inverse_cache_;
  mutable std::shared_mutex mutex_;
  mutable std::atomic<double> weight_sup_{0.0};
  mutable std::atomic<double> inverse_sup_{0.0};
};

using WeightSequencePtr = std::shared_ptr<const WeightSequence>;

/// Pair (U, W) defining T_{U,W} x at coordinate n as W_n x_{n-1} U and its
/// inverse S_{U,W}. U must act unitarily on the probed basis range.
struct GeneralizedShift {
  Operator U;
  Operator U_adjoint;
  WeightSequencePtr W;
  std::string label;

  GeneralizedShift(Operator u, WeightSequencePtr w, std::string label = "");

  static constexpr index_t kUnitaryProbeHalfWidth = 64;
  static constexpr double kUnitaryTolerance = 1e-12;
};

/// Strictly increasing integer sequence (the n_k of the criteria, or the
/// exponents t_n of the transitivity checks). Indexing is zero-based.
class IncreasingSequence {
 public:
  static IncreasingSequence arithmetic(index_t start, index_t step);
  static IncreasingSequence from_list(std::vector<index_t> terms);

  index_t value(std::size_t i) const;
  std::string describe() const;
  bool is_arithmetic() const { return terms_.empty(); }

 private:
  IncreasingSequence() = default;
  index_t start_ = 0;
  index_t step_ = 1;
  std::vector<index_t> terms_;  // empty for arithmetic
};

/// The approximant operators D_j^{(k)} and G_{l,j}^{(k)} of the criteria.
/// The default family is the constant P_m choice.
struct ApproximantFamily {
  std::function<Operator(index_t j, int k)> D;
  std::function<Operator(int l, index_t j, int k)> G;

  static ApproximantFamily constant_pm(index_t m);
  static ApproximantFamily from_tables(std::map<std::pair<index_t, int>, Operator> d_table,
                                       std::map<std::tuple<int, index_t, int>, Operator> g_table,
                                       index_t fallback_m);
};

/// Incremental coefficient walk through a product of weights. One multiply
/// per factor per tracked basis index; no matrices ever materialize.
struct WalkState {
  double coeff = 1.0;
  index_t index = 0;
  index_t factors = 0;
};

/// Extend a walk through the next `count` factors of W_{j+1}, W_{j+2}, ...
void walk_forward(const WeightSequence& W, index_t j, WalkState& state, index_t count);
/// Extend a walk through the next `count` factors of W_j^{-1}, W_{j-1}^{-1}, ...
void walk_backward(const WeightSequence& W, index_t j, WalkState& state, index_t count);

/// W_{j+count} ... W_{j+1} as an exact lazy operator.
BasisShiftOp forward_chain(const WeightSequencePtr& W, index_t j, index_t count);
/// W_{j-count+1}^{-1} ... W_j^{-1} as an exact lazy operator.
BasisShiftOp backward_chain(const WeightSequencePtr& W, index_t j, index_t count);

/// || W_{j+count} ... W_{j+1} D ||
double forward_product_norm(const WeightSequencePtr& W, index_t j, index_t count,
                            const Operator& D);
/// || W_{j-count+1}^{-1} ... W_j^{-1} G ||
double backward_product_norm(const WeightSequencePtr& W, index_t j, index_t count,
                             const Operator& G);

/// U^n for n >= 0 (exact walk when U is a pure shift).
Operator unitary_power(const Operator& u, index_t n);

ModuleVector apply_T(const GeneralizedShift& shift, const ModuleVector& x);
ModuleVector apply_S(const GeneralizedShift& shift, const ModuleVector& y);
/// Closed-form n-th iterate: (T^n x)_{j+n} = W_{j+n}...W_{j+1} x_j U^n.
ModuleVector iterate_T(const GeneralizedShift& shift, index_t n, const ModuleVector& x);
/// Closed-form n-th inverse iterate: (S^n y)_{j-n} = W_{j-n+1}^{-1}...W_j^{-1} y_j U^{*n}.
ModuleVector iterate_S(const GeneralizedShift& shift, index_t n, const ModuleVector& y);

// Built-in unitaries.
Operator unitary_identity();
Operator unitary_bilateral();          // e_j -> e_{j+1}
Operator unitary_bilateral_inverse();  // e_j -> e_{j-1}

/// Constant weight given by a coefficient table with two tail values:
/// coeff(p) = table[p] if present, else (p < 0 ? left : right).
struct CustomWeightSpec {
  index_t offset = 1;
  double left = 1.0;
  double right = 1.0;
  std::map<index_t, double> table;
};

WeightSequencePtr weights_example_3_2();
/// Closed form of || W_{i+l} ... W_{i+1} P_m || for the example_3_2 weights:
/// (i+m+1)^2 / ((i+1)(i+l+1)) when i >= 0 and l > m, and
/// (m-i)^2 / ((-i)(i+l+1)) when i < 0 and l > m - i. Empty outside those ranges.
std::optional<double> example_3_2_closed_form_norm(index_t i, index_t m, index_t l);
WeightSequencePtr weights_half_double();      // 2 on negatives, 1/2 on nonnegatives, step +1
WeightSequencePtr weights_third_triple_sq();  // square of the 3 / (1/3) weight, step +2
WeightSequencePtr weights_example_3_11(double alpha);
WeightSequencePtr weights_constant(BasisShiftOp op, std::string name = "constant");
WeightSequencePtr weights_custom(const CustomWeightSpec& spec, std::string name = "custom");

GeneralizedShift family_example_3_2(Operator u = unitary_identity());
GeneralizedShift family_example_3_11(double alpha, Operator u = unitary_identity());
GeneralizedShift family_constant(BasisShiftOp weight, Operator u = unitary_identity());

/// The disjoint pair: W^{(1)} constant 2/(1/2) weight, W^{(2)} the square of
/// the 3/(1/3) weight, with unitaries (identity, bilateral shift). The
/// declared orthogonality threshold for L_m is N_m = 2m + 1; it is verified
/// at runtime by the star-condition checker, never assumed.
struct DisjointShiftPair {
  GeneralizedShift first;
  GeneralizedShift second;
  index_t declared_Nm(index_t m) const { return 2 * m + 1; }
};

DisjointShiftPair family_example_3_6();

}  // namespace shiftdyn
