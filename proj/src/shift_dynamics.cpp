#include "shiftdyn/shift_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace shiftdyn {

namespace {

void update_max(std::atomic<double>& slot, double value) {
  double cur = slot.load(std::memory_order_relaxed);
  while (value > cur && !slot.compare_exchange_weak(cur, value)) {
  }
}

double probe_norm(const BasisShiftOp& op) {
  double best = 0.0;
  for (index_t p = -WeightSequence::kProbeHalfWidth; p <= WeightSequence::kProbeHalfWidth; ++p) {
    best = std::max(best, std::abs(op.at(p)));
  }
  return best;
}

}  // namespace

WeightSequence::WeightSequence(std::string name, std::function<BasisShiftOp(index_t)> generator)
    : name_(std::move(name)), generator_(std::move(generator)) {
  if (!generator_) throw InvalidParameter("weight sequence requires a generator");
}

const BasisShiftOp& WeightSequence::weight(index_t j) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(j);
    if (it != cache_.end()) return it->second;
  }
  BasisShiftOp op = generator_(j);
  const double bound = probe_norm(op);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(j, std::move(op));
  if (inserted) update_max(weight_sup_, bound);
  return it->second;
}

const BasisShiftOp& WeightSequence::inverse_weight(index_t j) const {
  {
    std::shared_lock lock(mutex_);
    auto it = inverse_cache_.find(j);
    if (it != inverse_cache_.end()) return it->second;
  }
  BasisShiftOp inv = inverse(weight(j));
  const double bound = probe_norm(inv);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = inverse_cache_.emplace(j, std::move(inv));
  if (inserted) update_max(inverse_sup_, bound);
  return it->second;
}

WeightSequence::ObservedBounds WeightSequence::observed_bounds() const {
  return {weight_sup_.load(), inverse_sup_.load()};
}

GeneralizedShift::GeneralizedShift(Operator u, WeightSequencePtr w, std::string label_in)
    : U(std::move(u)), U_adjoint(adjoint(U)), W(std::move(w)), label(std::move(label_in)) {
  if (!W) throw InvalidParameter("generalized shift requires a weight sequence");
  if (label.empty()) label = W->name();
  const Operator left = subtract(compose(U_adjoint, U), Operator::identity());
  const Operator right = subtract(compose(U, U_adjoint), Operator::identity());
  for (const Operator* diff : {&left, &right}) {
    const double dev = diff->is_dense()
                           ? operator_norm(*diff)
                           : operator_norm(*diff, Projection{kUnitaryProbeHalfWidth});
    if (dev > kUnitaryTolerance) {
      throw InvalidParameter("operator is not unitary on the probed basis range (deviation " +
                             std::to_string(dev) + ")");
    }
  }
}

IncreasingSequence IncreasingSequence::arithmetic(index_t start, index_t step) {
  if (step < 1) throw InvalidParameter("sequence step must be positive");
  if (start < 0) throw InvalidParameter("sequence start must be nonnegative");
  IncreasingSequence s;
  s.start_ = start;
  s.step_ = step;
  return s;
}

IncreasingSequence IncreasingSequence::from_list(std::vector<index_t> terms) {
  if (terms.empty()) throw InvalidParameter("sequence list must be nonempty");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] < 0) throw InvalidParameter("sequence terms must be nonnegative");
    if (i > 0 && terms[i] <= terms[i - 1]) {
      throw InvalidParameter("sequence terms must be strictly increasing");
    }
  }
  IncreasingSequence s;
  s.terms_ = std::move(terms);
  return s;
}

index_t IncreasingSequence::value(std::size_t i) const {
  if (!terms_.empty()) {
    if (i >= terms_.size()) {
      throw InvalidParameter("sequence index " + std::to_string(i) + " beyond provided list");
    }
    return terms_[i];
  }
  return start_ + step_ * static_cast<index_t>(i);
}

std::string IncreasingSequence::describe() const {
  std::ostringstream os;
  if (terms_.empty()) {
    os << "arithmetic(start=" << start_ << ",step=" << step_ << ")";
  } else {
    os << "list[";
    for (std::size_t i = 0; i < terms_.size(); ++i) os << (i ? "," : "") << terms_[i];
    os << "]";
  }
  return os.str();
}

ApproximantFamily ApproximantFamily::constant_pm(index_t m) {
  ApproximantFamily f;
  f.D = [m](index_t, int) { return Operator::projection(m); };
  f.G = [m](int, index_t, int) { return Operator::projection(m); };
  return f;
}

ApproximantFamily ApproximantFamily::from_tables(
    std::map<std::pair<index_t, int>, Operator> d_table,
    std::map<std::tuple<int, index_t, int>, Operator> g_table, index_t fallback_m) {
  ApproximantFamily f;
  f.D = [d_table = std::move(d_table), fallback_m](index_t j, int k) {
    auto it = d_table.find({j, k});
    return it == d_table.end() ? Operator::projection(fallback_m) : it->second;
  };
  f.G = [g_table = std::move(g_table), fallback_m](int l, index_t j, int k) {
    auto it = g_table.find({l, j, k});
    return it == g_table.end() ? Operator::projection(fallback_m) : it->second;
  };
  return f;
}

void walk_forward(const WeightSequence& W, index_t j, WalkState& s, index_t count) {
  for (index_t t = 0; t < count; ++t) {
    ++s.factors;
    const BasisShiftOp& w = W.weight(j + s.factors);
    s.coeff *= w.at(s.index);
    s.index += w.offset;
  }
}

void walk_backward(const WeightSequence& W, index_t j, WalkState& s, index_t count) {
  for (index_t t = 0; t < count; ++t) {
    const BasisShiftOp& w = W.inverse_weight(j - s.factors);
    ++s.factors;
    s.coeff *= w.at(s.index);
    s.index += w.offset;
  }
}

BasisShiftOp forward_chain(const WeightSequencePtr& W, index_t j, index_t count) {
  if (count < 0) throw InvalidParameter("chain length must be nonnegative");
  if (count == 0) return BasisShiftOp::identity();
  index_t offset = 0;
  for (index_t t = 1; t <= count; ++t) offset += W->weight(j + t).offset;
  BasisShiftOp out;
  out.offset = offset;
  out.support = Support::all();
  out.coeff = [W, j, count](index_t p) {
    WalkState s;
    s.index = p;
    walk_forward(*W, j, s, count);
    return s.coeff;
  };
  return out;
}

BasisShiftOp backward_chain(const WeightSequencePtr& W, index_t j, index_t count) {
  if (count < 0) throw InvalidParameter("chain length must be nonnegative");
  if (count == 0) return BasisShiftOp::identity();
  index_t offset = 0;
  for (index_t t = 0; t < count; ++t) offset += W->inverse_weight(j - t).offset;
  BasisShiftOp out;
  out.offset = offset;
  out.support = Support::all();
  out.coeff = [W, j, count](index_t p) {
    WalkState s;
    s.index = p;
    walk_backward(*W, j, s, count);
    return s.coeff;
  };
  return out;
}

double forward_product_norm(const WeightSequencePtr& W, index_t j, index_t count,
                            const Operator& D) {
  return operator_norm(compose(Operator(forward_chain(W, j, count)), D));
}

double backward_product_norm(const WeightSequencePtr& W, index_t j, index_t count,
                             const Operator& G) {
  return operator_norm(compose(Operator(backward_chain(W, j, count)), G));
}

Operator unitary_power(const Operator& u, index_t n) {
  if (n < 0) throw InvalidParameter("unitary power expects a nonnegative exponent");
  if (n == 0) return Operator::identity();
  if (u.is_exact() && u.single_shift()) {
    const BasisShiftOp term = u.terms().front();
    BasisShiftOp out;
    out.offset = term.offset * n;
    Support s = term.support;
    if (term.support.finite()) {
      for (index_t t = 1; t < n; ++t) {
        s = Support::intersect(s, term.support.shifted(-t * term.offset));
      }
    }
    out.support = s;
    out.coeff = [term, n](index_t p) {
      double c = 1.0;
      index_t idx = p;
      for (index_t t = 0; t < n; ++t) {
        c *= term.at(idx);
        idx += term.offset;
      }
      return c;
    };
    return out;
  }
  Operator acc = u;
  for (index_t t = 1; t < n; ++t) acc = compose(acc, u);
  return acc;
}

ModuleVector apply_T(const GeneralizedShift& shift, const ModuleVector& x) {
  ModuleVector out;
  for (const auto& [j, xj] : x.coords) {
    out.coords[j + 1] = compose(Operator(shift.W->weight(j + 1)), compose(xj, shift.U));
  }
  return out;
}

ModuleVector apply_S(const GeneralizedShift& shift, const ModuleVector& y) {
  ModuleVector out;
  for (const auto& [j, yj] : y.coords) {
    out.coords[j - 1] =
        compose(Operator(shift.W->inverse_weight(j)), compose(yj, shift.U_adjoint));
  }
  return out;
}

ModuleVector iterate_T(const GeneralizedShift& shift, index_t n, const ModuleVector& x) {
  if (n < 1) throw InvalidParameter("iterate exponent must be at least 1");
  const Operator un = unitary_power(shift.U, n);
  ModuleVector out;
  for (const auto& [j, xj] : x.coords) {
    out.coords[j + n] = compose(Operator(forward_chain(shift.W, j, n)), compose(xj, un));
  }
  return out;
}

ModuleVector iterate_S(const GeneralizedShift& shift, index_t n, const ModuleVector& y) {
  if (n < 1) throw InvalidParameter("iterate exponent must be at least 1");
  const Operator un = unitary_power(shift.U_adjoint, n);
  ModuleVector out;
  for (const auto& [j, yj] : y.coords) {
    out.coords[j - n] = compose(Operator(backward_chain(shift.W, j, n)), compose(yj, un));
  }
  return out;
}

Operator unitary_identity() { return Operator::identity(); }

Operator unitary_bilateral() { return Operator(BasisShiftOp::constant(1, 1.0)); }

Operator unitary_bilateral_inverse() { return Operator(BasisShiftOp::constant(-1, 1.0)); }

namespace {

// Weight family with c_i = i/(i+1) on nonnegative indices and (i+1)/i on
// negative ones for i > 0, W_0 the identity, W_i the inverse of W_{-i} below.
BasisShiftOp ratio_weight_at(index_t i) {
  if (i == 0) return BasisShiftOp::identity();
  if (i > 0) {
    const double d = static_cast<double>(i);
    return {1, [d](index_t p) { return p >= 0 ? d / (d + 1.0) : (d + 1.0) / d; },
            Support::all()};
  }
  return inverse(ratio_weight_at(-i));
}

}  // namespace

WeightSequencePtr weights_example_3_2() {
  return std::make_shared<WeightSequence>("example_3_2", ratio_weight_at);
}

std::optional<double> example_3_2_closed_form_norm(index_t i, index_t m, index_t l) {
  if (m < 1) return std::nullopt;
  const double di = static_cast<double>(i);
  const double dm = static_cast<double>(m);
  const double dl = static_cast<double>(l);
  if (i >= 0 && l > m) {
    return (di + dm + 1.0) * (di + dm + 1.0) / ((di + 1.0) * (di + dl + 1.0));
  }
  // For i < 0 the negative-index factors are inverses of the positive ones
  // and the product telescopes to W_{i+l} ... W_{-i}. On top of l > m - i the
  // closed form needs the deepest walk (from e_{-m}) to cross index zero,
  // i.e. l >= m - 2i - 1; below that the product is too short and the stated
  // value overestimates the norm.
  if (i < 0 && l > m - i && l >= m - 2 * i - 1) {
    return (dm - di) * (dm - di) / ((-di) * (di + dl + 1.0));
  }
  return std::nullopt;
}

WeightSequencePtr weights_half_double() {
  BasisShiftOp op{1, [](index_t p) { return p < 0 ? 2.0 : 0.5; }, Support::all()};
  return weights_constant(std::move(op), "half_double");
}

WeightSequencePtr weights_third_triple_sq() {
  BasisShiftOp op{2,
                  [](index_t p) {
                    auto c = [](index_t q) { return q < 0 ? 3.0 : 1.0 / 3.0; };
                    return c(p) * c(p + 1);
                  },
                  Support::all()};
  return weights_constant(std::move(op), "third_triple_sq");
}

WeightSequencePtr weights_example_3_11(double alpha) {
  if (!(alpha > 1.0)) throw InvalidParameter("alpha must exceed 1");
  BasisShiftOp op{1, [alpha](index_t p) { return p < 0 ? alpha : 1.0 / alpha; },
                  Support::all()};
  std::ostringstream name;
  name << "example_3_11(alpha=" << alpha << ")";
  return weights_constant(std::move(op), name.str());
}

WeightSequencePtr weights_constant(BasisShiftOp op, std::string name) {
  auto holder = std::make_shared<BasisShiftOp>(std::move(op));
  return std::make_shared<WeightSequence>(std::move(name),
                                          [holder](index_t) { return *holder; });
}

WeightSequencePtr weights_custom(const CustomWeightSpec& spec, std::string name) {
  if (spec.left == 0.0 || spec.right == 0.0) {
    throw InvalidParameter("custom weight tail values must be nonzero");
  }
  for (const auto& [p, v] : spec.table) {
    if (v == 0.0) {
      throw InvalidParameter("custom weight table value at index " + std::to_string(p) +
                             " must be nonzero");
    }
  }
  auto table = std::make_shared<const std::map<index_t, double>>(spec.table);
  BasisShiftOp op{spec.offset,
                  [table, left = spec.left, right = spec.right](index_t p) {
                    auto it = table->find(p);
                    if (it != table->end()) return it->second;
                    return p < 0 ? left : right;
                  },
                  Support::all()};
  return weights_constant(std::move(op), std::move(name));
}

GeneralizedShift family_example_3_2(Operator u) {
  return GeneralizedShift(std::move(u), weights_example_3_2(), "example_3_2");
}

GeneralizedShift family_example_3_11(double alpha, Operator u) {
  auto w = weights_example_3_11(alpha);
  std::string label = w->name();
  return GeneralizedShift(std::move(u), std::move(w), std::move(label));
}

GeneralizedShift family_constant(BasisShiftOp weight, Operator u) {
  return GeneralizedShift(std::move(u), weights_constant(std::move(weight)), "constant");
}

DisjointShiftPair family_example_3_6() {
  return {GeneralizedShift(unitary_identity(), weights_half_double(), "example_3_6.w1"),
          GeneralizedShift(unitary_bilateral(), weights_third_triple_sq(), "example_3_6.w2sq")};
}

}  // namespace shiftdyn
