#include "shiftdyn/module_space.hpp"

#include <cmath>

namespace shiftdyn {

namespace {
const Operator kZero = Operator::zero();
}

const Operator& ModuleVector::at(index_t j) const {
  auto it = coords.find(j);
  return it == coords.end() ? kZero : it->second;
}

std::optional<index_t> ModuleVector::min_coord() const {
  if (coords.empty()) return std::nullopt;
  return coords.begin()->first;
}

std::optional<index_t> ModuleVector::max_coord() const {
  if (coords.empty()) return std::nullopt;
  return coords.rbegin()->first;
}

ModuleVector add(const ModuleVector& x, const ModuleVector& y) {
  ModuleVector out = x;
  for (const auto& [j, op] : y.coords) {
    if (out.has(j)) {
      out.coords[j] = add(out.coords[j], op);
    } else {
      out.coords[j] = op;
    }
  }
  return out;
}

ModuleVector subtract(const ModuleVector& x, const ModuleVector& y) {
  ModuleVector out = x;
  for (const auto& [j, op] : y.coords) {
    if (out.has(j)) {
      out.coords[j] = subtract(out.coords[j], op);
    } else {
      out.coords[j] = scale(op, -1.0);
    }
  }
  return out;
}

ModuleVector restrict_coords(const ModuleVector& x, const std::function<bool(index_t)>& keep) {
  ModuleVector out;
  for (const auto& [j, op] : x.coords) {
    if (keep(j)) out.coords[j] = op;
  }
  return out;
}

Operator inner_product(const ModuleVector& x, const ModuleVector& y) {
  // dense coordinates must share a window; add() enforces that per term
  Operator acc = Operator::zero();
  for (const auto& [j, xj] : x.coords) {
    auto it = y.coords.find(j);
    if (it == y.coords.end()) continue;
    acc = add(acc, compose(adjoint(xj), it->second));
  }
  return acc;
}

double module_norm(const ModuleVector& x, const NormOptions& opts) {
  if (x.empty()) return 0.0;
  const Operator gram = inner_product(x, x);
  if (gram.is_exact() && gram.is_zero_rep()) return 0.0;
  return std::sqrt(operator_norm(gram, std::nullopt, opts));
}

ModuleVector make_fjm_vector(const FjmSpec& spec, const std::function<Operator(index_t)>& fill) {
  if (spec.J < 0 || spec.m < 0) throw InvalidParameter("F_{J,m} parameters must be nonnegative");
  ModuleVector out;
  const Operator pm = Operator::projection(spec.m);
  for (index_t j = -spec.J; j <= spec.J; ++j) {
    out.coords[j] = fill ? compose(pm, fill(j)) : pm;
  }
  return out;
}

}  // namespace shiftdyn
