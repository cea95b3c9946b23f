#pragma once

#include <functional>
#include <map>
#include <optional>

#include "shiftdyn/operator_core.hpp"

namespace shiftdyn {

/// Finitely supported element of the standard Hilbert module: a map from
/// integer coordinates to operator entries. Absent coordinates are zero.
struct ModuleVector {
  std::map<index_t, Operator> coords;

  bool has(index_t j) const { return coords.count(j) != 0; }
  const Operator& at(index_t j) const;
  void set(index_t j, Operator op) { coords[j] = std::move(op); }
  bool empty() const { return coords.empty(); }

  std::optional<index_t> min_coord() const;
  std::optional<index_t> max_coord() const;
};

ModuleVector add(const ModuleVector& x, const ModuleVector& y);
ModuleVector subtract(const ModuleVector& x, const ModuleVector& y);
/// Keep only the coordinates for which `keep` holds.
ModuleVector restrict_coords(const ModuleVector& x, const std::function<bool(index_t)>& keep);

/// A-valued inner product <x, y> = sum_j x_j^* y_j over the common support.
Operator inner_product(const ModuleVector& x, const ModuleVector& y);

/// Module norm ||<x, x>||^{1/2}.
double module_norm(const ModuleVector& x, const NormOptions& opts = {});

/// Parameters of the dense test family F_{J,m}: vectors supported on
/// [-J, J] whose entries satisfy x_j = P_m x_j.
struct FjmSpec {
  index_t J = 1;
  index_t m = 1;
};

/// Build a vector in F_{J,m}. The default fill puts P_m at every coordinate
/// of [-J, J]; a custom fill is compressed to x_j = P_m * fill(j).
ModuleVector make_fjm_vector(const FjmSpec& spec,
                             const std::function<Operator(index_t)>& fill = nullptr);

}  // namespace shiftdyn
