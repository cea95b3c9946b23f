#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shiftdyn/criteria.hpp"
#include "shiftdyn/module_space.hpp"
#include "shiftdyn/shift_dynamics.hpp"

namespace shiftdyn {

/// Quantitative record of a constructed witness: the vector itself, the
/// measured approximation errors, and the bounds predicted from the
/// product-norm data it was built from.
struct WitnessReport {
  ModuleVector witness;
  double input_error = 0.0;                    // || witness - x ||
  std::vector<double> output_errors;           // || T_l^{n}(witness) - y^{(l)} ||
  double predicted_input_bound = 0.0;
  std::vector<double> predicted_output_bounds;
  std::vector<std::string> notes;
};

/// Per-coordinate approximants used when building witnesses; the default is
/// the constant projection choice.
using PerCoordinateOperators = std::function<Operator(index_t j)>;

PerCoordinateOperators constant_projection_rule(index_t m);

/// Extend a block supported in one period window to an L-fold truncated
/// periodic point: y_{j+ln} carries the forward weight product and U^{ln},
/// y_{j-ln} the inverse product and the adjoint powers. Exact n-periodicity
/// holds on interior coordinates (everything whose n-shift stays inside).
ModuleVector periodic_extension(const GeneralizedShift& shift, const ModuleVector& block,
                                index_t n, index_t L);

/// || T^n y - y || restricted to the interior coordinates of the truncation.
double periodic_interior_residual(const GeneralizedShift& shift, const ModuleVector& extended,
                                  index_t n);

/// eta_n = u_n + S^{t_n} v_n with (u_n)_j = D_j x_j and (v_n)_j = G_j y_j.
/// Requires t_n > 2J so the two summands cannot collide.
WitnessReport transitivity_witness(const GeneralizedShift& shift, const ModuleVector& x,
                                   const ModuleVector& y, index_t t_n, const FjmSpec& spec,
                                   const PerCoordinateOperators& D = nullptr,
                                   const PerCoordinateOperators& G = nullptr);

struct DisjointWitnessOptions {
  index_t Nm_claim = -1;  // defaults to 2m+1
  index_t star_probe = 25;
};

/// phi_k = u + sum_l S_l^{n_k} v_l targeting one vector per shift. Requires
/// n_k > max(2J, N_m) and the orthogonality condition on the unitaries.
WitnessReport disjoint_witness(const std::vector<GeneralizedShift>& shifts, const ModuleVector& x,
                               const std::vector<ModuleVector>& targets, index_t n_k,
                               const FjmSpec& spec, const PerCoordinateOperators& D = nullptr,
                               const std::function<Operator(int l, index_t j)>& G = nullptr,
                               const DisjointWitnessOptions& opts = {});

struct ScanOptions {
  PerCoordinateOperators D;  // per-coordinate rule reused at every exponent
  PerCoordinateOperators G;
};

/// Certified inner approximation of a return set: n is included iff the
/// transitivity witness for t_n = n lands within eps on both ends. Witness
/// failure never proves non-membership.
ReturnSet return_set_scan(const GeneralizedShift& shift, const ModuleVector& x,
                          const ModuleVector& y, const FjmSpec& spec, double eps, index_t horizon,
                          const ScanOptions& opts = {});

}  // namespace shiftdyn
