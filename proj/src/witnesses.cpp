#include "shiftdyn/witnesses.hpp"

#include <algorithm>
#include <cmath>

namespace shiftdyn {

PerCoordinateOperators constant_projection_rule(index_t m) {
  return [m](index_t) { return Operator::projection(m); };
}

namespace {

void require_fjm(const ModuleVector& v, const FjmSpec& spec, const char* label) {
  const Operator pm = Operator::projection(spec.m);
  for (const auto& [j, op] : v.coords) {
    if (j < -spec.J || j > spec.J) {
      throw InvalidParameter(std::string(label) + " has support outside [-J, J] at coordinate " +
                             std::to_string(j));
    }
    const double dev = operator_norm(subtract(compose(pm, op), op));
    if (dev > 1e-12) {
      throw InvalidParameter(std::string(label) + " coordinate " + std::to_string(j) +
                             " is not ranged in the projection window (deviation " +
                             std::to_string(dev) + ")");
    }
  }
}

double vector_norm_or_zero(const ModuleVector& v) { return v.empty() ? 0.0 : module_norm(v); }

}  // namespace

ModuleVector periodic_extension(const GeneralizedShift& shift, const ModuleVector& block,
                                index_t n, index_t L) {
  if (n < 1) throw InvalidParameter("period must be positive");
  if (L < 0) throw InvalidParameter("extension count must be nonnegative");
  if (block.empty()) return {};
  const index_t lo = *block.min_coord();
  const index_t hi = *block.max_coord();
  if (hi - lo + 1 > n) {
    throw InvalidParameter("block spans more than one period window");
  }
  ModuleVector out = block;
  for (const auto& [j, yj] : block.coords) {
    for (index_t l = 1; l <= L; ++l) {
      const index_t count = l * n;
      out.coords[j + count] = compose(Operator(forward_chain(shift.W, j, count)),
                                      compose(yj, unitary_power(shift.U, count)));
      out.coords[j - count] = compose(Operator(backward_chain(shift.W, j, count)),
                                      compose(yj, unitary_power(shift.U_adjoint, count)));
    }
  }
  return out;
}

double periodic_interior_residual(const GeneralizedShift& shift, const ModuleVector& extended,
                                  index_t n) {
  if (extended.empty()) return 0.0;
  const index_t lo = *extended.min_coord();
  const index_t hi = *extended.max_coord();
  const ModuleVector iterated = iterate_T(shift, n, extended);
  const ModuleVector diff = subtract(iterated, extended);
  const ModuleVector interior =
      restrict_coords(diff, [&](index_t c) { return c >= lo + n && c <= hi; });
  return vector_norm_or_zero(interior);
}

WitnessReport transitivity_witness(const GeneralizedShift& shift, const ModuleVector& x,
                                   const ModuleVector& y, index_t t_n, const FjmSpec& spec,
                                   const PerCoordinateOperators& D_in,
                                   const PerCoordinateOperators& G_in) {
  if (t_n <= 2 * spec.J) {
    throw SupportCollision("exponent " + std::to_string(t_n) +
                           " does not separate the supports (need > 2J = " +
                           std::to_string(2 * spec.J) + ")");
  }
  require_fjm(x, spec, "source vector");
  require_fjm(y, spec, "target vector");
  const PerCoordinateOperators D = D_in ? D_in : constant_projection_rule(spec.m);
  const PerCoordinateOperators G = G_in ? G_in : constant_projection_rule(spec.m);

  ModuleVector u, v;
  for (const auto& [j, xj] : x.coords) u.coords[j] = compose(D(j), xj);
  for (const auto& [j, yj] : y.coords) v.coords[j] = compose(G(j), yj);

  WitnessReport report;
  report.witness = v.empty() ? u : add(u, iterate_S(shift, t_n, v));
  report.input_error = vector_norm_or_zero(subtract(report.witness, x));
  const ModuleVector image =
      report.witness.empty() ? ModuleVector{} : iterate_T(shift, t_n, report.witness);
  report.output_errors.push_back(vector_norm_or_zero(subtract(image, y)));

  const double a = vector_norm_or_zero(x);
  const double b = vector_norm_or_zero(y);
  const Operator pm = Operator::projection(spec.m);
  double in_bound = 0.0;
  double out_bound = 0.0;
  for (index_t j = -spec.J; j <= spec.J; ++j) {
    const Operator Dj = D(j);
    const Operator Gj = G(j);
    in_bound += operator_norm(subtract(Dj, pm)) * a +
                backward_product_norm(shift.W, j, t_n, Gj) * b;
    out_bound += operator_norm(subtract(Gj, pm)) * b +
                 forward_product_norm(shift.W, j, t_n, Dj) * a;
  }
  report.predicted_input_bound = in_bound;
  report.predicted_output_bounds.push_back(out_bound);
  return report;
}

WitnessReport disjoint_witness(const std::vector<GeneralizedShift>& shifts, const ModuleVector& x,
                               const std::vector<ModuleVector>& targets, index_t n_k,
                               const FjmSpec& spec, const PerCoordinateOperators& D_in,
                               const std::function<Operator(int l, index_t j)>& G_in,
                               const DisjointWitnessOptions& opts) {
  const int N = static_cast<int>(shifts.size());
  if (N < 1) throw InvalidParameter("at least one shift is required");
  if (targets.size() != shifts.size()) {
    throw InvalidParameter("one target vector per shift is required");
  }
  const index_t Nm = opts.Nm_claim < 0 ? 2 * spec.m + 1 : opts.Nm_claim;
  const index_t separation = N >= 2 ? std::max(2 * spec.J, Nm) : 2 * spec.J;
  if (n_k <= separation) {
    throw SupportCollision("exponent " + std::to_string(n_k) + " must exceed " +
                           std::to_string(separation));
  }
  if (N >= 2) {
    std::vector<Operator> unitaries;
    for (const auto& s : shifts) unitaries.push_back(s.U);
    const StarCheck star = check_star_condition(unitaries, spec.m, Nm, opts.star_probe);
    if (!star.holds) {
      throw StarConditionUnverified("orthogonality condition fails (claimed N_m=" +
                                    std::to_string(Nm) + ", worst norm " +
                                    std::to_string(star.worst) + ")");
    }
  }
  require_fjm(x, spec, "source vector");
  for (const auto& t : targets) require_fjm(t, spec, "target vector");

  const PerCoordinateOperators D = D_in ? D_in : constant_projection_rule(spec.m);
  const auto G = G_in ? G_in
                      : [m = spec.m](int, index_t) { return Operator::projection(m); };

  ModuleVector phi;
  for (const auto& [j, xj] : x.coords) phi.coords[j] = compose(D(j), xj);
  for (int l = 1; l <= N; ++l) {
    const auto& target = targets[static_cast<std::size_t>(l - 1)];
    ModuleVector vl;
    for (const auto& [j, yj] : target.coords) vl.coords[j] = compose(G(l, j), yj);
    if (!vl.empty()) {
      phi = add(phi, iterate_S(shifts[static_cast<std::size_t>(l - 1)], n_k, vl));
    }
  }

  WitnessReport report;
  report.witness = phi;
  report.input_error = vector_norm_or_zero(subtract(phi, x));

  const double a = vector_norm_or_zero(x);
  const Operator pm = Operator::projection(spec.m);
  std::vector<double> target_norms;
  for (const auto& t : targets) target_norms.push_back(vector_norm_or_zero(t));

  double in_bound = 0.0;
  for (index_t j = -spec.J; j <= spec.J; ++j) {
    in_bound += operator_norm(subtract(D(j), pm)) * a;
    for (int l = 1; l <= N; ++l) {
      in_bound += backward_product_norm(shifts[static_cast<std::size_t>(l - 1)].W, j, n_k,
                                        G(l, j)) *
                  target_norms[static_cast<std::size_t>(l - 1)];
    }
  }
  report.predicted_input_bound = in_bound;

  for (int l = 1; l <= N; ++l) {
    const auto& shift_l = shifts[static_cast<std::size_t>(l - 1)];
    const ModuleVector image = phi.empty() ? ModuleVector{} : iterate_T(shift_l, n_k, phi);
    report.output_errors.push_back(
        vector_norm_or_zero(subtract(image, targets[static_cast<std::size_t>(l - 1)])));

    double out_bound = 0.0;
    for (index_t j = -spec.J; j <= spec.J; ++j) {
      out_bound += operator_norm(subtract(G(l, j), pm)) *
                   target_norms[static_cast<std::size_t>(l - 1)];
      out_bound += forward_product_norm(shift_l.W, j, n_k, D(j)) * a;
      for (int s = 1; s <= N; ++s) {
        if (s == l) continue;
        const Operator mixed =
            compose(Operator(forward_chain(shift_l.W, j - n_k, n_k)),
                    compose(Operator(backward_chain(shifts[static_cast<std::size_t>(s - 1)].W, j,
                                                    n_k)),
                            G(s, j)));
        out_bound += operator_norm(mixed) * target_norms[static_cast<std::size_t>(s - 1)];
      }
    }
    report.predicted_output_bounds.push_back(out_bound);
  }
  if (N == 1) {
    report.notes.push_back("single shift: coincides with the transitivity witness");
  }
  return report;
}

ReturnSet return_set_scan(const GeneralizedShift& shift, const ModuleVector& x,
                          const ModuleVector& y, const FjmSpec& spec, double eps, index_t horizon,
                          const ScanOptions& opts) {
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (horizon < 0) throw InvalidParameter("horizon must be nonnegative");
  std::vector<index_t> members;
  for (index_t n = 2 * spec.J + 1; n <= horizon; ++n) {
    const WitnessReport wr = transitivity_witness(shift, x, y, n, spec, opts.D, opts.G);
    if (wr.input_error < eps && wr.output_errors.front() < eps) members.push_back(n);
  }
  return ReturnSet::from_members(std::move(members), horizon);
}

}  // namespace shiftdyn
