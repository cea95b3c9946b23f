#include "shiftdyn/run.hpp"

#include <algorithm>
#include <sstream>

#include "shiftdyn/criteria.hpp"
#include "shiftdyn/module_space.hpp"
#include "shiftdyn/witnesses.hpp"

namespace shiftdyn {

namespace {

void echo_config(RunReport& r, const std::string& cmd, const RunConfig& cfg) {
  r.put("report.subcommand", cmd);
  for (std::size_t i = 0; i < cfg.families.size(); ++i) {
    const FamilyConfig& fc = cfg.families[i];
    const std::string p = "config.family." + std::to_string(i) + ".";
    r.put(p + "name", fc.name);
    if (fc.name == "example_3_11") r.put(p + "alpha", fc.alpha);
    if (fc.name == "constant") {
      r.put(p + "value", fc.value);
      r.put(p + "offset", fc.offset);
    }
    if (fc.name == "custom") {
      r.put(p + "offset", fc.offset);
      r.put(p + "left", fc.left);
      r.put(p + "right", fc.right);
      for (const auto& [idx, v] : fc.table) {
        r.put(p + "table." + std::to_string(idx), v);
      }
    }
    r.put(p + "unitary", fc.unitary);
  }
  r.put("config.truncation.M", cfg.truncation_M);
  r.put("config.window.J", cfg.J);
  r.put("config.window.m", cfg.m);
  if (cfg.seq_arithmetic) {
    r.put("config.sequence.start", cfg.seq_start);
    r.put("config.sequence.step", cfg.seq_step);
  } else {
    std::ostringstream os;
    for (std::size_t i = 0; i < cfg.seq_list.size(); ++i) {
      os << (i ? ";" : "") << cfg.seq_list[i];
    }
    r.put("config.sequence.list", os.str());
  }
  r.put("config.horizons.L_max", cfg.L_max);
  r.put("config.horizons.N", cfg.N);
  r.put("config.horizons.k_count", cfg.k_count);
  r.put("config.tolerances.eps", cfg.eps);
  r.put("config.tolerances.divergence_bound", cfg.series.divergence_bound);
  r.put("config.tolerances.cauchy_tol", cfg.series.cauchy_tol);
  r.put("config.tolerances.ratio_margin", cfg.series.ratio_margin);
  r.put("config.tolerances.raabe_convergent", cfg.series.raabe_convergent);
  r.put("config.tolerances.raabe_divergent", cfg.series.raabe_divergent);
  r.put("config.tolerances.zero_floor", cfg.series.zero_floor);
  r.put("config.tolerances.column_tol", cfg.column_tol);
  r.put("config.tolerances.approx_tol", cfg.approx_tol);
  r.put("config.furstenberg", cfg.furstenberg.describe());
  r.put("config.star.Nm", cfg.star_Nm);
  r.put("config.star.probe", cfg.star_probe);
}

void put_verdict(RunReport& r, const CriterionVerdict& v) {
  r.put("verdict.holds", to_string(v.holds));
  for (std::size_t i = 0; i < v.implications.size(); ++i) {
    r.put("verdict.implication." + std::to_string(i), v.implications[i]);
  }
  for (std::size_t i = 0; i < v.notes.size(); ++i) {
    r.put("verdict.note." + std::to_string(i), v.notes[i]);
  }
}

void add_series_rows(ReportTable& t, index_t j, int k, const SeriesReport& s) {
  for (std::size_t l = 0; l < s.terms.size(); ++l) {
    t.rows.push_back({std::to_string(j), std::to_string(k), std::to_string(l + 1),
                      format_double(s.terms[l]), format_double(s.partial_sums[l])});
  }
}

GeneralizedShift single_shift(const RunConfig& cfg, const std::string& cmd) {
  const std::vector<GeneralizedShift> shifts = build_shifts(cfg);
  if (shifts.size() != 1) {
    throw ConfigInvalid("subcommand '" + cmd + "' needs exactly one shift family");
  }
  return shifts.front();
}

double unitary_identity_gap(const GeneralizedShift& shift) {
  const Operator diff = subtract(shift.U, Operator::identity());
  return diff.is_dense()
             ? operator_norm(diff)
             : operator_norm(diff, Projection{GeneralizedShift::kUnitaryProbeHalfWidth});
}

RunReport run_norms(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "norms", cfg);
  const GeneralizedShift shift = single_shift(cfg, "norms");
  if (cfg.norms_l_min < 1 || cfg.norms_l_max < cfg.norms_l_min ||
      cfg.norms_i_max < cfg.norms_i_min) {
    throw ConfigInvalid("norms ranges are empty or out of order");
  }
  ReportTable t{"norms", {"i", "m", "l", "numeric", "closed_form"}, {}};
  double worst_gap = 0.0;
  bool any_closed = false;
  const Operator pm = Operator::projection(cfg.m);
  for (index_t i = cfg.norms_i_min; i <= cfg.norms_i_max; ++i) {
    for (index_t l = cfg.norms_l_min; l <= cfg.norms_l_max; ++l) {
      const double numeric = forward_product_norm(shift.W, i, l, pm);
      std::string closed_cell;
      if (shift.W->name() == "example_3_2") {
        if (const auto closed = example_3_2_closed_form_norm(i, cfg.m, l)) {
          closed_cell = format_double(*closed);
          worst_gap = std::max(worst_gap, std::abs(numeric - *closed));
          any_closed = true;
        }
      }
      t.rows.push_back({std::to_string(i), std::to_string(cfg.m), std::to_string(l),
                        format_double(numeric), closed_cell});
    }
  }
  r.put("norms.rows", t.rows.size());
  if (any_closed) r.put("norms.max_closed_form_gap", worst_gap);
  const auto bounds = shift.W->observed_bounds();
  r.put("norms.observed_weight_sup", bounds.weight_sup);
  r.put("norms.observed_inverse_sup", bounds.inverse_sup);
  r.add_table(std::move(t));
  return r;
}

RunReport run_fhc(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "fhc", cfg);
  const GeneralizedShift shift = single_shift(cfg, "fhc");
  FhcOptions opts;
  opts.k_count = cfg.k_count;
  opts.L_max = cfg.L_max;
  opts.series = cfg.series;
  opts.approx_tol = cfg.approx_tol;
  const FhcVerdict v = check_fhc(shift, cfg.J, cfg.m, config_sequence(cfg),
                                 ApproximantFamily::constant_pm(cfg.m), opts);
  put_verdict(r, v.core);
  ReportTable fwd{"series_fwd_sq", {"j", "k", "l", "term", "partial_sum"}, {}};
  ReportTable bwd{"series_bwd_sq", {"j", "k", "l", "term", "partial_sum"}, {}};
  ReportTable abs{"series_fwd_abs", {"j", "k", "l", "term", "partial_sum"}, {}};
  for (const auto& e : v.entries) {
    const std::string tag =
        "fhc.series[j=" + std::to_string(e.j) + ",k=" + std::to_string(e.k) + "]";
    r.put(tag + ".n_k", e.n_k);
    r.put(tag + ".fwd_sq", to_string(e.forward_squared.verdict));
    r.put(tag + ".bwd_sq", to_string(e.backward_squared.verdict));
    r.put(tag + ".fwd_abs", to_string(e.forward_unsquared.verdict));
    add_series_rows(fwd, e.j, e.k, e.forward_squared);
    add_series_rows(bwd, e.j, e.k, e.backward_squared);
    add_series_rows(abs, e.j, e.k, e.forward_unsquared);
  }
  for (const auto& col : v.approximant_columns) {
    if (!col.values.empty()) r.put("fhc.approx." + col.name + ".final", col.values.back());
  }
  r.add_table(std::move(fwd));
  r.add_table(std::move(bwd));
  r.add_table(std::move(abs));
  return r;
}

RunReport run_chaos(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "chaos", cfg);
  const GeneralizedShift shift = single_shift(cfg, "chaos");
  FhcOptions opts;
  opts.k_count = cfg.k_count;
  opts.L_max = cfg.L_max;
  opts.series = cfg.series;
  opts.approx_tol = cfg.approx_tol;
  const ChaosVerdict v = check_chaos_equiv(shift, cfg.J, cfg.m, config_sequence(cfg),
                                           ApproximantFamily::constant_pm(cfg.m), opts);
  put_verdict(r, v.core);
  ReportTable fwd{"series_fwd_op", {"j", "k", "l", "term", "partial_sum"}, {}};
  ReportTable bwd{"series_bwd_op", {"j", "k", "l", "term", "partial_sum"}, {}};
  for (const auto& e : v.entries) {
    const std::string tag =
        "chaos.series[j=" + std::to_string(e.j) + ",k=" + std::to_string(e.k) + "]";
    r.put(tag + ".n_k", e.n_k);
    r.put(tag + ".fwd_op", to_string(e.forward_op.verdict));
    r.put(tag + ".bwd_op", to_string(e.backward_op.verdict));
    r.put(tag + ".fwd_tail_increase", e.forward_tail_increase);
    r.put(tag + ".bwd_tail_increase", e.backward_tail_increase);
    add_series_rows(fwd, e.j, e.k, e.forward_op);
    add_series_rows(bwd, e.j, e.k, e.backward_op);
  }
  r.add_table(std::move(fwd));
  r.add_table(std::move(bwd));
  return r;
}

void add_star_evidence(RunReport& r, const StarCheck& star) {
  r.put("star.holds", star.holds);
  r.put("star.worst_norm", star.worst);
  ReportTable t{"star", {"n", "s", "l", "norm"}, {}};
  for (const auto& row : star.rows) {
    t.rows.push_back({std::to_string(row.n), std::to_string(row.s), std::to_string(row.l),
                      format_double(row.norm)});
  }
  r.add_table(std::move(t));
}

RunReport run_star(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "star", cfg);
  const std::vector<GeneralizedShift> shifts = build_shifts(cfg);
  if (shifts.size() < 2) {
    throw ConfigInvalid("star needs at least two families (or the built-in pair)");
  }
  std::vector<Operator> unitaries;
  for (const auto& s : shifts) unitaries.push_back(s.U);
  const index_t Nm = cfg.star_Nm < 0 ? 2 * cfg.m + 1 : cfg.star_Nm;
  r.put("star.Nm", Nm);
  const StarCheck star = check_star_condition(unitaries, cfg.m, Nm, cfg.star_probe);
  r.put("verdict.holds", star.holds ? "Yes" : "No");
  add_star_evidence(r, star);
  return r;
}

RunReport run_disjoint(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "disjoint", cfg);
  const std::vector<GeneralizedShift> shifts = build_shifts(cfg);
  DisjointOptions opts;
  opts.k_count = cfg.k_count;
  opts.column_tol = cfg.column_tol;
  opts.Nm_claim = cfg.star_Nm;
  opts.star_probe = cfg.star_probe;
  const DisjointVerdict v = check_disjoint(shifts, cfg.J, cfg.m, config_sequence(cfg),
                                           ApproximantFamily::constant_pm(cfg.m), opts);
  put_verdict(r, v.core);
  add_star_evidence(r, v.star);
  ReportTable t{"columns", {"column", "k", "n_k", "value"}, {}};
  for (const auto& col : v.columns) {
    for (std::size_t k = 0; k < col.values.size(); ++k) {
      t.rows.push_back({col.name, std::to_string(k + 1), std::to_string(v.nk_values[k]),
                        format_double(col.values[k])});
    }
    if (!col.values.empty()) {
      r.put("disjoint.column." + col.name + ".final", col.values.back());
    }
  }
  r.add_table(std::move(t));
  return r;
}

RunReport run_ftrans(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "ftrans", cfg);
  const GeneralizedShift shift = single_shift(cfg, "ftrans");
  const FtransVerdict v =
      check_f_transitivity(shift, config_sequence(cfg), cfg.J, cfg.m, cfg.furstenberg,
                           ApproximantFamily::constant_pm(cfg.m), cfg.eps, cfg.N);
  put_verdict(r, v.core);
  r.put("ftrans.hit_count", v.hits.members.size());
  r.put("ftrans.trailing_run_start", v.hits.trailing_run_start());
  if (v.hits.horizon >= 1) r.put("ftrans.lower_density", lower_density(v.hits));
  ReportTable t{"ftrans", {"n", "dD", "dG", "fwd", "bwd", "hit"}, {}};
  for (const auto& row : v.rows) {
    t.rows.push_back({std::to_string(row.n), format_double(row.dD), format_double(row.dG),
                      format_double(row.fwd), format_double(row.bwd),
                      row.hit ? "1" : "0"});
  }
  r.add_table(std::move(t));
  return r;
}

RunReport run_witness(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "witness", cfg);
  const std::vector<GeneralizedShift> shifts = build_shifts(cfg);
  const FjmSpec spec{cfg.J, cfg.m};
  const ModuleVector x = make_fjm_vector(spec);
  const IncreasingSequence seq = config_sequence(cfg);
  const std::size_t n_targets = shifts.size();

  ReportTable t{"witness", {"n_k", "input_err"}, {}};
  for (std::size_t l = 1; l <= n_targets; ++l) {
    t.columns.push_back("output_err_" + std::to_string(l));
  }
  double worst_in = 0.0;
  double worst_out = 0.0;
  for (int k = 1; k <= cfg.k_count; ++k) {
    const index_t n = seq.value(static_cast<std::size_t>(k - 1));
    WitnessReport wr;
    if (shifts.size() == 1) {
      wr = transitivity_witness(shifts.front(), x, x, n, spec);
    } else {
      const std::vector<ModuleVector> targets(shifts.size(), x);
      DisjointWitnessOptions wopts;
      wopts.Nm_claim = cfg.star_Nm;
      wopts.star_probe = cfg.star_probe;
      wr = disjoint_witness(shifts, x, targets, n, spec, nullptr, nullptr, wopts);
    }
    std::vector<std::string> row{std::to_string(n), format_double(wr.input_error)};
    for (double e : wr.output_errors) row.push_back(format_double(e));
    t.rows.push_back(std::move(row));
    const std::string tag = "witness.k=" + std::to_string(k);
    r.put(tag + ".predicted_input_bound", wr.predicted_input_bound);
    for (std::size_t l = 0; l < wr.predicted_output_bounds.size(); ++l) {
      r.put(tag + ".predicted_output_bound_" + std::to_string(l + 1),
            wr.predicted_output_bounds[l]);
    }
    worst_in = std::max(worst_in, wr.input_error);
    for (double e : wr.output_errors) worst_out = std::max(worst_out, e);
  }
  r.put("witness.max_input_error", worst_in);
  r.put("witness.max_output_error", worst_out);
  r.add_table(std::move(t));
  return r;
}

RunReport run_scan(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "scan", cfg);
  const GeneralizedShift shift = single_shift(cfg, "scan");
  const FjmSpec spec{cfg.J, cfg.m};
  const ModuleVector x = make_fjm_vector(spec);
  const ReturnSet rs = return_set_scan(shift, x, x, spec, cfg.eps, cfg.N);
  r.put("scan.label", "certified members (inner approximation; a miss does not prove "
                      "non-membership)");
  r.put("scan.certified_count", rs.members.size());
  r.put("scan.trailing_run_start", rs.trailing_run_start());
  if (rs.horizon >= 1) r.put("scan.lower_density", lower_density(rs));
  r.put("scan.family", cfg.furstenberg.describe());
  r.put("scan.family_accepts", cfg.furstenberg.accepts(rs));
  ReportTable t{"scan", {"n", "certified"}, {}};
  for (index_t n = 0; n <= rs.horizon; ++n) {
    t.rows.push_back({std::to_string(n), rs.contains(n) ? "1" : "0"});
  }
  r.add_table(std::move(t));
  return r;
}

RunReport run_periodic(const RunConfig& cfg) {
  RunReport r;
  echo_config(r, "periodic", cfg);
  const GeneralizedShift shift = single_shift(cfg, "periodic");
  if (cfg.period_n < 1 || cfg.period_L < 1) {
    throw ConfigInvalid("periodic.n and periodic.L must be positive");
  }
  ModuleVector block;
  block.set(0, Operator::projection(cfg.m));
  const ModuleVector ext = periodic_extension(shift, block, cfg.period_n, cfg.period_L);
  const double residual = periodic_interior_residual(shift, ext, cfg.period_n);
  r.put("periodic.n", cfg.period_n);
  r.put("periodic.L", cfg.period_L);
  r.put("periodic.residual_interior", residual);
  if (unitary_identity_gap(shift) > GeneralizedShift::kUnitaryTolerance) {
    r.put("periodic.note",
          "twisted extension: consistent with the iterate formula, outside the untwisted "
          "periodic-point equivalence");
  }
  ReportTable t{"periodic", {"coordinate", "norm"}, {}};
  for (const auto& [c, op] : ext.coords) {
    t.rows.push_back({std::to_string(c), format_double(operator_norm(op))});
  }
  r.add_table(std::move(t));
  return r;
}

}  // namespace

RunReport run_subcommand(const std::string& subcommand, const RunConfig& cfg) {
  if (subcommand == "norms") return run_norms(cfg);
  if (subcommand == "fhc") return run_fhc(cfg);
  if (subcommand == "chaos") return run_chaos(cfg);
  if (subcommand == "disjoint") return run_disjoint(cfg);
  if (subcommand == "star") return run_star(cfg);
  if (subcommand == "ftrans") return run_ftrans(cfg);
  if (subcommand == "witness") return run_witness(cfg);
  if (subcommand == "scan") return run_scan(cfg);
  if (subcommand == "periodic") return run_periodic(cfg);
  throw ConfigInvalid("unknown subcommand '" + subcommand + "'");
}

}  // namespace shiftdyn
