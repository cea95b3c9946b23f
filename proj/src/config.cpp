#include "shiftdyn/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace shiftdyn {

namespace {

using nlohmann::json;

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigInvalid(where + " must be an object");
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigInvalid("unknown key '" + key + "' in " + where);
  }
}

index_t get_int(const json& obj, const char* key, const std::string& where, index_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigInvalid(where + "." + key + " must be an integer");
  return v.get<index_t>();
}

double get_num(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigInvalid(where + "." + key + " must be a number");
  return v.get<double>();
}

std::string get_str(const json& obj, const char* key, const std::string& where,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigInvalid(where + "." + key + " must be a string");
  return v.get<std::string>();
}

FamilyConfig parse_family(const json& j, const std::string& where) {
  expect_object(j, where);
  expect_keys(j, where,
              {"name", "alpha", "value", "offset", "left", "right", "table", "unitary"});
  FamilyConfig fc;
  fc.name = get_str(j, "name", where, fc.name);
  static const std::vector<std::string> known = {"example_3_2", "example_3_6", "example_3_11",
                                                 "constant", "custom"};
  if (std::find(known.begin(), known.end(), fc.name) == known.end()) {
    throw ConfigInvalid(where + ".name '" + fc.name + "' is not a known family");
  }
  fc.alpha = get_num(j, "alpha", where, fc.alpha);
  fc.value = get_num(j, "value", where, fc.value);
  fc.offset = get_int(j, "offset", where, fc.offset);
  fc.left = get_num(j, "left", where, fc.left);
  fc.right = get_num(j, "right", where, fc.right);
  if (j.contains("table")) {
    const json& t = j.at("table");
    expect_object(t, where + ".table");
    for (const auto& [key, value] : t.items()) {
      std::size_t pos = 0;
      index_t idx = 0;
      try {
        idx = std::stoll(key, &pos);
      } catch (const std::exception&) {
        throw ConfigInvalid(where + ".table key '" + key + "' is not an integer index");
      }
      if (pos != key.size()) {
        throw ConfigInvalid(where + ".table key '" + key + "' is not an integer index");
      }
      if (!value.is_number()) {
        throw ConfigInvalid(where + ".table['" + key + "'] must be a number");
      }
      fc.table[idx] = value.get<double>();
    }
  }
  fc.unitary = get_str(j, "unitary", where, fc.unitary);
  if (fc.unitary != "identity" && fc.unitary != "bilateral" &&
      fc.unitary != "bilateral_inverse") {
    throw ConfigInvalid(where + ".unitary '" + fc.unitary + "' is not a known unitary");
  }
  return fc;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  expect_object(root, "config");
  expect_keys(root, "config",
              {"family", "families", "truncation", "window", "sequence", "horizons",
               "tolerances", "furstenberg", "star", "norms", "periodic", "output"});

  RunConfig cfg;
  if (root.contains("family") && root.contains("families")) {
    throw ConfigInvalid("use either 'family' or 'families', not both");
  }
  if (root.contains("family")) {
    cfg.families = {parse_family(root.at("family"), "family")};
  } else if (root.contains("families")) {
    const json& fs = root.at("families");
    if (!fs.is_array() || fs.empty()) {
      throw ConfigInvalid("'families' must be a nonempty array");
    }
    cfg.families.clear();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      cfg.families.push_back(parse_family(fs.at(i), "families[" + std::to_string(i) + "]"));
    }
  }

  if (root.contains("truncation")) {
    const json& t = root.at("truncation");
    expect_object(t, "truncation");
    expect_keys(t, "truncation", {"M"});
    cfg.truncation_M = get_int(t, "M", "truncation", cfg.truncation_M);
  }
  if (root.contains("window")) {
    const json& w = root.at("window");
    expect_object(w, "window");
    expect_keys(w, "window", {"J", "m"});
    cfg.J = get_int(w, "J", "window", cfg.J);
    cfg.m = get_int(w, "m", "window", cfg.m);
  }
  if (root.contains("sequence")) {
    const json& s = root.at("sequence");
    expect_object(s, "sequence");
    expect_keys(s, "sequence", {"start", "step", "list"});
    if (s.contains("list")) {
      if (s.contains("start") || s.contains("step")) {
        throw ConfigInvalid("sequence takes either start/step or list");
      }
      const json& lst = s.at("list");
      if (!lst.is_array() || lst.empty()) {
        throw ConfigInvalid("sequence.list must be a nonempty array");
      }
      cfg.seq_arithmetic = false;
      cfg.seq_list.clear();
      for (const auto& v : lst) {
        if (!v.is_number_integer()) throw ConfigInvalid("sequence.list entries must be integers");
        cfg.seq_list.push_back(v.get<index_t>());
      }
    } else {
      cfg.seq_start = get_int(s, "start", "sequence", cfg.seq_start);
      cfg.seq_step = get_int(s, "step", "sequence", cfg.seq_step);
    }
  }
  if (root.contains("horizons")) {
    const json& h = root.at("horizons");
    expect_object(h, "horizons");
    expect_keys(h, "horizons", {"L_max", "N", "k_count"});
    cfg.L_max = static_cast<std::size_t>(
        get_int(h, "L_max", "horizons", static_cast<index_t>(cfg.L_max)));
    cfg.N = get_int(h, "N", "horizons", cfg.N);
    cfg.k_count = static_cast<int>(get_int(h, "k_count", "horizons", cfg.k_count));
  }
  if (root.contains("tolerances")) {
    const json& t = root.at("tolerances");
    expect_object(t, "tolerances");
    expect_keys(t, "tolerances",
                {"eps", "divergence_bound", "cauchy_tol", "ratio_margin", "raabe_convergent",
                 "raabe_divergent", "zero_floor", "column_tol", "approx_tol"});
    cfg.eps = get_num(t, "eps", "tolerances", cfg.eps);
    cfg.series.divergence_bound =
        get_num(t, "divergence_bound", "tolerances", cfg.series.divergence_bound);
    cfg.series.cauchy_tol = get_num(t, "cauchy_tol", "tolerances", cfg.series.cauchy_tol);
    cfg.series.ratio_margin = get_num(t, "ratio_margin", "tolerances", cfg.series.ratio_margin);
    cfg.series.raabe_convergent =
        get_num(t, "raabe_convergent", "tolerances", cfg.series.raabe_convergent);
    cfg.series.raabe_divergent =
        get_num(t, "raabe_divergent", "tolerances", cfg.series.raabe_divergent);
    cfg.series.zero_floor = get_num(t, "zero_floor", "tolerances", cfg.series.zero_floor);
    cfg.column_tol = get_num(t, "column_tol", "tolerances", cfg.column_tol);
    cfg.approx_tol = get_num(t, "approx_tol", "tolerances", cfg.approx_tol);
  }
  if (root.contains("furstenberg")) {
    const json& f = root.at("furstenberg");
    expect_object(f, "furstenberg");
    expect_keys(f, "furstenberg", {"variant", "delta", "min_members", "tail_window"});
    const std::string variant = get_str(f, "variant", "furstenberg", "cof");
    if (variant == "inf") {
      cfg.furstenberg = FurstenbergFamily::inf();
    } else if (variant == "cof") {
      cfg.furstenberg = FurstenbergFamily::cof();
    } else if (variant == "lower_density") {
      cfg.furstenberg =
          FurstenbergFamily::lower_density_family(get_num(f, "delta", "furstenberg", 0.5));
    } else {
      throw ConfigInvalid("furstenberg.variant '" + variant + "' is not known");
    }
    cfg.furstenberg.min_members =
        get_int(f, "min_members", "furstenberg", cfg.furstenberg.min_members);
    cfg.furstenberg.tail_window =
        get_int(f, "tail_window", "furstenberg", cfg.furstenberg.tail_window);
  }
  if (root.contains("star")) {
    const json& s = root.at("star");
    expect_object(s, "star");
    expect_keys(s, "star", {"Nm", "probe"});
    cfg.star_Nm = get_int(s, "Nm", "star", cfg.star_Nm);
    cfg.star_probe = get_int(s, "probe", "star", cfg.star_probe);
  }
  if (root.contains("norms")) {
    const json& n = root.at("norms");
    expect_object(n, "norms");
    expect_keys(n, "norms", {"i_min", "i_max", "l_min", "l_max"});
    cfg.norms_i_min = get_int(n, "i_min", "norms", cfg.norms_i_min);
    cfg.norms_i_max = get_int(n, "i_max", "norms", cfg.norms_i_max);
    cfg.norms_l_min = get_int(n, "l_min", "norms", cfg.norms_l_min);
    cfg.norms_l_max = get_int(n, "l_max", "norms", cfg.norms_l_max);
  }
  if (root.contains("periodic")) {
    const json& p = root.at("periodic");
    expect_object(p, "periodic");
    expect_keys(p, "periodic", {"n", "L"});
    cfg.period_n = get_int(p, "n", "periodic", cfg.period_n);
    cfg.period_L = get_int(p, "L", "periodic", cfg.period_L);
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    expect_object(o, "output");
    expect_keys(o, "output", {"path", "format"});
    cfg.out_path = get_str(o, "path", "output", cfg.out_path);
    cfg.format = get_str(o, "format", "output", cfg.format);
    if (cfg.format != "kv" && cfg.format != "csv") {
      throw ConfigInvalid("output.format must be 'kv' or 'csv'");
    }
  }

  if (cfg.J < 1) throw ConfigInvalid("window.J must be at least 1");
  if (cfg.m < 1) throw ConfigInvalid("window.m must be at least 1");
  if (cfg.truncation_M < cfg.m) throw ConfigInvalid("truncation.M must be at least window.m");
  if (!(cfg.eps > 0.0)) throw ConfigInvalid("tolerances.eps must be positive");
  if (cfg.k_count < 1) throw ConfigInvalid("horizons.k_count must be positive");
  if (cfg.L_max < 4) throw ConfigInvalid("horizons.L_max must be at least 4");
  if (cfg.N < 1) throw ConfigInvalid("horizons.N must be at least 1");
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* v = std::getenv("SHIFTDYN_L_MAX")) {
    cfg.L_max = static_cast<std::size_t>(std::stoll(v));
  }
  if (const char* v = std::getenv("SHIFTDYN_N")) {
    cfg.N = std::stoll(v);
  }
  if (const char* v = std::getenv("SHIFTDYN_K_COUNT")) {
    cfg.k_count = static_cast<int>(std::stoll(v));
  }
}

IncreasingSequence config_sequence(const RunConfig& cfg) {
  if (cfg.seq_arithmetic) return IncreasingSequence::arithmetic(cfg.seq_start, cfg.seq_step);
  return IncreasingSequence::from_list(cfg.seq_list);
}

namespace {

Operator build_unitary(const std::string& name) {
  if (name == "identity") return unitary_identity();
  if (name == "bilateral") return unitary_bilateral();
  return unitary_bilateral_inverse();
}

}  // namespace

GeneralizedShift build_shift(const FamilyConfig& fc) {
  const Operator u = build_unitary(fc.unitary);
  if (fc.name == "example_3_2") return family_example_3_2(u);
  if (fc.name == "example_3_11") return family_example_3_11(fc.alpha, u);
  if (fc.name == "constant") {
    return family_constant(BasisShiftOp::constant(fc.offset, fc.value), u);
  }
  if (fc.name == "custom") {
    CustomWeightSpec spec;
    spec.offset = fc.offset;
    spec.left = fc.left;
    spec.right = fc.right;
    spec.table = fc.table;
    return GeneralizedShift(u, weights_custom(spec), "custom");
  }
  throw ConfigInvalid("family '" + fc.name + "' does not define a single shift");
}

std::vector<GeneralizedShift> build_shifts(const RunConfig& cfg) {
  std::vector<GeneralizedShift> out;
  for (const auto& fc : cfg.families) {
    if (fc.name == "example_3_6") {
      const DisjointShiftPair pair = family_example_3_6();
      out.push_back(pair.first);
      out.push_back(pair.second);
    } else {
      out.push_back(build_shift(fc));
    }
  }
  return out;
}

}  // namespace shiftdyn
