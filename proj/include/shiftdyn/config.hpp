#pragma once

#include <string>
#include <vector>

#include "shiftdyn/criteria.hpp"
#include "shiftdyn/shift_dynamics.hpp"

namespace shiftdyn {

/// Weight family selection as it appears in configuration files.
struct FamilyConfig {
  std::string name = "example_3_2";  // example_3_2 | example_3_6 | example_3_11 |
                                     // constant | custom
  double alpha = 2.0;                // example_3_11
  double value = 1.0;                // constant coefficient
  index_t offset = 1;                // constant / custom shift step
  double left = 1.0;                 // custom tail value for negative indices
  double right = 1.0;                // custom tail value for nonnegative indices
  std::map<index_t, double> table;   // custom exceptional coefficients
  std::string unitary = "identity";  // identity | bilateral | bilateral_inverse
};

struct RunConfig {
  std::vector<FamilyConfig> families{FamilyConfig{}};

  index_t truncation_M = 64;
  index_t J = 1;
  index_t m = 1;

  bool seq_arithmetic = true;
  index_t seq_start = 1;
  index_t seq_step = 1;
  std::vector<index_t> seq_list;

  std::size_t L_max = 500;
  index_t N = 200;
  int k_count = 8;

  double eps = 0.1;
  SeriesTolerances series;
  double column_tol = 1e-6;
  double approx_tol = 1e-6;

  FurstenbergFamily furstenberg = FurstenbergFamily::cof();

  index_t star_Nm = -1;  // -1 means 2m+1
  index_t star_probe = 50;

  index_t norms_i_min = 0;
  index_t norms_i_max = 3;
  index_t norms_l_min = 2;
  index_t norms_l_max = 10;

  index_t period_n = 3;
  index_t period_L = 20;

  std::string out_path;       // empty: stdout
  std::string format = "kv";  // kv | csv
};

/// Strict parse: unknown keys anywhere are ConfigInvalid errors.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// Environment overrides for horizons only: SHIFTDYN_L_MAX, SHIFTDYN_N,
/// SHIFTDYN_K_COUNT.
void apply_env_overrides(RunConfig& cfg);

IncreasingSequence config_sequence(const RunConfig& cfg);
GeneralizedShift build_shift(const FamilyConfig& fc);
/// All configured shifts; a single example_3_6 entry expands to its pair.
std::vector<GeneralizedShift> build_shifts(const RunConfig& cfg);

}  // namespace shiftdyn
