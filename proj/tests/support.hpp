#pragma once

#include <memory>
#include <random>
#include <vector>

#include "shiftdyn/module_space.hpp"
#include "shiftdyn/operator_core.hpp"

namespace shiftdyn::testing {

// Max entrywise deviation between the columns of two operators over the
// basis range [-M, M]. Works for exact and dense representations alike and
// never materializes, so full-support shifts compare fine.
inline double window_deviation(const Operator& a, const Operator& b, index_t M) {
  double worst = 0.0;
  for (index_t j = -M; j <= M; ++j) {
    auto ca = a.column(j);
    auto cb = b.column(j);
    std::size_t ia = 0, ib = 0;
    while (ia < ca.size() || ib < cb.size()) {
      if (ib == cb.size() || (ia < ca.size() && ca[ia].first < cb[ib].first)) {
        worst = std::max(worst, std::abs(ca[ia].second));
        ++ia;
      } else if (ia == ca.size() || cb[ib].first < ca[ia].first) {
        worst = std::max(worst, std::abs(cb[ib].second));
        ++ib;
      } else {
        worst = std::max(worst, std::abs(ca[ia].second - cb[ib].second));
        ++ia;
        ++ib;
      }
    }
  }
  return worst;
}

// Random shift term whose image stays inside [-m, m] (so P_m x = x holds).
inline BasisShiftOp random_pm_ranged_term(std::mt19937_64& rng, index_t m) {
  std::uniform_int_distribution<index_t> off(-m, m);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  const index_t d = off(rng);
  const index_t lo = -m - d;
  const index_t hi = m - d;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (index_t j = lo; j <= hi; ++j) values.push_back(val(rng));
  auto table = std::make_shared<const std::vector<double>>(std::move(values));
  BasisShiftOp op;
  op.offset = d;
  op.support = Support::interval(lo, hi);
  op.coeff = [table, lo, hi](index_t j) {
    if (j < lo || j > hi) return 0.0;
    return (*table)[static_cast<std::size_t>(j - lo)];
  };
  return op;
}

// Random element of F_{J,m} with single-shift coordinates.
inline ModuleVector random_fjm(std::mt19937_64& rng, index_t J, index_t m) {
  ModuleVector x;
  for (index_t j = -J; j <= J; ++j) {
    x.coords[j] = Operator(random_pm_ranged_term(rng, m));
  }
  return x;
}

}  // namespace shiftdyn::testing
