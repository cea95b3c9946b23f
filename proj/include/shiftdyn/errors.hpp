#pragma once

#include <stdexcept>
#include <string>

namespace shiftdyn {

// A dense materialization would push an in-window basis vector out of the
// window. Raised instead of silently truncating.
struct WindowOverflow : std::runtime_error {
  explicit WindowOverflow(const std::string& what) : std::runtime_error(what) {}
};

// Singular-value iteration exceeded its iteration cap.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParameter : std::invalid_argument {
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Witness supports would overlap (sequence term too small for the window).
struct SupportCollision : std::runtime_error {
  explicit SupportCollision(const std::string& what) : std::runtime_error(what) {}
};

// A disjointness check was requested before the orthogonality condition on
// the unitaries was verified.
struct StarConditionUnverified : std::runtime_error {
  explicit StarConditionUnverified(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigInvalid : std::runtime_error {
  explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shiftdyn
