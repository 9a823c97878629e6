#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pdsplit/linop.hpp"

namespace pdsplit::app {

struct CheckRow {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SelfCheckOptions {
  std::uint64_t seed = 20240611;
  std::size_t adjoint_pairs = 20;
  // Additional operators put through the adjoint check (used to exercise the
  // failure path with a deliberately wrong operator).
  std::vector<std::pair<std::string, LinearMap>> extra_operators;
};

// max over random pairs of |<Ax, y> - <x, A^* y>| / (1 + ||Ax|| ||y||).
double adjoint_mismatch(const LinearMap& op, std::size_t pairs, std::uint64_t seed);

std::vector<CheckRow> run_self_checks(const SelfCheckOptions& opt = {});

}  // namespace pdsplit::app
