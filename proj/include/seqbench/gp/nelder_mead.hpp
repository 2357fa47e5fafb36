#pragma once

#include <functional>
#include <vector>

namespace seqbench::gp {

struct NelderMeadOptions {
  int max_evaluations = 200;
  /// Stop once the spread of simplex values falls below this.
  double tolerance = 1e-8;
  double initial_step = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

/// Minimizes f inside the box [lower, upper]; trial points are projected
/// onto the box before evaluation. The returned value is never worse than
/// f(start) after projection.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const std::vector<double>& lower,
                             const std::vector<double>& upper, const NelderMeadOptions& options = {});

}  // namespace seqbench::gp
