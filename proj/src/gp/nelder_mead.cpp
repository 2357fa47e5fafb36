#include "seqbench/gp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace seqbench::gp {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const std::vector<double>& lower,
                             const std::vector<double>& upper, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  int evaluations = 0;
  auto project = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  };
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  start = project(std::move(start));
  simplex.push_back({start, eval(start)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = start;
    // Step toward whichever bound leaves more room.
    const double step = options.initial_step * (upper[i] - lower[i] > 0 ? 1.0 : 0.0);
    x[i] = (upper[i] - x[i] >= x[i] - lower[i]) ? x[i] + step : x[i] - step;
    x = project(std::move(x));
    simplex.push_back({x, eval(x)});
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  while (evaluations < options.max_evaluations) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    if (std::abs(simplex.back().f - simplex.front().f) <= options.tolerance) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (simplex.back().x[i] - centroid[i]);
      return project(std::move(x));
    };

    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < simplex.front().f) {
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < simplex[n - 1].f) {
      simplex.back() = {xr, fr};
      continue;
    }
    const bool outside = fr < simplex.back().f;
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < std::min(fr, simplex.back().f)) {
      simplex.back() = {xc, fc};
      continue;
    }
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t i = 0; i < n; ++i) {
        simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
      }
      simplex[v].x = project(std::move(simplex[v].x));
      simplex[v].f = eval(simplex[v].x);
    }
  }
  const auto best = std::min_element(simplex.begin(), simplex.end(), by_value);
  return {best->x, best->f, evaluations};
}

}  // namespace seqbench::gp
