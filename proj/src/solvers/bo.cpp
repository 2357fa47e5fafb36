#include "seqbench/solvers/bo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "seqbench/core/error.hpp"
#include "seqbench/embedding/one_hot.hpp"

namespace seqbench::solvers {

namespace {

std::size_t argmax_first(const Eigen::VectorXd& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
    }
  }
  return out;
}

Eigen::VectorXd gather(std::span<const double> values, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = values[idx[i]];
  return out;
}

gp::FitOptions fit_options(const GpSettings& settings, std::size_t dimension) {
  gp::FitOptions options;
  options.n_starts = settings.n_starts;
  options.max_evaluations_per_start = settings.max_evaluations_per_start;
  options.prior = gp::LengthscalePrior::for_dimension(dimension, settings.prior_offset, settings.prior_scale);
  return options;
}

/// EI of each candidate under a GP fit to the observations in `subset`.
Eigen::VectorXd score_pool(const Observations& obs, const std::vector<std::size_t>& subset,
                           std::span<const Sequence> pool, const GpSettings& settings,
                           std::size_t dimension, Rng& rng) {
  const Eigen::MatrixXd sqdist = submatrix(obs.sqdist(), subset);
  const Eigen::VectorXd y = gather(obs.scores(), subset);

  const auto fit_idx = select_fit_subset(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                                         settings.max_fit_points, rng);
  const auto fit = gp::fit_hyperparameters(submatrix(sqdist, fit_idx),
                                           gather(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), fit_idx),
                                           fit_options(settings, dimension), rng);
  const auto model = gp::GPModel::from_distances(sqdist, y, fit.hyper);

  std::vector<Sequence> train;
  train.reserve(subset.size());
  for (std::size_t i : subset) train.push_back(obs.sequences()[i]);
  const auto post = model.predict_from_distances(one_hot_sqdist(pool, train));
  const double best = y.maxCoeff();
  Eigen::VectorXd ei(post.mean.size());
  for (Eigen::Index i = 0; i < ei.size(); ++i) {
    ei[i] = gp::expected_improvement(post.mean[i], post.variance[i], best, settings.xi);
  }
  return ei;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

Eigen::MatrixXd one_hot_sqdist(std::span<const Sequence> a, std::span<const Sequence> b) {
  Eigen::MatrixXd out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (a[i].size() != b[j].size()) {
        throw Error(ErrorCode::DimensionMismatch, "sequences of different lengths");
      }
      std::size_t diff = 0;
      for (std::size_t k = 0; k < a[i].size(); ++k) diff += a[i][k] != b[j][k];
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 2.0 * static_cast<double>(diff);
    }
  }
  return out;
}

CandidatePool propose_candidates(std::span<const Sequence> incumbents, Rng& rng,
                                 const CandidatePoolSpec& spec, std::size_t alphabet_size,
                                 std::size_t sequence_length, const SequenceSet& evaluated) {
  CandidatePool pool;
  SequenceSet in_pool;
  auto offer = [&](Sequence seq) {
    if (evaluated.count(seq) || in_pool.count(seq)) return;
    in_pool.insert(seq);
    pool.sequences.push_back(std::move(seq));
  };
  const std::size_t n_random = incumbents.empty() ? spec.count : std::min(spec.n_random, spec.count);
  const std::size_t n_mutations = spec.count - n_random;
  const std::size_t radius = std::max<std::size_t>(1, std::min(spec.mutation_radius, sequence_length));
  const std::size_t max_attempts = 20 * spec.count + 100;

  std::vector<std::size_t> positions(sequence_length);
  for (std::size_t attempt = 0; pool.sequences.size() < n_mutations && attempt < max_attempts; ++attempt) {
    Sequence seq = incumbents[attempt % incumbents.size()];
    const std::size_t r = 1 + uniform_index(rng, radius);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    for (std::size_t k = 0; k < r; ++k) {
      std::swap(positions[k], positions[k + uniform_index(rng, sequence_length - k)]);
      auto token = static_cast<Token>(uniform_index(rng, alphabet_size - 1));
      if (token >= seq[positions[k]]) ++token;
      seq[positions[k]] = token;
    }
    offer(std::move(seq));
  }
  for (std::size_t attempt = 0; pool.sequences.size() < spec.count && attempt < max_attempts; ++attempt) {
    offer(uniform_sequence(sequence_length, alphabet_size, rng));
  }

  // Small spaces: enumerate whatever is left, in lexicographic order.
  if (pool.sequences.size() < spec.count) {
    double space = 1.0;
    for (std::size_t i = 0; i < sequence_length; ++i) space *= static_cast<double>(alphabet_size);
    if (space <= 1e6) {
      std::vector<Token> digits(sequence_length, 0);
      for (std::size_t n = 0; n < static_cast<std::size_t>(space) && pool.sequences.size() < spec.count; ++n) {
        offer(Sequence(digits));
        for (std::size_t p = sequence_length; p-- > 0;) {
          if (++digits[p] < alphabet_size) break;
          digits[p] = 0;
        }
      }
    }
  }
  pool.exhausted = pool.sequences.empty();
  return pool;
}

void Observations::add(const Sequence& seq, double score) {
  const auto n = static_cast<Eigen::Index>(sequences_.size());
  const Eigen::MatrixXd row = one_hot_sqdist(std::span<const Sequence>(&seq, 1), sequences_);
  sqdist_.conservativeResize(n + 1, n + 1);
  if (n > 0) {
    sqdist_.block(n, 0, 1, n) = row;
    sqdist_.block(0, n, n, 1) = row.transpose();
  }
  sqdist_(n, n) = 0.0;
  sequences_.push_back(seq);
  scores_.push_back(score);
  seen_.insert(seq);
}

double Observations::best_score() const {
  return scores_.empty() ? -std::numeric_limits<double>::infinity()
                         : *std::max_element(scores_.begin(), scores_.end());
}

std::vector<std::size_t> Observations::top(std::size_t k) const {
  auto idx = all_indices(scores_.size());
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores_[a] > scores_[b]; });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

std::vector<std::size_t> select_fit_subset(std::span<const double> scores, std::size_t max_points, Rng& rng) {
  auto idx = all_indices(scores.size());
  if (scores.size() <= max_points || max_points == 0) return idx;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const std::size_t n_best = max_points / 2;
  for (std::size_t k = n_best; k < max_points; ++k) {
    std::swap(idx[k], idx[k + uniform_index(rng, idx.size() - k)]);
  }
  idx.resize(max_points);
  std::sort(idx.begin(), idx.end());
  return idx;
}

nlohmann::json GpSettings::to_json() const {
  return {{"kernel", "squared_exponential"},
          {"n_starts", n_starts},
          {"max_evaluations_per_start", max_evaluations_per_start},
          {"max_fit_points", max_fit_points},
          {"prior", {{"family", "lognormal"}, {"location", "0.5*log(D)+offset"}, {"offset", prior_offset}, {"scale", prior_scale}}},
          {"xi", xi}};
}

nlohmann::json VanillaBo::hyperparameters() const {
  return {{"pool_size", params_.pool.count},
          {"n_random", params_.pool.n_random},
          {"mutation_radius", params_.pool.mutation_radius},
          {"n_incumbents", params_.n_incumbents},
          {"gp", params_.gp.to_json()}};
}

SolveResult VanillaBo::solve(BlackBoxHandle& handle, const SolverRunConfig& config) {
  Campaign campaign(handle, config);
  Rng rng = make_rng(config.seed, "solver/vanilla_bo");
  const std::size_t alphabet = campaign.info().alphabet.size();
  const std::size_t length = campaign.info().sequence_length;
  const std::size_t dimension = alphabet * length;

  Observations obs;
  for (const auto& [seq, score] : config.init_data) obs.add(seq, score);
  if (obs.size() == 0) {
    const auto start = campaign.initial_incumbent(rng);
    if (campaign.has_incumbent()) obs.add(start.sequence, start.score);
  }

  while (!campaign.done()) {
    std::vector<Sequence> incumbents;
    for (std::size_t i : obs.top(params_.n_incumbents)) incumbents.push_back(obs.sequences()[i]);
    const auto pool = propose_candidates(incumbents, rng, params_.pool, alphabet, length, obs.seen());
    if (pool.exhausted) {
      campaign.note("every sequence has been evaluated");
      break;
    }
    std::size_t pick = 0;
    if (obs.size() >= 2) {
      try {
        pick = argmax_first(score_pool(obs, all_indices(obs.size()), pool.sequences, params_.gp, dimension, rng));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NumericalError) throw;
        campaign.note(std::string("GP fit failed, random step: ") + e.what());
        pick = uniform_index(rng, pool.sequences.size());
      }
    } else {
      pick = uniform_index(rng, pool.sequences.size());
    }
    const auto score = campaign.evaluate(pool.sequences[pick]);
    if (!score) break;
    obs.add(pool.sequences[pick], *score);
  }
  return campaign.finish();
}

TrustRegionState turbo_update(TrustRegionState state, bool improved) {
  if (improved) {
    ++state.success_count;
    state.failure_count = 0;
  } else {
    ++state.failure_count;
    state.success_count = 0;
  }
  if (state.success_count >= state.success_tolerance) {
    state.length = std::min(2.0 * state.length, state.length_max);
    state.success_count = 0;
  } else if (state.failure_count >= state.failure_tolerance) {
    state.length /= 2.0;
    state.failure_count = 0;
  }
  state.restart_required = state.length < state.length_min;
  return state;
}

Eigen::VectorXd trust_region_sample(const Eigen::VectorXd& center, double length, Rng& rng) {
  const auto d = center.size();
  const double p = std::min(1.0, 20.0 / static_cast<double>(d));
  Eigen::VectorXd x = center;
  bool any = false;
  auto redraw = [&](Eigen::Index i) {
    const double lo = std::max(0.0, center[i] - length);
    const double hi = std::min(1.0, center[i] + length);
    x[i] = lo + uniform01(rng) * (hi - lo);
  };
  for (Eigen::Index i = 0; i < d; ++i) {
    if (uniform01(rng) < p) {
      redraw(i);
      any = true;
    }
  }
  if (!any && d > 0) redraw(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(d))));
  return x;
}

nlohmann::json Turbo::hyperparameters() const {
  return {{"pool_size", params_.pool_size},
          {"length_init", params_.length_init},
          {"length_min", params_.length_min},
          {"length_max", params_.length_max},
          {"success_tolerance", params_.success_tolerance},
          {"failure_tolerance", params_.failure_tolerance == 0 ? nlohmann::json("max(4, D)")
                                                               : nlohmann::json(params_.failure_tolerance)},
          {"restart_samples", params_.restart_samples},
          {"gp", params_.gp.to_json()}};
}

SolveResult Turbo::solve(BlackBoxHandle& handle, const SolverRunConfig& config) {
  Campaign campaign(handle, config);
  Rng rng = make_rng(config.seed, "solver/turbo");
  const std::size_t alphabet = campaign.info().alphabet.size();
  const std::size_t length = campaign.info().sequence_length;
  const std::size_t dimension = alphabet * length;

  auto fresh_state = [&] {
    TrustRegionState s;
    s.length = params_.length_init;
    s.length_min = params_.length_min;
    s.length_max = params_.length_max;
    s.success_tolerance = params_.success_tolerance;
    s.failure_tolerance = params_.failure_tolerance != 0
                              ? params_.failure_tolerance
                              : std::max<std::size_t>(4, dimension);
    return s;
  };
  TrustRegionState state = fresh_state();

  Observations obs;
  for (const auto& [seq, score] : config.init_data) obs.add(seq, score);
  Incumbent center = campaign.initial_incumbent(rng);
  if (obs.size() == 0 && campaign.has_incumbent()) obs.add(center.sequence, center.score);
  std::size_t restarts = 0;

  while (!campaign.done()) {
    if (state.restart_required) {
      ++restarts;
      state = fresh_state();
      std::vector<Sequence> fresh;
      for (std::size_t i = 0; i < std::max<std::size_t>(1, params_.restart_samples); ++i) {
        fresh.push_back(campaign.sample(rng));
      }
      const auto scores = campaign.evaluate(fresh);
      if (scores.empty()) break;
      std::size_t best = 0;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        obs.add(fresh[i], scores[i]);
        if (scores[i] > scores[best]) best = i;
      }
      center = {fresh[best], scores[best]};
      continue;
    }

    const Eigen::VectorXd center_x = one_hot_encode(center.sequence, alphabet);
    std::vector<Sequence> pool;
    SequenceSet in_pool;
    const std::size_t max_attempts = 20 * params_.pool_size;
    for (std::size_t a = 0; a < max_attempts && pool.size() < params_.pool_size; ++a) {
      Sequence seq = one_hot_decode(trust_region_sample(center_x, state.length, rng), length, alphabet);
      if (obs.contains(seq) || in_pool.count(seq)) continue;
      in_pool.insert(seq);
      pool.push_back(std::move(seq));
    }
    if (pool.empty()) {
      // Nothing new decodes from this region; contract at once.
      state.failure_count = state.failure_tolerance - 1;
      state = turbo_update(state, false);
      continue;
    }

    // One-hot points differ from the center by 1 in every changed
    // coordinate, so only identical points lie inside a region with side < 1.
    std::vector<std::size_t> region;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      if (state.length >= 1.0 || obs.sequences()[i] == center.sequence) region.push_back(i);
    }
    if (region.size() < 10) region = all_indices(obs.size());

    std::size_t pick = 0;
    if (region.size() >= 2) {
      try {
        pick = argmax_first(score_pool(obs, region, pool, params_.gp, dimension, rng));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NumericalError) throw;
        campaign.note(std::string("GP fit failed, random step: ") + e.what());
        pick = uniform_index(rng, pool.size());
      }
    } else {
      pick = uniform_index(rng, pool.size());
    }
    const auto score = campaign.evaluate(pool[pick]);
    if (!score) break;
    obs.add(pool[pick], *score);
    const bool improved = *score > center.score;
    if (improved) center = {pool[pick], *score};
    state = turbo_update(state, improved);
  }
  if (restarts > 0) campaign.note("trust region restarted " + std::to_string(restarts) + " times");
  return campaign.finish();
}

Eigen::VectorXd line_point(const Eigen::VectorXd& x, const Eigen::VectorXd& direction, double t) {
  return x + (t * std::sqrt(static_cast<double>(x.size()))) * direction;
}

nlohmann::json RandomLineBo::hyperparameters() const {
  return {{"steps_per_line", params_.steps_per_line},
          {"grid_size", params_.grid_size},
          {"n_starts", params_.n_starts},
          {"line_scale", "sqrt(D)"},
          {"xi", params_.xi}};
}

SolveResult RandomLineBo::solve(BlackBoxHandle& handle, const SolverRunConfig& config) {
  Campaign campaign(handle, config);
  Rng rng = make_rng(config.seed, "solver/random_line_bo");
  const std::size_t alphabet = campaign.info().alphabet.size();
  const std::size_t length = campaign.info().sequence_length;
  const std::size_t grid = std::max<std::size_t>(params_.grid_size, 3);

  SequenceSet seen;
  for (const auto& [seq, score] : config.init_data) seen.insert(seq);
  const Incumbent start = campaign.initial_incumbent(rng);
  seen.insert(start.sequence);
  Eigen::VectorXd x_star = one_hot_encode(start.sequence, alphabet);
  double f_star = start.score;

  gp::FitOptions line_fit;
  line_fit.n_starts = params_.n_starts;

  std::size_t stale_lines = 0;
  while (!campaign.done() && stale_lines < 1000) {
    Eigen::VectorXd direction(x_star.size());
    for (Eigen::Index i = 0; i < direction.size(); ++i) direction[i] = standard_normal(rng);
    direction.normalize();

    std::vector<double> grid_t(grid);
    std::vector<Sequence> grid_seq(grid);
    for (std::size_t k = 0; k < grid; ++k) {
      grid_t[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(grid - 1);
      grid_seq[k] = one_hot_decode(clip_unit(line_point(x_star, direction, grid_t[k])), length, alphabet);
    }

    // t = 0 reproduces the incumbent; its score is already known.
    std::vector<double> ts{0.0};
    std::vector<double> ys{f_star};
    double line_best = f_star;
    double line_best_t = 0.0;
    bool evaluated_any = false;

    for (std::size_t step = 0; step < params_.steps_per_line && !campaign.done(); ++step) {
      std::vector<std::size_t> candidates;
      SequenceSet offered;
      for (std::size_t k = 0; k < grid; ++k) {
        if (seen.count(grid_seq[k]) || offered.count(grid_seq[k])) continue;
        offered.insert(grid_seq[k]);
        candidates.push_back(k);
      }
      if (candidates.empty()) break;

      std::size_t pick = candidates[uniform_index(rng, candidates.size())];
      if (ts.size() >= 2) {
        try {
          Eigen::MatrixXd inputs(ts.size(), 1);
          for (std::size_t i = 0; i < ts.size(); ++i) inputs(static_cast<Eigen::Index>(i), 0) = ts[i];
          const Eigen::VectorXd targets = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
          const auto fitted = gp::fit_gp(inputs, targets, line_fit, rng);
          Eigen::MatrixXd queries(candidates.size(), 1);
          for (std::size_t i = 0; i < candidates.size(); ++i) {
            queries(static_cast<Eigen::Index>(i), 0) = grid_t[candidates[i]];
          }
          const auto post = fitted.model.predict(queries);
          Eigen::VectorXd ei(post.mean.size());
          for (Eigen::Index i = 0; i < ei.size(); ++i) {
            ei[i] = gp::expected_improvement(post.mean[i], post.variance[i], line_best, params_.xi);
          }
          pick = candidates[argmax_first(ei)];
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NumericalError) throw;
          campaign.note(std::string("line GP fit failed, random step: ") + e.what());
        }
      }
      const auto score = campaign.evaluate(grid_seq[pick]);
      if (!score) break;
      evaluated_any = true;
      seen.insert(grid_seq[pick]);
      ts.push_back(grid_t[pick]);
      ys.push_back(*score);
      if (*score > line_best) {
        line_best = *score;
        line_best_t = grid_t[pick];
      }
    }
    stale_lines = evaluated_any ? 0 : stale_lines + 1;
    if (line_best > f_star) {
      x_star = clip_unit(line_point(x_star, direction, line_best_t));
      f_star = line_best;
    }
  }
  return campaign.finish();
}

}  // namespace seqbench::solvers
