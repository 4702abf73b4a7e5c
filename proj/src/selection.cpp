#include "cfisac/selection.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "cfisac/errors.hpp"
#include "cfisac/subproblems.hpp"

namespace cfisac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBudgetSlack = 1e-9;

bool can_move(const ModeVector& mode, int antennas, int num_users) {
  return mode.num_tx() >= 2 && (mode.num_tx() - 1) * antennas >= num_users;
}

// Lowest index wins ties.
int pick(const std::vector<double>& scores, bool maximize) {
  int best = -1;
  for (int j = 0; j < static_cast<int>(scores.size()); ++j) {
    if (std::isnan(scores[j])) continue;
    if (best < 0 || (maximize ? scores[j] > scores[best] : scores[j] < scores[best])) best = j;
  }
  return best;
}

bool within_budget(const PowerMinResult& pm, double p_max) {
  return pm.total <= p_max * (1.0 + kBudgetSlack);
}

struct Design {
  Beamformer bf;
  FilterBank filters;
  double objective = 0.0;
};

// Power-min users plus the null-space precoder on the leftover budget.
Design linear_design(const Scenario& scenario, const ModeVector& mode, const PowerMinResult& pm) {
  const auto& cfg = scenario.config;
  Design d;
  d.bf = Beamformer::zeros(cfg);
  d.bf.w.leftCols(cfg.num_users) = pm.comm;
  d.bf.w.rightCols(cfg.antennas) =
      nullspace_precoder(scenario, mode.tx_set(), std::max(0.0, cfg.p_max - pm.total)).sensing;
  const auto mats = assemble_sensing(scenario, mode);
  d.filters = update_filters(mats, d.bf);
  d.objective = sum_sensing_sinr(mats, d.bf, d.filters);
  return d;
}

void check_inputs(const Scenario& scenario, const SelectionOptions& options) {
  if (scenario.num_targets() < 1) throw InvalidArgument("mode selection needs at least one target");
  options.fpmm.validate();
  const int J = scenario.num_bs();
  if ((J - 1) * scenario.antennas() < scenario.num_users()) {
    throw ModeInfeasible("no mode leaves a receiver and enough transmit antennas");
  }
}

void require_budget(const Scenario& scenario, const SelectionOptions& options) {
  std::vector<int> all(scenario.num_bs());
  for (int j = 0; j < scenario.num_bs(); ++j) all[j] = j;
  const auto pm = solve_power_min(scenario, all, scenario.config.gamma, options.fpmm.socp_tol);
  if (!within_budget(pm, scenario.config.p_max)) {
    throw InfeasibleConstraints("SINR targets exceed the power budget even with every BS transmitting");
  }
}

// Bookkeeping for the greedy loops: keeps the best mode seen and reports
// whether the latest round fell below it.
struct BestSoFar {
  bool have = false;
  ModeVector mode;
  double objective = -std::numeric_limits<double>::infinity();

  bool offer(const ModeVector& m, double value) {
    if (have && value < objective) return false;
    have = true;
    mode = m;
    objective = value;
    return true;
  }
};

SelectionResult finish(const Scenario& scenario, const BestSoFar& best, std::vector<RoundRecord> history,
                       const SelectionOptions& options) {
  if (!best.have) throw InfeasibleConstraints("no feasible mode within the power budget");
  const auto ar = run_alternating(scenario, best.mode, options.fpmm);
  SelectionResult out;
  out.mode = best.mode;
  out.beamformer = ar.beamformer;
  out.filters = ar.filters;
  out.objective = ar.objective;
  out.trace = ar.trace;
  out.history = std::move(history);
  return out;
}

std::vector<double> unscored(int J) { return std::vector<double>(J, kNaN); }

}  // namespace

std::vector<ModeVector> enumerate_feasible_modes(int num_bs, int antennas, int num_users) {
  if (num_bs < 1 || num_bs > 20) throw InvalidArgument("mode enumeration supports 1..20 BSs");
  std::vector<ModeVector> modes;
  for (int tx = 1; tx <= num_bs; ++tx) {
    // lexicographic over bit strings with exactly tx ones
    std::vector<std::uint8_t> alpha(num_bs, 0);
    std::fill(alpha.end() - tx, alpha.end(), 1);
    do {
      ModeVector m(alpha);
      if (m.is_feasible(antennas, num_users)) modes.push_back(std::move(m));
    } while (std::next_permutation(alpha.begin(), alpha.end()));
  }
  return modes;
}

SelectionResult select_comm_centric(const Scenario& scenario, const SelectionOptions& options) {
  check_inputs(scenario, options);
  const auto& cfg = scenario.config;
  const double tol = options.fpmm.socp_tol;

  ModeVector mode = ModeVector::all_transmit(cfg.num_bs);
  BestSoFar best;
  std::vector<RoundRecord> history;
  bool first = true;
  while (can_move(mode, cfg.antennas, cfg.num_users)) {
    const auto pm = solve_power_min(scenario, mode.tx_set(), cfg.gamma, tol);
    if (first && !within_budget(pm, cfg.p_max)) {
      throw InfeasibleConstraints("SINR targets exceed the power budget even with every BS transmitting");
    }
    first = false;

    RoundRecord rec;
    rec.scores = unscored(cfg.num_bs);
    for (int j : mode.tx_set()) rec.scores[j] = pm.bs_power[j];
    rec.selected = pick(rec.scores, options.cc_rule == CcRule::argmax_power);
    const ModeVector next = mode.with_receiver(rec.selected);
    rec.mode_bits = next.bits();

    const auto pm_next = solve_power_min(scenario, next.tx_set(), cfg.gamma, tol);
    if (!within_budget(pm_next, cfg.p_max)) break;
    rec.objective = linear_design(scenario, next, pm_next).objective;
    history.push_back(rec);
    if (!best.offer(next, rec.objective)) break;
    mode = next;
  }
  return finish(scenario, best, std::move(history), options);
}

SelectionResult select_sensing_centric(const Scenario& scenario, const SelectionOptions& options) {
  check_inputs(scenario, options);
  require_budget(scenario, options);
  const auto& cfg = scenario.config;
  const double tol = options.fpmm.socp_tol;

  ModeVector mode = ModeVector::all_transmit(cfg.num_bs);
  BestSoFar best;
  std::vector<RoundRecord> history;
  while (can_move(mode, cfg.antennas, cfg.num_users)) {
    RoundRecord rec;
    rec.scores = unscored(cfg.num_bs);
    for (int j : mode.tx_set()) {
      // whole budget on sensing, no user beams
      const ModeVector trial = mode.with_receiver(j);
      const auto mats = assemble_sensing(scenario, trial);
      Beamformer bf = Beamformer::zeros(cfg);
      bf.w.rightCols(cfg.antennas) = nullspace_precoder(scenario, trial.tx_set(), cfg.p_max).sensing;
      rec.scores[j] = sum_sensing_sinr(mats, bf, update_filters(mats, bf));
    }
    rec.selected = pick(rec.scores, true);
    const ModeVector next = mode.with_receiver(rec.selected);
    rec.mode_bits = next.bits();

    const auto pm = solve_power_min(scenario, next.tx_set(), cfg.gamma, tol);
    if (!within_budget(pm, cfg.p_max)) break;
    rec.objective = linear_design(scenario, next, pm).objective;
    history.push_back(rec);
    if (!best.offer(next, rec.objective)) break;
    mode = next;
  }
  return finish(scenario, best, std::move(history), options);
}

SelectionResult select_joint(const Scenario& scenario, const SelectionOptions& options) {
  check_inputs(scenario, options);
  const auto& cfg = scenario.config;
  const int M = cfg.antennas;
  const double tol = options.fpmm.socp_tol;

  ModeVector mode = ModeVector::all_transmit(cfg.num_bs);
  Beamformer w = init_beamforming(scenario, mode, tol).beamformer;
  BestSoFar best;
  std::vector<RoundRecord> history;
  while (can_move(mode, M, cfg.num_users)) {
    RoundRecord rec;
    rec.scores = unscored(cfg.num_bs);
    for (int j : mode.tx_set()) {
      // previous beams with the candidate's rows silenced, filters re-fit
      const ModeVector trial = mode.with_receiver(j);
      const auto mats = assemble_sensing(scenario, trial);
      Beamformer bf = w;
      apply_tx_mask(bf.w, trial, M);
      rec.scores[j] = sum_sensing_sinr(mats, bf, update_filters(mats, bf));
    }
    rec.selected = pick(rec.scores, true);
    const ModeVector next = mode.with_receiver(rec.selected);
    rec.mode_bits = next.bits();

    if (!within_budget(solve_power_min(scenario, next.tx_set(), cfg.gamma, tol), cfg.p_max)) break;
    const auto mats = assemble_sensing(scenario, next);
    Beamformer masked = w;
    apply_tx_mask(masked.w, next, M);
    const auto forms = build_quadratic_forms(mats, update_filters(mats, masked));
    StepResult step;
    try {
      step = beamforming_step(masked, update_tau(masked.w, forms), forms, scenario, next, tol);
    } catch (const InfeasibleConstraints&) {
      break;
    } catch (const SolverFailure&) {
      break;
    }
    if (step.status != conic::SocpStatus::optimal && !(step.kkt_residual <= 1e-6)) break;

    rec.objective = sum_sensing_sinr(mats, step.beamformer, update_filters(mats, step.beamformer));
    history.push_back(rec);
    if (!best.offer(next, rec.objective)) break;
    mode = next;
    w = std::move(step.beamformer);
  }
  return finish(scenario, best, std::move(history), options);
}

ModeVector draw_random_mode(const Scenario& scenario, std::uint64_t seed) {
  const auto& cfg = scenario.config;
  std::mt19937_64 rng(seed ^ 0x72616e646f6d6d6fULL);
  if (cfg.num_bs <= 20) {
    const auto modes = enumerate_feasible_modes(cfg.num_bs, cfg.antennas, cfg.num_users);
    if (modes.empty()) throw ModeInfeasible("no feasible mode");
    std::uniform_int_distribution<std::size_t> idx(0, modes.size() - 1);
    return modes[idx(rng)];
  }
  if ((cfg.num_bs - 1) * cfg.antennas < cfg.num_users) throw ModeInfeasible("no feasible mode");
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    std::vector<std::uint8_t> alpha(cfg.num_bs);
    for (auto& a : alpha) a = coin(rng) ? 1 : 0;
    ModeVector m(std::move(alpha));
    if (m.is_feasible(cfg.antennas, cfg.num_users)) return m;
  }
}

SelectionResult select_random(const Scenario& scenario, std::uint64_t seed, const SelectionOptions& options) {
  check_inputs(scenario, options);
  BestSoFar only;
  only.offer(draw_random_mode(scenario, seed), 0.0);
  return finish(scenario, only, {}, options);
}

SelectionResult select_exhaustive(const Scenario& scenario, const SelectionOptions& options) {
  const auto& cfg = scenario.config;
  if (cfg.num_bs > 10) throw InvalidArgument("exhaustive search is limited to J <= 10");
  check_inputs(scenario, options);

  SelectionResult out;
  bool have = false;
  for (const auto& mode : enumerate_feasible_modes(cfg.num_bs, cfg.antennas, cfg.num_users)) {
    ++out.modes_evaluated;
    AlternatingResult ar;
    try {
      ar = run_alternating(scenario, mode, options.fpmm);
    } catch (const InfeasibleConstraints&) {
      continue;
    }
    if (!have || ar.objective > out.objective) {
      have = true;
      out.mode = mode;
      out.beamformer = ar.beamformer;
      out.filters = ar.filters;
      out.objective = ar.objective;
      out.trace = ar.trace;
    }
  }
  if (!have) throw InfeasibleConstraints("no feasible mode within the power budget");
  return out;
}

}  // namespace cfisac
