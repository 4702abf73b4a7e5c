// Transmit/receive mode selection: three greedy heuristics, a random
// baseline and a brute-force oracle.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfisac/fpmm.hpp"
#include "cfisac/model.hpp"

namespace cfisac {

/// Which BS the communication-centric heuristic moves to the receive side.
enum class CcRule {
  argmin_power,  // the BS spending the least on its users
  argmax_power,
};

struct SelectionOptions {
  FpmmParams fpmm;
  CcRule cc_rule = CcRule::argmin_power;
};

struct RoundRecord {
  int selected = -1;          // BS moved to receive mode
  double objective = 0.0;     // sum of sensing SINRs of the round's design
  std::vector<double> scores; // per BS (P_j or Gamma_j); NaN where not scored
  std::string mode_bits;      // mode after the move
};

struct SelectionResult {
  ModeVector mode;
  Beamformer beamformer;
  FilterBank filters;
  double objective = 0.0;
  std::vector<RoundRecord> history;
  FpmmTrace trace;          // final alternating design
  int modes_evaluated = 0;  // oracle only
};

/// Modes satisfying the three mode constraints, ordered by transmitter count
/// and then lexicographically by bit string. Refuses J > 20.
std::vector<ModeVector> enumerate_feasible_modes(int num_bs, int antennas, int num_users);

SelectionResult select_comm_centric(const Scenario& scenario, const SelectionOptions& options = {});
SelectionResult select_sensing_centric(const Scenario& scenario, const SelectionOptions& options = {});
SelectionResult select_joint(const Scenario& scenario, const SelectionOptions& options = {});
/// Uniform draw over feasible modes, then the alternating design.
SelectionResult select_random(const Scenario& scenario, std::uint64_t seed,
                              const SelectionOptions& options = {});
/// Every feasible mode through the alternating design; refuses J > 10.
SelectionResult select_exhaustive(const Scenario& scenario, const SelectionOptions& options = {});

/// The mode drawn by select_random, without the design step.
ModeVector draw_random_mode(const Scenario& scenario, std::uint64_t seed);

}  // namespace cfisac
