// Real-lifted cone programs for the beamforming subproblems. Internal header.
#pragma once

#include <vector>

#include "cfisac/conic.hpp"
#include "cfisac/model.hpp"

namespace cfisac::detail {

/// Complex unknowns z (length `size`) stored in a real vector as
/// [Re z; Im z] starting at `offset`.
struct ComplexBlock {
  int offset = 0;
  int size = 0;

  int re(int i) const { return offset + i; }
  int im(int i) const { return offset + size + i; }
};

/// Strided view so matrix rows can be passed directly.
using RowRef = Eigen::Ref<VecR, 0, Eigen::InnerStride<>>;

/// Adds scale * Re(a^H z[first..first+len)) coefficients to `row`.
void add_re_row(RowRef row, const ComplexBlock& blk, int first, const VecC& a,
                double scale = 1.0);
/// Adds scale * Im(a^H z[first..first+len)) coefficients to `row`.
void add_im_row(RowRef row, const ComplexBlock& blk, int first, const VecC& a,
                double scale = 1.0);

/// Reads z back from the real vector.
VecC read_complex(const VecR& x, const ComplexBlock& blk);

/// Rows of the stacked beamformer owned by the transmitters in `tx_set`.
std::vector<int> tx_rows(const std::vector<int>& tx_set, int antennas);

/// Restriction of v to the given rows.
VecC restrict_rows(const VecC& v, const std::vector<int>& rows);

/// min sum_j P_j s.t. per-user SINR (interference over communication columns
/// only) and ||W_c,j||_F^2 <= P_j. Returns the solver output together with the
/// recovered communication matrix (|T|M x K, rows ordered as tx_rows) already
/// in physical units.
struct PowerMinProgram {
  conic::SocpSolution solution;
  MatC comm;  // |T|M x K
};
PowerMinProgram solve_power_min_program(const Scenario& scenario, const std::vector<int>& tx_set,
                                        const std::vector<double>& gamma, double tol);

/// Problem data for one minorize-maximize beamforming step.
struct MmStepProgram {
  conic::SocpProblem problem;
  ComplexBlock block;  // |T|M (K+M) complex unknowns, column-major over tx rows
  std::vector<int> rows;
  double w_scale = 1.0;  // physical w = w_scale * z
};
MmStepProgram build_mm_step(const MatC& anchor, const VecR& tau, const QuadraticForms& forms,
                            const Scenario& scenario, const ModeVector& mode, double objective_scale);

}  // namespace cfisac::detail
