#include <Eigen/Eigenvalues>

#include "cfisac/conic.hpp"
#include "cfisac/errors.hpp"

namespace cfisac::conic {

namespace {

// Rotates v so its largest-magnitude entry is real and positive.
void fix_phase(VecC& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  const double mag = std::abs(v(idx));
  if (mag > 0.0) v *= std::conj(v(idx)) / mag;
}

}  // namespace

EigenPair max_generalized_eigenpair(const MatC& B, const MatC& C) {
  if (B.rows() != B.cols() || C.rows() != C.cols() || B.rows() != C.rows() || B.rows() == 0) {
    throw InvalidArgument("generalized eigenproblem needs square matrices of equal size");
  }
  const Eigen::Index n = B.rows();
  const MatC Bs = (B + B.adjoint()) / 2.0;
  const MatC Cs = (C + C.adjoint()) / 2.0;

  Eigen::LLT<MatC> chol(Cs);
  if (chol.info() != Eigen::Success || !(chol.matrixL().toDenseMatrix().diagonal().real().array() > 0.0).all()) {
    throw NumericalDomain("generalized eigenproblem: C is not positive definite");
  }

  EigenPair out;
  if (Bs.norm() == 0.0) {
    out.vector = VecC::Zero(n);
    out.vector(0) = 1.0;
    return out;
  }

  // L^{-1} B L^{-H}
  const auto L = chol.matrixL();
  MatC tmp = L.solve(Bs);
  MatC reduced = L.solve(tmp.adjoint()).adjoint();
  reduced = (reduced + reduced.adjoint()).eval() / 2.0;

  Eigen::SelfAdjointEigenSolver<MatC> eig(reduced);
  if (eig.info() != Eigen::Success) throw NumericalDomain("generalized eigenproblem did not converge");
  const Eigen::Index top = n - 1;
  out.value = eig.eigenvalues()(top);
  VecC v = chol.matrixU().solve(eig.eigenvectors().col(top));
  v.normalize();
  fix_phase(v);
  out.vector = std::move(v);
  return out;
}

}  // namespace cfisac::conic
