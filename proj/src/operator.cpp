#include "jjq/operator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "jjq/error.hpp"

namespace jjq {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::kCharge: return "charge";
    case BasisKind::kPhaseGrid: return "phase-grid";
    case BasisKind::kFluxGrid: return "flux-grid";
    case BasisKind::kFluxPlaneWave: return "flux-plane-wave";
    case BasisKind::kQubitFock: return "qubit-fock";
    case BasisKind::kComputational: return "computational";
  }
  return "unknown";
}

int BasisLabel::size() const {
  return std::accumulate(shape.begin(), shape.end(), 1, std::multiplies<int>());
}

HermitianOperator::HermitianOperator(SparseMatrix matrix, BasisLabel basis)
    : matrix_(std::move(matrix)), basis_(std::move(basis)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw InvalidSpec("operator must be square");
  }
  if (basis_.size() != dim()) {
    throw BasisMismatch("basis '" + to_string(basis_.kind) + "' describes " +
                        std::to_string(basis_.size()) + " states but operator has dimension " +
                        std::to_string(dim()));
  }
  matrix_.makeCompressed();
  const double scale = max_abs();
  const SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  if (worst >= 1e-12 * scale && worst > 0.0) {
    throw InvalidSpec("operator is not Hermitian: max|H - H^dagger| = " + std::to_string(worst));
  }
  for (int k = 0; k < matrix_.outerSize() && is_real_; ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      if (it.value().imag() != 0.0) {
        is_real_ = false;
        break;
      }
    }
  }
}

HermitianOperator HermitianOperator::from_dense(const Eigen::MatrixXcd& dense, BasisLabel basis) {
  return HermitianOperator(dense.sparseView(), std::move(basis));
}

double HermitianOperator::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

double HermitianOperator::norm_inf() const {
  // Column sums of a Hermitian matrix equal its row sums.
  double m = 0.0;
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) s += std::abs(it.value());
    m = std::max(m, s);
  }
  return m;
}

double HermitianOperator::gershgorin_lower_bound() const {
  double lo = std::numeric_limits<double>::infinity();
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    double diag = 0.0;
    double radius = 0.0;
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      if (it.row() == it.col()) {
        diag = it.value().real();
      } else {
        radius += std::abs(it.value());
      }
    }
    lo = std::min(lo, diag - radius);
  }
  return dim() == 0 ? 0.0 : lo;
}

bool HermitianOperator::is_tridiagonal() const {
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      if (std::abs(it.row() - it.col()) > 1 && it.value() != Complex(0.0)) return false;
    }
  }
  return true;
}

Eigen::SparseMatrix<double> HermitianOperator::real_part() const {
  return matrix_.real();
}

double commutator_norm(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) {
    throw BasisMismatch("commutator of operators with dimensions " + std::to_string(a.dim()) +
                        " and " + std::to_string(b.dim()));
  }
  const SparseMatrix ab = a.matrix() * b.matrix();
  const SparseMatrix ba = b.matrix() * a.matrix();
  const SparseMatrix c = ab - ba;
  return c.norm();
}

}  // namespace jjq
