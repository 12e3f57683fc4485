#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace jjq {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

enum class BasisKind {
  kCharge,          // |n>, n = -ncut..ncut
  kPhaseGrid,       // 1D real-space grid in phi
  kFluxGrid,        // 2D real-space grid in (phi_p, phi_m)
  kFluxPlaneWave,   // 2D plane waves exp(i kp phi_p + i km phi_m)
  kQubitFock,       // qubit (x) Fock, index = q * (nmax + 1) + n
  kComputational,   // multi-qubit computational basis
};

std::string to_string(BasisKind kind);

struct BasisLabel {
  BasisKind kind = BasisKind::kComputational;
  std::vector<int> shape;   // product must equal the operator dimension
  std::string description;  // parameters that fix the basis, e.g. "ncut=35"

  int size() const;
  bool operator==(const BasisLabel&) const = default;
};

// Dense-semantics Hermitian matrix (E/h in GHz for Hamiltonians) stored sparse.
// Construction checks max|H - H^dagger| < 1e-12 * max|H| and the basis shape.
class HermitianOperator {
 public:
  HermitianOperator(SparseMatrix matrix, BasisLabel basis);

  static HermitianOperator from_dense(const Eigen::MatrixXcd& dense, BasisLabel basis);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const SparseMatrix& matrix() const { return matrix_; }
  const BasisLabel& basis() const { return basis_; }

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }
  Complex coeff(int row, int col) const { return matrix_.coeff(row, col); }

  bool is_real() const { return is_real_; }
  double max_abs() const;
  // Max absolute row sum; an upper bound on the spectral norm.
  double norm_inf() const;
  // Tightest Gershgorin lower bound on the spectrum.
  double gershgorin_lower_bound() const;
  bool is_tridiagonal() const;

  Eigen::SparseMatrix<double> real_part() const;

 private:
  SparseMatrix matrix_;
  BasisLabel basis_;
  bool is_real_ = true;
};

// Frobenius norm of AB - BA. Throws BasisMismatch on dimension mismatch.
double commutator_norm(const HermitianOperator& a, const HermitianOperator& b);

}  // namespace jjq
