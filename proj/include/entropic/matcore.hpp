#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace entropic {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Thrown when the Jacobi sweep cap is exhausted.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Square complex matrix whose entries satisfy A(u,v) == conj(A(v,u)) exactly.
// Real symmetric matrices are the zero-imaginary special case.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  static HermitianMatrix zero(Eigen::Index n);
  static HermitianMatrix identity(Eigen::Index n);
  static HermitianMatrix diagonal(std::span<const double> values);

  // (A + A^dagger) / 2 with the diagonal forced real.
  static HermitianMatrix symmetrize(const ComplexMatrix& raw);
  // Accepts a matrix that is already Hermitian to within `tol` (max abs
  // deviation), then symmetrizes it; throws std::invalid_argument otherwise.
  static HermitianMatrix from_matrix(const ComplexMatrix& m, double tol = 1e-12);
  static HermitianMatrix from_real(const Eigen::MatrixXd& m, double tol = 1e-12);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index u, Eigen::Index v) const { return m_(u, v); }
  double trace() const { return m_.diagonal().real().sum(); }

  HermitianMatrix& operator+=(const HermitianMatrix& other);
  HermitianMatrix& operator-=(const HermitianMatrix& other);
  HermitianMatrix& operator*=(double s);

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend HermitianMatrix operator-(HermitianMatrix a) { return a *= -1.0; }

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

// Max |A(u,v) - conj(A(v,u))| of an arbitrary square matrix.
double hermitian_defect(const ComplexMatrix& m);

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  ComplexMatrix eigenvectors;   // column k pairs with eigenvalue k
};

struct EigOptions {
  // Sweep cap; 0 selects the default of 100 * n^2.
  std::size_t max_sweeps = 0;
  double relative_tolerance = 1e-13;
};

// Cyclic Jacobi eigensolver with 2x2 unitary rotations. Output ordering is
// deterministic: ascending eigenvalues (stable on ties) and each eigenvector
// phased so its first nonzero component is real positive.
EigenDecomposition eig(const HermitianMatrix& a, const EigOptions& options = {});

// V diag(f(lambda)) V^dagger.
HermitianMatrix mat_fn(const HermitianMatrix& a, const std::function<double(double)>& f);
HermitianMatrix mat_fn(const EigenDecomposition& d, const std::function<double(double)>& f);

HermitianMatrix mat_exp(const HermitianMatrix& a);
// Log of a PSD matrix with the 0 log 0 = 0 convention: eigenvalues in
// [-1e-8 ||A||_2, 1e-12] map to 0; anything more negative is a domain error.
HermitianMatrix mat_log(const HermitianMatrix& a);

// Eigenvalues inside the zero band used by mat_log and entropy.
bool is_null_eigenvalue(double lambda, double spectral_norm);
double extended_log(double lambda, double spectral_norm);

double trace_norm(const HermitianMatrix& a);
double spectral_norm(const HermitianMatrix& a);
double frobenius_norm(const HermitianMatrix& a);
// Re tr(A^dagger B).
double trace_inner(const HermitianMatrix& a, const HermitianMatrix& b);

double lambda_min(const HermitianMatrix& a);
double lambda_max(const HermitianMatrix& a);

bool is_psd(const HermitianMatrix& a, double tol);

// H X H^dagger, symmetrized. H may be rectangular.
HermitianMatrix congruence(const ComplexMatrix& h, const HermitianMatrix& x);

// log det and inverse of a Hermitian matrix with eigenvalues floored at `floor`.
double log_det_floored(const HermitianMatrix& a, double floor);
HermitianMatrix inverse_floored(const HermitianMatrix& a, double floor);

}  // namespace entropic
