#include "entropic/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace entropic {

HermitianMatrix HermitianMatrix::zero(Eigen::Index n) {
  return HermitianMatrix(ComplexMatrix::Zero(n, n));
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
  return HermitianMatrix(ComplexMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = values[static_cast<std::size_t>(k)];
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::symmetrize(const ComplexMatrix& raw) {
  if (raw.rows() != raw.cols()) throw std::invalid_argument("symmetrize: matrix is not square");
  const Eigen::Index n = raw.rows();
  ComplexMatrix m(n, n);
  for (Eigen::Index v = 0; v < n; ++v) {
    m(v, v) = Complex(raw(v, v).real(), 0.0);
    for (Eigen::Index u = v + 1; u < n; ++u) {
      const Complex lower = (raw(u, v) + std::conj(raw(v, u))) * 0.5;
      m(u, v) = lower;
      m(v, u) = std::conj(lower);
    }
  }
  return HermitianMatrix(std::move(m));
}

double hermitian_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (Eigen::Index v = 0; v < m.cols(); ++v)
    for (Eigen::Index u = v; u < m.rows(); ++u)
      worst = std::max(worst, std::abs(m(u, v) - std::conj(m(v, u))));
  return worst;
}

HermitianMatrix HermitianMatrix::from_matrix(const ComplexMatrix& m, double tol) {
  const double defect = hermitian_defect(m);
  if (!(defect <= tol))
    throw std::invalid_argument("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  return symmetrize(m);
}

HermitianMatrix HermitianMatrix::from_real(const Eigen::MatrixXd& m, double tol) {
  return from_matrix(m.cast<Complex>(), tol);
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  if (m_.rows() != other.m_.rows()) throw std::invalid_argument("dimension mismatch");
  m_ += other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& other) {
  if (m_.rows() != other.m_.rows()) throw std::invalid_argument("dimension mismatch");
  m_ -= other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

namespace {

double off_diagonal_mass(const ComplexMatrix& a) {
  double sum = 0.0;
  for (Eigen::Index v = 0; v < a.cols(); ++v)
    for (Eigen::Index u = v + 1; u < a.rows(); ++u) sum += 2.0 * std::norm(a(u, v));
  return std::sqrt(sum);
}

// A <- J^dagger A J and V <- V J for the rotation zeroing A(p,q).
void rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  // J(p,p) = c, J(p,q) = s e^{i phi}, J(q,p) = -s e^{-i phi}, J(q,q) = c.
  const Complex jpq = s * phase;
  const Complex jqp = -s * std::conj(phase);
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp + jqp * akq;
    a(k, q) = jpq * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp + jqp * vkq;
    v(k, q) = jpq * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition eig(const HermitianMatrix& input, const EigOptions& options) {
  const Eigen::Index n = input.dim();
  ComplexMatrix a = input.matrix();
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double scale = a.norm();
  const std::size_t cap =
      options.max_sweeps > 0 ? options.max_sweeps : static_cast<std::size_t>(100 * std::max<Eigen::Index>(n * n, 1));

  if (scale > 0.0) {
    const double target = options.relative_tolerance * scale;
    std::size_t sweep = 0;
    while (off_diagonal_mass(a) > target) {
      if (sweep++ >= cap) throw ConvergenceError("eig: Jacobi sweep cap reached");
      for (Eigen::Index p = 0; p < n - 1; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src).real();
    auto col = v.col(src);
    const double colnorm = col.norm();
    Complex phase = 1.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double mag = std::abs(col(r));
      if (mag > 1e-12 * colnorm) {
        phase = std::conj(col(r)) / mag;
        break;
      }
    }
    out.eigenvectors.col(k) = col * phase;
    for (Eigen::Index r = 0; r < n; ++r)
      if (std::abs(col(r)) > 1e-12 * colnorm) {
        out.eigenvectors(r, k) = Complex(out.eigenvectors(r, k).real(), 0.0);
        break;
      }
  }
  return out;
}

HermitianMatrix mat_fn(const EigenDecomposition& d, const std::function<double(double)>& f) {
  const Eigen::Index n = d.eigenvalues.size();
  Eigen::VectorXd image(n);
  for (Eigen::Index k = 0; k < n; ++k) image(k) = f(d.eigenvalues(k));
  ComplexMatrix scaled = d.eigenvectors * image.asDiagonal();
  return HermitianMatrix::symmetrize(scaled * d.eigenvectors.adjoint());
}

HermitianMatrix mat_fn(const HermitianMatrix& a, const std::function<double(double)>& f) {
  return mat_fn(eig(a), f);
}

HermitianMatrix mat_exp(const HermitianMatrix& a) {
  return mat_fn(a, [](double x) { return std::exp(x); });
}

bool is_null_eigenvalue(double lambda, double spectral_norm) {
  return lambda >= -1e-8 * spectral_norm && lambda <= 1e-12;
}

double extended_log(double lambda, double spectral_norm) {
  if (lambda < -1e-8 * spectral_norm)
    throw std::domain_error("log: eigenvalue " + std::to_string(lambda) + " is significantly negative");
  if (is_null_eigenvalue(lambda, spectral_norm)) return 0.0;
  return std::log(lambda);
}

HermitianMatrix mat_log(const HermitianMatrix& a) {
  const EigenDecomposition d = eig(a);
  const double norm = d.eigenvalues.size() ? d.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return mat_fn(d, [norm](double x) { return extended_log(x, norm); });
}

double trace_norm(const HermitianMatrix& a) { return eig(a).eigenvalues.cwiseAbs().sum(); }

double spectral_norm(const HermitianMatrix& a) {
  if (a.dim() == 0) return 0.0;
  return eig(a).eigenvalues.cwiseAbs().maxCoeff();
}

double frobenius_norm(const HermitianMatrix& a) { return a.matrix().norm(); }

double trace_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_inner: dimension mismatch");
  // conj(A(u,v)) B(u,v) summed; the imaginary part cancels for Hermitian pairs.
  return (a.matrix().conjugate().cwiseProduct(b.matrix())).sum().real();
}

double lambda_min(const HermitianMatrix& a) { return eig(a).eigenvalues(0); }

double lambda_max(const HermitianMatrix& a) {
  const auto d = eig(a);
  return d.eigenvalues(d.eigenvalues.size() - 1);
}

bool is_psd(const HermitianMatrix& a, double tol) { return lambda_min(a) >= -tol; }

HermitianMatrix congruence(const ComplexMatrix& h, const HermitianMatrix& x) {
  return HermitianMatrix::symmetrize(h * x.matrix() * h.adjoint());
}

double log_det_floored(const HermitianMatrix& a, double floor) {
  const auto d = eig(a);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) sum += std::log(std::max(d.eigenvalues(k), floor));
  return sum;
}

HermitianMatrix inverse_floored(const HermitianMatrix& a, double floor) {
  return mat_fn(a, [floor](double x) { return 1.0 / std::max(x, floor); });
}

}  // namespace entropic
