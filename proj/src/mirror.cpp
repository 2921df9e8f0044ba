#include "entropic/mirror.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace entropic {

namespace {

constexpr double kPsdTolerance = 1e-8;
constexpr double kKernelThreshold = 1e-12;

double x_log_x_sum(const EigenDecomposition& d) {
  const double norm = d.eigenvalues.size() ? d.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) {
    const double lambda = d.eigenvalues(k);
    sum += is_null_eigenvalue(lambda, norm) ? 0.0 : lambda * extended_log(lambda, norm);
  }
  return sum;
}

}  // namespace

SpectraPoint::SpectraPoint(HermitianMatrix matrix, double trace_budget)
    : matrix_(std::move(matrix)), budget_(trace_budget) {
  if (!(budget_ > 0.0)) throw std::invalid_argument("SpectraPoint: trace budget must be positive");
  const double tr = matrix_.trace();
  if (std::abs(tr - budget_) > kPsdTolerance * budget_)
    throw std::domain_error("SpectraPoint: trace " + std::to_string(tr) + " differs from budget " +
                            std::to_string(budget_));
  if (!is_psd(matrix_, kPsdTolerance * budget_)) throw std::domain_error("SpectraPoint: matrix is not PSD");
}

SpectraPoint SpectraPoint::uniform(Eigen::Index n, double trace_budget) {
  return SpectraPoint(HermitianMatrix::identity(n) * (trace_budget / static_cast<double>(n)), trace_budget);
}

SpectraPoint SpectraPoint::normalized() const { return SpectraPoint(matrix_ * (1.0 / budget_), 1.0); }

double entropy(const SpectraPoint& x) { return x_log_x_sum(eig(x.matrix())) - x.matrix().trace(); }

double divergence(const SpectraPoint& x, const SpectraPoint& y) {
  const EigenDecomposition dy = eig(y.matrix());
  const ComplexMatrix& vy = dy.eigenvectors;
  const ComplexMatrix rotated = vy.adjoint() * x.matrix().matrix() * vy;
  // tr(X log Y) = sum_k (V^dagger X V)_kk log lambda_k over the support of Y.
  double cross = 0.0;
  for (Eigen::Index k = 0; k < dy.eigenvalues.size(); ++k) {
    const double lambda = dy.eigenvalues(k);
    const double weight = rotated(k, k).real();
    if (lambda <= kKernelThreshold) {
      if (weight > kKernelThreshold * x.trace_budget()) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross += weight * std::log(lambda);
  }
  const double value = x_log_x_sum(eig(x.matrix())) - cross - x.matrix().trace() + y.matrix().trace();
  return std::max(value, 0.0);
}

double conjugate(const DualPoint& y) {
  const EigenDecomposition d = eig(y.matrix());
  const double top = d.eigenvalues(d.eigenvalues.size() - 1);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) sum += std::exp(d.eigenvalues(k) - top);
  return top + 1.0 + std::log(sum);
}

SpectraPoint gibbs(const HermitianMatrix& y, double trace_budget) {
  const EigenDecomposition d = eig(y);
  const double top = d.eigenvalues(d.eigenvalues.size() - 1);
  HermitianMatrix g = mat_fn(d, [top](double x) { return std::exp(x - top); });
  g *= trace_budget / g.trace();
  return SpectraPoint(std::move(g), trace_budget);
}

SpectraPoint gibbs(const DualPoint& y, double trace_budget) { return gibbs(y.matrix(), trace_budget); }

double fenchel_coupling(const SpectraPoint& q, const DualPoint& y) {
  return entropy(q) + conjugate(y) - trace_inner(q.matrix(), y.matrix());
}

}  // namespace entropic
