#pragma once

#include "entropic/matcore.hpp"

namespace entropic {

// Hermitian PSD matrix with trace equal to a positive budget p.
// Construction validates lambda_min >= -1e-8 p and |tr - p| <= 1e-8 p.
class SpectraPoint {
 public:
  SpectraPoint(HermitianMatrix matrix, double trace_budget);

  // p * I / n
  static SpectraPoint uniform(Eigen::Index n, double trace_budget = 1.0);

  const HermitianMatrix& matrix() const { return matrix_; }
  double trace_budget() const { return budget_; }
  Eigen::Index dim() const { return matrix_.dim(); }

  // X / p, a density matrix.
  SpectraPoint normalized() const;

 private:
  HermitianMatrix matrix_;
  double budget_;
};

// Unconstrained Hermitian dual iterate.
class DualPoint {
 public:
  explicit DualPoint(HermitianMatrix matrix) : matrix_(std::move(matrix)) {}
  const HermitianMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.dim(); }

 private:
  HermitianMatrix matrix_;
};

// Quantum entropy tr(X log X - X), 0 log 0 = 0.
double entropy(const SpectraPoint& x);

// von Neumann (Bregman) divergence tr(X log X - X log Y - X + Y). For equal
// traces this is tr(X log X - X log Y). Returns +infinity when the support of
// X is not contained in the support of Y.
double divergence(const SpectraPoint& x, const SpectraPoint& y);

// log tr exp(Y + I), evaluated with a lambda_max shift.
double conjugate(const DualPoint& y);

// p exp(Y) / tr exp(Y), evaluated with a lambda_max shift and trace
// renormalized afterwards.
SpectraPoint gibbs(const DualPoint& y, double trace_budget = 1.0);
SpectraPoint gibbs(const HermitianMatrix& y, double trace_budget = 1.0);

// entropy(Q) + conjugate(Y) - <Q, Y>; nonnegative, zero iff Q = gibbs(Y).
double fenchel_coupling(const SpectraPoint& q, const DualPoint& y);

}  // namespace entropic
