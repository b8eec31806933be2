#pragma once

// Reference computations for tests. They avoid the library's measure code paths:
// closed forms, explicit index loops, and brute-force grids.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qdisc/optimize.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

inline double entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
  double s = 0.0;
  for (int i = 0; i < static_cast<int>(es.eigenvalues().size()); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-15) s -= l * std::log2(l);
  }
  return s;
}

/// tr_A by explicit summation sum_a <a,b|rho|a,b'>.
inline Matrix trace_out_a_loop(const Matrix& rho, int m, int n) {
  Matrix out = Matrix::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int b2 = 0; b2 < n; ++b2)
      for (int a = 0; a < m; ++a) out(b, b2) += rho(a * n + b, a * n + b2);
  return out;
}

inline Matrix trace_out_b_loop(const Matrix& rho, int m, int n) {
  Matrix out = Matrix::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int a2 = 0; a2 < m; ++a2)
      for (int b = 0; b < n; ++b) out(a, a2) += rho(a * n + b, a2 * n + b);
  return out;
}

/// Two-qubit entanglement of formation from the concurrence:
/// C = max(0, l1 - l2 - l3 - l4), l_i the decreasing singular values of sqrt(rho) sqrt(rho~),
/// rho~ = (Y (x) Y) rho* (Y (x) Y); E_F = h((1 + sqrt(1 - C^2)) / 2).
inline double concurrence(const Matrix& rho) {
  Matrix y(2, 2);
  y << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  Matrix yy(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) yy(2 * i + k, 2 * j + l) = y(i, j) * y(k, l);
  const Matrix tilde = yy * rho.conjugate() * yy;
  Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
  const Eigen::VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix root = es.eigenvectors() * sq.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  const Matrix r = root * tilde * root;
  Eigen::SelfAdjointEigenSolver<Matrix> er((r + r.adjoint()) / 2.0);
  std::vector<double> l;
  for (int i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(0.0, er.eigenvalues()(i))));
  std::sort(l.rbegin(), l.rend());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

inline double two_qubit_eof(const Matrix& rho) {
  const double c = concurrence(rho);
  return binary_entropy((1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))) / 2.0);
}

inline Vector bloch(double theta, double phi) {
  Vector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::polar(std::sin(theta / 2.0), phi);
  return v;
}

/// Sum_k p_k S(rho_A^k) for the projective qubit measurement {|u>, |u_perp>} on B of an
/// m x 2 state, by explicit index loops.
inline double conditional_entropy_qubit_b(const Matrix& rho, int m, double theta, double phi) {
  const Vector u0 = bloch(theta, phi);
  const Vector u1 = bloch(std::numbers::pi - theta, phi + std::numbers::pi);
  double s = 0.0;
  for (const Vector* u : {&u0, &u1}) {
    Matrix cond = Matrix::Zero(m, m);
    for (int a = 0; a < m; ++a)
      for (int a2 = 0; a2 < m; ++a2)
        for (int b = 0; b < 2; ++b)
          for (int b2 = 0; b2 < 2; ++b2) cond(a, a2) += std::conj((*u)(b)) * rho(a * 2 + b, a2 * 2 + b2) * (*u)(b2);
    const double p = cond.trace().real();
    if (p > 1e-14) s += p * entropy(cond / p);
  }
  return s;
}

/// Projective discord D_N(rho | B) for m x 2 states: a 400 x 800 Bloch grid, then a zoom
/// around the best cell.
inline double qubit_discord_grid(const Matrix& rho, int m) {
  const double pi = std::numbers::pi;
  qdisc::Objective obj{2, [rho, m](const qdisc::RealVector& p) { return conditional_entropy_qubit_b(rho, m, p(0), p(1)); }};
  const qdisc::OptimizationResult coarse = qdisc::grid_oracle(obj, {{{0.0, pi}, {0.0, 2.0 * pi}}, {400, 800}, 0, 1});
  const double h0 = pi / 399.0, h1 = 2.0 * pi / 799.0;
  const qdisc::RealVector& x = coarse.best_params;
  qdisc::GridSpec zoom{{{x(0) - h0, x(0) + h0}, {x(1) - h1, x(1) + h1}}, {21, 21}, 10, 4};
  const double cond = std::min(coarse.best_value, qdisc::grid_oracle(obj, zoom).best_value);
  const double s_b = entropy(trace_out_a_loop(rho, m, 2));
  const double s_ab = entropy(rho);
  return s_b - s_ab + cond;  // I - J = S_A + S_B - S_AB - (S_A - cond)
}

/// Werner state w |Phi+><Phi+| + (1 - w) I / 4 written out entry by entry.
inline Matrix werner(double w) {
  Matrix r = Matrix::Identity(4, 4) * ((1.0 - w) / 4.0);
  r(0, 0) += w / 2.0;
  r(3, 3) += w / 2.0;
  r(0, 3) += w / 2.0;
  r(3, 0) += w / 2.0;
  return r;
}

}  // namespace oracle
