#pragma once

#include <functional>
#include <optional>
#include <string>

#include "lowrank/variety.hpp"

namespace lowrank {

/// A differentiable cost on R^{m x n} with optional known optimum.
struct Objective {
  std::string label;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::function<double(const Matrix&)> value;
  std::function<Matrix(const Matrix&)> gradient;
  /// Optional f(X) - f(Y) evaluated without subtracting two rounded costs.
  std::function<double(const Matrix&, const Matrix&)> difference;
  std::optional<double> known_min_value;
  std::optional<Matrix> known_minimizer;

  // Shape-checked wrappers around `value` / `gradient`.
  double eval(const Matrix& X) const;
  Matrix grad(const Matrix& X) const;
  /// f(X) - f(Y), through `difference` when available.
  double decrease(const Matrix& X, const Matrix& Y) const;
};

/// Real root of x^3 = x + 1 (the minimizer of x^4/4 - (x+1)^2/2), found by
/// Newton's method from 1.3.
double levin_root();

/// f(X) = Q(X[0:2, 0:2]) + phi(X(2,2)) on R^{3x3} with
/// Q(Y) = 0.5 ||D (Y - Y*)||^2, D = diag(1, 1/2), Y* = diag(1, 0),
/// phi(x) = x^4/4 - (x+1)^2/2.
Objective levin_objective();

/// f(X) = (X11^2 + (X22 - 1)^2 + (X12 - X21)^2) / 2 on R^{2x2}.
Objective apocalypse_2x2_objective();

/// f(X) = ((X11 - 4)^2 + 3 (X22 - 2)^2 + (X12 - X21)^2) / 2 on R^{2x2}.
Objective side_effect_a_objective();

/// f(X) = ((X11 - 2)^2 + (X22 - 3)^2 + (X12 - X21)^2) / 2 on R^{2x2}.
Objective side_effect_b_objective();

/// Max over entries of |central difference - gradient| / (1 + |gradient|).
/// Throws NonFiniteValue if f is not finite at a probe point.
double check_gradient(const Objective& obj, const Matrix& X, double h = 1e-5);

}  // namespace lowrank
