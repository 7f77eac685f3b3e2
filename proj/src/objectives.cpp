#include "lowrank/objectives.hpp"

#include <cmath>
#include <stdexcept>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

// Value of x0 quoted with the original example; the root finder must agree.
constexpr double kLevinRootReference = 1.32471795724475;

void require_shape(const Objective& obj, const Matrix& X) {
  if (X.rows() != obj.rows || X.cols() != obj.cols) {
    throw ShapeMismatch(obj.label + ": expected " + std::to_string(obj.rows) +
                        "x" + std::to_string(obj.cols) + " input");
  }
}

double phi(double x) { return x * x * x * x / 4.0 - (x + 1.0) * (x + 1.0) / 2.0; }
double phi_prime(double x) { return x * x * x - x - 1.0; }

// phi(x) - phi(y) with the common factor (x - y) pulled out.
double phi_difference(double x, double y) {
  const double sum = x + y;
  return (x - y) * (sum * (x * x + y * y) / 4.0 - (sum + 2.0) / 2.0);
}

// (p - t)^2 - (q - t)^2
double square_difference(double p, double q, double t) {
  return (p - q) * ((p - t) + (q - t));
}

Matrix diag2(double a, double b) {
  Matrix X = Matrix::Zero(2, 2);
  X(0, 0) = a;
  X(1, 1) = b;
  return X;
}

// ((X11 - a)^2 + w (X22 - b)^2 + (X12 - X21)^2) / 2, the shared shape of the
// three 2x2 examples.
Objective weighted_2x2(std::string label, double a, double w, double b) {
  Objective obj;
  obj.label = std::move(label);
  obj.rows = 2;
  obj.cols = 2;
  obj.value = [a, w, b](const Matrix& X) {
    const double d11 = X(0, 0) - a;
    const double d22 = X(1, 1) - b;
    const double skew = X(0, 1) - X(1, 0);
    return (d11 * d11 + w * d22 * d22 + skew * skew) / 2.0;
  };
  obj.gradient = [a, w, b](const Matrix& X) {
    Matrix G(2, 2);
    G(0, 0) = X(0, 0) - a;
    G(1, 1) = w * (X(1, 1) - b);
    G(0, 1) = X(0, 1) - X(1, 0);
    G(1, 0) = X(1, 0) - X(0, 1);
    return G;
  };
  obj.difference = [a, w, b](const Matrix& X, const Matrix& Y) {
    return (square_difference(X(0, 0), Y(0, 0), a) +
            w * square_difference(X(1, 1), Y(1, 1), b) +
            square_difference(X(0, 1) - X(1, 0), Y(0, 1) - Y(1, 0), 0.0)) /
           2.0;
  };
  return obj;
}

}  // namespace

double Objective::eval(const Matrix& X) const {
  require_shape(*this, X);
  return value(X);
}

Matrix Objective::grad(const Matrix& X) const {
  require_shape(*this, X);
  Matrix G = gradient(X);
  if (G.rows() != rows || G.cols() != cols) {
    throw ShapeMismatch(label + ": gradient has wrong shape");
  }
  return G;
}

double Objective::decrease(const Matrix& X, const Matrix& Y) const {
  require_shape(*this, X);
  require_shape(*this, Y);
  if (difference) return difference(X, Y);
  return value(X) - value(Y);
}

double levin_root() {
  double x = 1.3;
  for (int iter = 0; iter < 100; ++iter) {
    const double step = (x * x * x - x - 1.0) / (3.0 * x * x - 1.0);
    x -= step;
    if (std::abs(step) <= 1e-14 * std::abs(x)) break;
  }
  if (std::abs(x - kLevinRootReference) > 1e-13) {
    throw std::logic_error("levin_root: Newton iteration did not reach x0");
  }
  return x;
}

Objective levin_objective() {
  const double x0 = levin_root();

  Objective obj;
  obj.label = "levin3x3";
  obj.rows = 3;
  obj.cols = 3;
  obj.value = [](const Matrix& X) {
    // D (Y - Y*) scales the second row by 1/2.
    const double q = (X(0, 0) - 1.0) * (X(0, 0) - 1.0) + X(0, 1) * X(0, 1) +
                     (X(1, 0) * X(1, 0) + X(1, 1) * X(1, 1)) / 4.0;
    return q / 2.0 + phi(X(2, 2));
  };
  obj.gradient = [](const Matrix& X) {
    Matrix G = Matrix::Zero(3, 3);
    G(0, 0) = X(0, 0) - 1.0;
    G(0, 1) = X(0, 1);
    G(1, 0) = X(1, 0) / 4.0;
    G(1, 1) = X(1, 1) / 4.0;
    G(2, 2) = phi_prime(X(2, 2));
    return G;
  };
  obj.difference = [](const Matrix& X, const Matrix& Y) {
    const double dq = square_difference(X(0, 0), Y(0, 0), 1.0) +
                      square_difference(X(0, 1), Y(0, 1), 0.0) +
                      (square_difference(X(1, 0), Y(1, 0), 0.0) +
                       square_difference(X(1, 1), Y(1, 1), 0.0)) /
                          4.0;
    return dq / 2.0 + phi_difference(X(2, 2), Y(2, 2));
  };
  Matrix xstar = Matrix::Zero(3, 3);
  xstar(0, 0) = 1.0;
  xstar(2, 2) = x0;
  obj.known_minimizer = xstar;
  obj.known_min_value = phi(x0);
  return obj;
}

Objective apocalypse_2x2_objective() {
  Objective obj = weighted_2x2("apoc2x2", 0.0, 1.0, 1.0);
  obj.known_minimizer = diag2(0.0, 1.0);
  obj.known_min_value = 0.0;
  return obj;
}

Objective side_effect_a_objective() {
  Objective obj = weighted_2x2("side_a", 4.0, 3.0, 2.0);
  // One of the two minimizers over rank <= 1; the other flips the sign of
  // the off-diagonal pair.
  const double off = 2.0 * std::sqrt(2.0);
  Matrix xstar(2, 2);
  xstar << 4.0, off, off, 2.0;
  obj.known_minimizer = xstar;
  obj.known_min_value = 0.0;
  return obj;
}

Objective side_effect_b_objective() {
  Objective obj = weighted_2x2("side_b", 2.0, 1.0, 3.0);
  const double off = std::sqrt(6.0);
  Matrix xstar(2, 2);
  xstar << 2.0, off, off, 3.0;
  obj.known_minimizer = xstar;
  obj.known_min_value = 0.0;
  return obj;
}

double check_gradient(const Objective& obj, const Matrix& X, double h) {
  if (!(h > 0.0)) throw InvalidParameter("check_gradient: h must be > 0");
  const Matrix G = obj.grad(X);
  if (!G.allFinite()) {
    throw NonFiniteValue(obj.label + ": gradient is not finite");
  }
  double worst = 0.0;
  Matrix probe = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double saved = probe(i, j);
      probe(i, j) = saved + h;
      const double up = obj.eval(probe);
      probe(i, j) = saved - h;
      const double down = obj.eval(probe);
      probe(i, j) = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NonFiniteValue(obj.label + ": value is not finite near X");
      }
      const double fd = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - G(i, j)) / (1.0 + std::abs(G(i, j))));
    }
  }
  return worst;
}

}  // namespace lowrank
