#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "hetune/errors.hpp"
#include "hetune/plant.hpp"

namespace hetune::plant {

using Eigen::MatrixXd;

std::complex<double> StateSpace::evaluate(std::complex<double> s, Eigen::Index i,
                                          Eigen::Index j) const {
  const Eigen::Index n = states();
  if (n == 0) return D(i, j);
  Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
  Eigen::VectorXcd x = M.partialPivLu().solve(B.col(j).cast<std::complex<double>>());
  return (C.row(i).cast<std::complex<double>>() * x)(0) + D(i, j);
}

StateSpace tf_to_ss(const TransferFunction& tf) {
  const auto t = tf.normalized();
  if (t.num.size() > t.den.size()) throw ConfigError("transfer function is improper");
  const int n = static_cast<int>(t.den.size()) - 1;
  const double lead = t.den.back();
  std::vector<double> a(n + 1), b(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) a[k] = t.den[k] / lead;
  for (std::size_t k = 0; k < t.num.size(); ++k) b[k] = t.num[k] / lead;

  StateSpace ss;
  ss.A = MatrixXd::Zero(n, n);
  ss.B = MatrixXd::Zero(n, 1);
  ss.C = MatrixXd::Zero(1, n);
  ss.D = MatrixXd::Constant(1, 1, b[n]);
  for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
  for (int k = 0; k < n; ++k) {
    ss.A(n - 1, k) = -a[k];
    ss.C(0, k) = b[k] - a[k] * b[n];
  }
  if (n > 0) ss.B(n - 1, 0) = 1.0;
  return ss;
}

StateSpace closed_loop(const StateSpace& plant, const StateSpace& controller) {
  if (plant.inputs() != 1 || plant.outputs() != 1 || controller.inputs() != 1 ||
      controller.outputs() != 1) {
    throw ConfigError("closed_loop expects SISO plant and controller");
  }
  const Eigen::Index np = plant.states();
  const Eigen::Index nc = controller.states();
  const Eigen::Index n = np + nc;
  const double dp = plant.D(0, 0);
  const double dc = controller.D(0, 0);
  const double loop = 1.0 + dp * dc;
  if (std::abs(loop) < 1e-12) {
    throw ConfigError("closed loop is ill-posed: 1 + Dp Dc = 0");
  }
  const double k = 1.0 / loop;

  // y = Cy x + Dyr r + Dyv v
  Eigen::RowVectorXd Cy(n);
  Cy << k * plant.C.row(0), k * dp * controller.C.row(0);
  const double dyr = k * dp * dc;
  const double dyv = -k * dp * dc;

  // e = r - y - v, u = Cc xc + Dc e
  Eigen::RowVectorXd Ce = -Cy;
  const double der = 1.0 - dyr;
  const double dev = -1.0 - dyv;
  Eigen::RowVectorXd Cu = dc * Ce;
  Cu.tail(nc) += controller.C.row(0);
  const double dur = dc * der;
  const double duv = dc * dev;

  StateSpace ss;
  ss.A = MatrixXd::Zero(n, n);
  ss.A.topLeftCorner(np, np) = plant.A;
  ss.A.bottomRightCorner(nc, nc) = controller.A;
  ss.A.topRows(np) += plant.B.col(0) * Cu;
  ss.A.bottomRows(nc) += controller.B.col(0) * Ce;

  ss.B = MatrixXd::Zero(n, 2);
  ss.B.block(0, 0, np, 1) = plant.B.col(0) * dur;
  ss.B.block(0, 1, np, 1) = plant.B.col(0) * duv;
  ss.B.block(np, 0, nc, 1) = controller.B.col(0) * der;
  ss.B.block(np, 1, nc, 1) = controller.B.col(0) * dev;

  ss.C = Cy;
  ss.D = MatrixXd(1, 2);
  ss.D << dyr, dyv;
  return ss;
}

StateSpace balance(const StateSpace& ss) {
  const Eigen::Index n = ss.states();
  MatrixXd A = ss.A;
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  bool done = false;
  for (int sweep = 0; !done && sweep < 200; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        d(i) *= f;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
  StateSpace out;
  out.A = A;
  out.B = d.cwiseInverse().asDiagonal() * ss.B;
  out.C = ss.C * d.asDiagonal();
  out.D = ss.D;
  return out;
}

double spectral_abscissa(const MatrixXd& A) {
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<MatrixXd> solver(A, false);
  if (solver.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return solver.eigenvalues().real().maxCoeff();
}

bool is_stable(const StateSpace& ss) {
  const double a = spectral_abscissa(balance(ss).A);
  return std::isfinite(a) ? a < 0.0 : ss.states() == 0;
}

}  // namespace hetune::plant
