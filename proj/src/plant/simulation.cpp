#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "hetune/errors.hpp"
#include "hetune/plant.hpp"

namespace hetune::plant {

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_matrices(const Eigen::MatrixXd& A,
                                                         const Eigen::MatrixXd& B,
                                                         double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sampling time must be positive");
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  // exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, I]]
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + m, n + m);
  M.topLeftCorner(n, n) = A * dt;
  M.topRightCorner(n, m) = B * dt;
  const Eigen::MatrixXd E = M.exp();
  return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

DiscreteLoop discretize_zoh(const StateSpace& ss, double dt) {
  if (ss.inputs() != 2 || ss.outputs() != 1) {
    throw ConfigError("discretize_zoh expects a closed loop with inputs (r, v)");
  }
  // Companion forms of high-order plants have entries spanning many decades;
  // balancing first keeps the exponential and the recurrence well scaled.
  const StateSpace b = balance(ss);
  auto [Ad, Bd] = zoh_matrices(b.A, b.B, dt);
  DiscreteLoop loop;
  loop.Ad = std::move(Ad);
  loop.Bd = Bd.col(0);
  loop.Bn = Bd.col(1);
  loop.Cd = b.C.row(0);
  loop.Dr = b.D(0, 0);
  loop.Dn = b.D(0, 1);
  loop.dt = dt;
  return loop;
}

std::vector<double> step_response(const DiscreteLoop& loop, double r_hat, int N,
                                  const NoiseOptions& noise, std::mt19937_64& rng) {
  if (N < 2) throw ConfigError("step response needs N >= 2 samples");
  if (r_hat == 0.0 || !std::isfinite(r_hat)) throw ConfigError("reference must be nonzero");
  if (noise.std_fraction < 0.0) throw ConfigError("noise level must be nonnegative");

  const double sigma = noise.std_fraction * std::abs(r_hat);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(loop.Ad.rows());
  Eigen::VectorXd next(x.size());
  const Eigen::VectorXd drive = loop.Bd * r_hat;
  std::vector<double> y(N);
  for (int n = 0; n < N; ++n) {
    const double v = sigma > 0.0 ? sigma * gauss(rng) : 0.0;
    const double fed = noise.in_feedback ? v : 0.0;
    y[n] = loop.Cd.dot(x) + loop.Dr * r_hat + loop.Dn * fed + v;
    next.noalias() = loop.Ad * x;
    next += drive;
    if (fed != 0.0) next += loop.Bn * fed;
    x.swap(next);
  }
  return y;
}

}  // namespace hetune::plant
