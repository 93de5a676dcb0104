#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace hetune::plant {

/// Rational function num(s)/den(s), coefficients in ascending powers of s.
struct TransferFunction {
  std::vector<double> num;
  std::vector<double> den;

  /// Drops zero high-order coefficients and checks that den is nonzero.
  TransferFunction normalized() const;
  int order() const;  // degree of the denominator
  bool is_proper() const;
  std::complex<double> evaluate(std::complex<double> s) const;
  double dc_gain() const;

  friend bool operator==(const TransferFunction&, const TransferFunction&) = default;
};

/// Series connection: a(s) b(s).
TransferFunction operator*(const TransferFunction& a, const TransferFunction& b);

std::vector<double> poly_multiply(const std::vector<double>& a,
                                  const std::vector<double>& b);

/// Continuous-time LTI system; B is n x m, C is p x n, D is p x m.
struct StateSpace {
  Eigen::MatrixXd A, B, C, D;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }
  /// Transfer matrix entry (output i, input j) at s.
  std::complex<double> evaluate(std::complex<double> s, Eigen::Index i = 0,
                                Eigen::Index j = 0) const;
};

enum class PlantId { G1, G2, G3 };

PlantId parse_plant_id(std::string_view name);
std::string_view to_string(PlantId id);

/// e^{-5s}/(20s+1) with a third-order Pade delay, 1/(0.01s+1)^8, and
/// (1-5s)/(200s^2+30s+1).
TransferFunction benchmark_plant(PlantId id);

/// Diagonal Pade approximant of e^{-Ts}.
TransferFunction pade_delay(double T, int order);

/// {"num": [...], "den": [...], "delay": T}; a positive delay is replaced by
/// its third-order Pade approximant.
TransferFunction plant_from_json(const nlohmann::json& j);

/// Controllable canonical realization of a proper SISO transfer function.
StateSpace tf_to_ss(const TransferFunction& tf);

/// Negative unity feedback u = controller(r - (y + v)), y = plant(u).
/// Inputs (r, v); output is the true plant output y.
StateSpace closed_loop(const StateSpace& plant, const StateSpace& controller);

/// Diagonal similarity with power-of-two entries that equalizes row and
/// column norms of A; input-output behaviour is unchanged and exact.
StateSpace balance(const StateSpace& ss);

/// Largest real part among the eigenvalues of A (-inf for zero states).
double spectral_abscissa(const Eigen::MatrixXd& A);
bool is_stable(const StateSpace& ss);

/// Zero-order-hold discretization of a closed loop with inputs (r, v).
struct DiscreteLoop {
  Eigen::MatrixXd Ad;
  Eigen::VectorXd Bd;  // reference input
  Eigen::VectorXd Bn;  // measurement noise input
  Eigen::RowVectorXd Cd;
  double Dr = 0.0;
  double Dn = 0.0;
  double dt = 0.0;
};

DiscreteLoop discretize_zoh(const StateSpace& ss, double dt);

/// Exact ZOH pair (exp(A dt), int_0^dt exp(A t) dt B) of any system.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_matrices(const Eigen::MatrixXd& A,
                                                         const Eigen::MatrixXd& B,
                                                         double dt);

struct NoiseOptions {
  double std_fraction = 0.0;  // noise std as a fraction of |y_inf| = |r_hat|
  bool in_feedback = true;    // false: noise only corrupts the recorded y
};

/// Step response from rest to a constant reference r_hat; returns the
/// recorded (possibly noisy) y(0..N-1).
std::vector<double> step_response(const DiscreteLoop& loop, double r_hat,
                                  int N, const NoiseOptions& noise,
                                  std::mt19937_64& rng);

}  // namespace hetune::plant
