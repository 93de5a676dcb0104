#pragma once

#include <array>
#include <utility>

#include <json.hpp>

#include "hetune/plant.hpp"

namespace hetune::pid {

using Vec4 = std::array<double, 4>;

/// Filtered PID parameters (K_p, K_i, K_d, T_f), all strictly positive.
struct Theta {
  double Kp = 1.0;
  double Ki = 1.0;
  double Kd = 1.0;
  double Tf = 1.0;

  Vec4 as_array() const { return {Kp, Ki, Kd, Tf}; }
  static Theta from_array(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
  /// Throws ConfigError unless every entry is finite and positive.
  void validate() const;

  friend bool operator==(const Theta&, const Theta&) = default;
};

/// C(s) = K_p + K_i/s + K_d s/(T_f s + 1) over the common denominator
/// s (T_f s + 1).
plant::TransferFunction pid_tf(const Theta& theta);

/// (theta o (1 + d), theta o (1 - d)); throws PositivityViolation if some
/// |d_i| >= 1.
std::pair<Theta, Theta> perturb(const Theta& theta, const Vec4& d);

/// theta o (1 + dtheta); throws PositivityViolation if some dtheta_i <= -1.
Theta update(const Theta& theta, const Vec4& dtheta);

/// Ziegler-Nichols starting points of the three benchmark plants.
Theta initial_theta(plant::PlantId id);

nlohmann::json to_json(const Theta& theta);
Theta theta_from_json(const nlohmann::json& j);

}  // namespace hetune::pid
