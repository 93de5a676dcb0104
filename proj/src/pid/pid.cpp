#include "hetune/pid.hpp"

#include <cmath>
#include <sstream>

#include "hetune/errors.hpp"

namespace hetune::pid {

void Theta::validate() const {
  for (double v : as_array()) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ConfigError("controller parameters must be finite and positive");
    }
  }
}

plant::TransferFunction pid_tf(const Theta& t) {
  if (!(t.Tf > 0.0)) throw ConfigError("derivative filter constant T_f must be positive");
  return {{t.Ki, t.Kp + t.Ki * t.Tf, t.Kp * t.Tf + t.Kd}, {0.0, 1.0, t.Tf}};
}

std::pair<Theta, Theta> perturb(const Theta& theta, const Vec4& d) {
  const Vec4 v = theta.as_array();
  Vec4 plus{}, minus{};
  for (int i = 0; i < 4; ++i) {
    if (!(std::abs(d[i]) < 1.0)) {
      throw PositivityViolation("perturbation magnitude must stay below 1");
    }
    plus[i] = v[i] * (1.0 + d[i]);
    minus[i] = v[i] * (1.0 - d[i]);
  }
  return {Theta::from_array(plus), Theta::from_array(minus)};
}

Theta update(const Theta& theta, const Vec4& dtheta) {
  const Vec4 v = theta.as_array();
  Vec4 out{};
  for (int i = 0; i < 4; ++i) {
    if (!(dtheta[i] > -1.0) || !std::isfinite(dtheta[i])) {
      std::ostringstream msg;
      msg << "relative update dTheta" << i + 1 << " = " << dtheta[i]
          << " would make a controller parameter nonpositive";
      throw PositivityViolation(msg.str());
    }
    out[i] = v[i] * (1.0 + dtheta[i]);
  }
  return Theta::from_array(out);
}

Theta initial_theta(plant::PlantId id) {
  switch (id) {
    case plant::PlantId::G1:
      return {4.08, 0.45, 9.33, 0.50};
    case plant::PlantId::G2:
      return {1.11, 14.61, 0.02, 1e-3};
    case plant::PlantId::G3:
      return {3.53, 0.21, 14.82, 0.50};
  }
  throw ConfigError("unknown plant id");
}

nlohmann::json to_json(const Theta& t) {
  return {{"Kp", t.Kp}, {"Ki", t.Ki}, {"Kd", t.Kd}, {"Tf", t.Tf}};
}

Theta theta_from_json(const nlohmann::json& j) {
  try {
    Theta t{j.at("Kp").get<double>(), j.at("Ki").get<double>(),
            j.at("Kd").get<double>(), j.at("Tf").get<double>()};
    t.validate();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("theta: ") + e.what());
  }
}

}  // namespace hetune::pid
