#include <cmath>
#include <numeric>

#include "hetune/errors.hpp"
#include "hetune/plant.hpp"

namespace hetune::plant {

namespace {

std::vector<double> trimmed(std::vector<double> p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  return p;
}

std::complex<double> horner(const std::vector<double>& p, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::vector<double> poly_multiply(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

TransferFunction TransferFunction::normalized() const {
  TransferFunction t{trimmed(num), trimmed(den)};
  if (t.num.empty()) t.num = {0.0};
  if (t.den.empty() || t.den.back() == 0.0) {
    throw ConfigError("transfer function denominator is zero");
  }
  for (double c : t.num)
    if (!std::isfinite(c)) throw ConfigError("non-finite numerator coefficient");
  for (double c : t.den)
    if (!std::isfinite(c)) throw ConfigError("non-finite denominator coefficient");
  return t;
}

int TransferFunction::order() const {
  return static_cast<int>(normalized().den.size()) - 1;
}

bool TransferFunction::is_proper() const {
  const auto t = normalized();
  return t.num.size() <= t.den.size();
}

std::complex<double> TransferFunction::evaluate(std::complex<double> s) const {
  return horner(num, s) / horner(den, s);
}

double TransferFunction::dc_gain() const {
  if (den.empty() || den.front() == 0.0) {
    throw ConfigError("DC gain undefined: pole at s = 0");
  }
  return num.empty() ? 0.0 : num.front() / den.front();
}

TransferFunction operator*(const TransferFunction& a, const TransferFunction& b) {
  return {poly_multiply(a.num, b.num), poly_multiply(a.den, b.den)};
}

PlantId parse_plant_id(std::string_view name) {
  if (name == "G1" || name == "g1") return PlantId::G1;
  if (name == "G2" || name == "g2") return PlantId::G2;
  if (name == "G3" || name == "g3") return PlantId::G3;
  throw ConfigError("unknown plant id '" + std::string(name) + "'");
}

std::string_view to_string(PlantId id) {
  switch (id) {
    case PlantId::G1:
      return "G1";
    case PlantId::G2:
      return "G2";
    case PlantId::G3:
      return "G3";
  }
  return "?";
}

TransferFunction pade_delay(double T, int order) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("Pade delay must be positive");
  if (order < 1 || order > 10) throw ConfigError("Pade order must be in [1, 10]");
  const int n = order;
  TransferFunction tf;
  tf.num.resize(n + 1);
  tf.den.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double c = factorial(2 * n - k) * factorial(n) /
                     (factorial(2 * n) * factorial(k) * factorial(n - k));
    tf.den[k] = c * std::pow(T, k);
    tf.num[k] = (k % 2 == 0 ? 1.0 : -1.0) * tf.den[k];
  }
  return tf;
}

TransferFunction benchmark_plant(PlantId id) {
  switch (id) {
    case PlantId::G1:
      return pade_delay(5.0, 3) * TransferFunction{{1.0}, {1.0, 20.0}};
    case PlantId::G2: {
      TransferFunction tf{{1.0}, {1.0}};
      for (int i = 0; i < 8; ++i) tf.den = poly_multiply(tf.den, {1.0, 0.01});
      return tf;
    }
    case PlantId::G3:
      return {{1.0, -5.0}, {1.0, 30.0, 200.0}};
  }
  throw ConfigError("unknown plant id");
}

TransferFunction plant_from_json(const nlohmann::json& j) {
  try {
    TransferFunction tf{j.at("num").get<std::vector<double>>(),
                        j.at("den").get<std::vector<double>>()};
    tf = tf.normalized();
    const double delay = j.value("delay", 0.0);
    if (delay < 0.0) throw ConfigError("plant delay must be nonnegative");
    if (delay > 0.0) tf = pade_delay(delay, 3) * tf;
    if (!tf.is_proper()) throw ConfigError("plant must be proper");
    return tf;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("plant config: ") + e.what());
  }
}

}  // namespace hetune::plant
