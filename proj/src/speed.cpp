#include "cmaflow/speed.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "cmaflow/errors.hpp"

namespace cmaflow {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_number(const std::string& s, const std::string& token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidInput("bad number '" + s + "' in speed token '" + token + "'");
  return v;
}

void require_positive(double rho) {
  if (!(rho > 0.0)) throw DomainError("speed evaluated at rho = " + shortest(rho) + " <= 0");
}

}  // namespace

SpeedFunction SpeedFunction::log() { return {Kind::Log, 0.0, 1.0}; }
SpeedFunction SpeedFunction::linear() { return {Kind::Linear, 1.0, 1.0}; }
SpeedFunction SpeedFunction::power(double a, double scale) { return {Kind::Power, a, scale}; }
SpeedFunction SpeedFunction::inverse_ma() { return {Kind::InverseMA, -1.0, 1.0}; }
SpeedFunction SpeedFunction::negative_power(double a, double scale) {
  return {Kind::NegativePower, a, scale};
}

SpeedFunction SpeedFunction::custom(std::vector<std::pair<int, double>> coeffs) {
  if (coeffs.empty()) throw InvalidInput("custom speed needs at least one coefficient");
  SpeedFunction f(Kind::Custom, 0.0, 1.0);
  f.coeffs_ = std::move(coeffs);
  return f;
}

SpeedFunction SpeedFunction::from_token(const std::string& token) {
  std::vector<std::string> parts;
  std::stringstream ss(token);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw InvalidInput("empty speed token");
  const std::string& kind = parts[0];
  auto arg = [&](std::size_t i, double fallback) {
    return parts.size() > i ? parse_number(parts[i], token) : fallback;
  };
  if (kind == "log" && parts.size() == 1) return log();
  if (kind == "linear" && parts.size() == 1) return linear();
  if (kind == "inverse_ma" && parts.size() == 1) return inverse_ma();
  if (kind == "power" && (parts.size() == 2 || parts.size() == 3)) return power(arg(1, 1.0), arg(2, 1.0));
  if (kind == "negative_power" && (parts.size() == 2 || parts.size() == 3))
    return negative_power(arg(1, -1.0), arg(2, 1.0));
  throw InvalidInput("unknown speed token '" + token + "'");
}

std::string SpeedFunction::name() const {
  switch (kind_) {
    case Kind::Log: return "log";
    case Kind::Linear: return "linear";
    case Kind::InverseMA: return "inverse_ma";
    case Kind::Power:
      return scale_ == 1.0 ? "power:" + shortest(a_) : "power:" + shortest(a_) + ":" + shortest(scale_);
    case Kind::NegativePower: return "negative_power:" + shortest(a_) + ":" + shortest(scale_);
    case Kind::Custom: return "custom";
  }
  return "unknown";
}

double SpeedFunction::eval(double rho) const {
  require_positive(rho);
  switch (kind_) {
    case Kind::Log: return std::log(rho);
    case Kind::Linear: return rho;
    case Kind::Power: return scale_ * std::pow(rho, a_);
    case Kind::InverseMA: return 1.0 - 1.0 / rho;
    case Kind::NegativePower: return -scale_ * std::pow(rho, a_);
    case Kind::Custom: {
      double s = 0.0;
      for (const auto& [k, c] : coeffs_) s += c * std::pow(rho, k);
      return s;
    }
  }
  return 0.0;
}

double SpeedFunction::raw_deriv(double rho) const {
  switch (kind_) {
    case Kind::Log: return 1.0 / rho;
    case Kind::Linear: return 1.0;
    case Kind::Power: return scale_ * a_ * std::pow(rho, a_ - 1.0);
    case Kind::InverseMA: return 1.0 / (rho * rho);
    case Kind::NegativePower: return -scale_ * a_ * std::pow(rho, a_ - 1.0);
    case Kind::Custom: {
      double s = 0.0;
      for (const auto& [k, c] : coeffs_)
        if (k != 0) s += c * k * std::pow(rho, k - 1);
      return s;
    }
  }
  return 0.0;
}

double SpeedFunction::deriv(double rho) const {
  require_positive(rho);
  const double d = raw_deriv(rho);
  if (!(d > 0.0)) throw ParabolicityError(rho, d);
  return d;
}

double SpeedFunction::deriv2(double rho) const {
  require_positive(rho);
  switch (kind_) {
    case Kind::Log: return -1.0 / (rho * rho);
    case Kind::Linear: return 0.0;
    case Kind::Power: return scale_ * a_ * (a_ - 1.0) * std::pow(rho, a_ - 2.0);
    case Kind::InverseMA: return -2.0 / (rho * rho * rho);
    case Kind::NegativePower: return -scale_ * a_ * (a_ - 1.0) * std::pow(rho, a_ - 2.0);
    case Kind::Custom: {
      double s = 0.0;
      for (const auto& [k, c] : coeffs_)
        if (k != 0 && k != 1) s += c * k * (k - 1) * std::pow(rho, k - 2);
      return s;
    }
  }
  return 0.0;
}

void SpeedFunction::validate(double rho_min, double rho_max) const {
  require_positive(rho_min);
  if (rho_max < rho_min) throw InvalidInput("speed validation range is empty");
  constexpr int kSamples = 1000;
  const double lo = std::log(rho_min);
  const double hi = std::log(rho_max);
  for (int i = 0; i < kSamples; ++i) {
    const double rho = std::exp(lo + (hi - lo) * i / (kSamples - 1));
    const double d = raw_deriv(rho);
    if (!(d > 0.0)) throw ParabolicityError(rho, d);
  }
}

double beta_to_exponent(double beta, int n) {
  const double denom = 2.0 * n - 2.0 - n * beta;
  if (denom == 0.0)
    throw SingularReduction("beta = (2n-2)/n makes the reduced-flow exponent singular");
  const double a = (n - 2.0) * beta / denom;
  if (a == 0.0) throw SingularReduction("reduced-flow exponent is 0: the speed would be constant");
  return a;
}

SpeedFunction reduced_anomaly_speed(double beta, int n, int sigma) {
  if (n < 2) throw InvalidInput("reduced Anomaly-type flows need n >= 2");
  const double a = beta_to_exponent(beta, n);
  const double scale = 1.0 / (n - 1.0);
  return sigma == 0 ? SpeedFunction::power(a, scale) : SpeedFunction::negative_power(a, scale);
}

}  // namespace cmaflow
