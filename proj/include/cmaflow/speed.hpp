#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cmaflow {

/// Strictly increasing speed F applied to rho = e^{-f} det h.
///
/// Covered cases:
///   Log                 F = log rho            (Kahler-Ricci flow)
///   Linear              F = rho                (conformally Kahler Anomaly flow)
///   Power(a, s)         F = s rho^a
///   InverseMA           F = 1 - 1/rho
///   NegativePower(a, s) F = -s rho^a           (sign-flipped reduced flows, a < 0)
///   Custom              F = sum_k c_k rho^k, k in Z
class SpeedFunction {
 public:
  enum class Kind { Log, Linear, Power, InverseMA, NegativePower, Custom };

  static SpeedFunction log();
  static SpeedFunction linear();
  static SpeedFunction power(double a, double scale = 1.0);
  static SpeedFunction inverse_ma();
  static SpeedFunction negative_power(double a, double scale);
  static SpeedFunction custom(std::vector<std::pair<int, double>> coeffs);

  /// Parses "log", "linear", "power:<a>", "inverse_ma", "negative_power:<a>:<scale>".
  static SpeedFunction from_token(const std::string& token);

  Kind kind() const { return kind_; }
  double exponent() const { return a_; }
  double scale() const { return scale_; }
  const std::vector<std::pair<int, double>>& coeffs() const { return coeffs_; }

  /// Token understood by from_token (custom speeds render as "custom").
  std::string name() const;

  /// F(rho). Throws DomainError for rho <= 0.
  double eval(double rho) const;
  /// F'(rho). Throws DomainError for rho <= 0, ParabolicityError if F' <= 0.
  double deriv(double rho) const;
  /// F''(rho). Throws DomainError for rho <= 0.
  double deriv2(double rho) const;

  /// Checks F' > 0 on 1000 log-spaced samples of [rho_min, rho_max].
  void validate(double rho_min, double rho_max) const;

 private:
  SpeedFunction(Kind kind, double a, double scale) : kind_(kind), a_(a), scale_(scale) {}
  double raw_deriv(double rho) const;

  Kind kind_;
  double a_ = 1.0;
  double scale_ = 1.0;
  std::vector<std::pair<int, double>> coeffs_;
};

/// Exponent a = (n-2) beta / (2n - 2 - n beta) of the reduced Anomaly-type
/// flow. Throws SingularReduction when the denominator vanishes or a == 0.
double beta_to_exponent(double beta, int n);

/// F = (-1)^sigma rho^a / (n-1) with a = beta_to_exponent(beta, n).
SpeedFunction reduced_anomaly_speed(double beta, int n, int sigma);

}  // namespace cmaflow
