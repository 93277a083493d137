#include "nwtd/truth.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nwtd {

namespace {

constexpr double kSeriesLimit = 20.0;

void check_bessel_args(double order, double x) {
  if (!(x >= 0.0)) throw std::domain_error("bessel_i: x must be nonnegative");
  if (!(order >= 0.0)) throw std::domain_error("bessel_i: order must be nonnegative");
}

bool use_asymptotic(double order, double x) {
  return x > kSeriesLimit && x > 0.5 * order * order;
}

}  // namespace

double bessel_i_scaled_series(double order, double x) {
  check_bessel_args(order, x);
  if (x == 0.0) return order == 0.0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  const double q = half * half;
  double term = std::exp(order * std::log(half) - std::lgamma(order + 1.0) - x);
  double sum = term;
  for (int k = 1; k < 10000; ++k) {
    term *= q / (k * (k + order));
    sum += term;
    if (term <= sum * 1e-17 && k > half) break;
  }
  return sum;
}

double bessel_i_scaled_asymptotic(double order, double x) {
  check_bessel_args(order, x);
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) <= std::abs(sum) * 1e-17) break;
  }
  return sum / std::sqrt(2.0 * M_PI * x);
}

double bessel_i_scaled(double order, double x) {
  check_bessel_args(order, x);
  return use_asymptotic(order, x) ? bessel_i_scaled_asymptotic(order, x)
                                  : bessel_i_scaled_series(order, x);
}

double bessel_i(double order, double x) {
  const double scaled = bessel_i_scaled(order, x);
  if (x > 709.0) return std::exp(x + std::log(scaled));
  return scaled * std::exp(x);
}

double ou_transition(double r, double gamma, double t, double x, double y) {
  if (!(t > 0.0)) throw std::domain_error("transition lag t must be positive");
  const double mean = x * std::exp(-0.5 * r * t);
  const double var = gamma * gamma * -std::expm1(-r * t) / (4.0 * r);
  const double z = y - mean;
  return std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

double tanh_ou_transition(double r, double gamma, double t, double x, double y) {
  if (!(std::abs(x) < 1.0) || !(std::abs(y) < 1.0)) {
    throw std::domain_error("tanh_ou transition requires |x| < 1 and |y| < 1");
  }
  return ou_transition(r, gamma, t, std::atanh(x), std::atanh(y)) / (1.0 - y * y);
}

double cir_transition(int d, double r, double gamma, double t, double x, double y) {
  if (!(t > 0.0)) throw std::domain_error("transition lag t must be positive");
  if (!(x > 0.0)) throw std::domain_error("cir transition requires x > 0");
  if (d < 2) throw std::domain_error("cir transition requires d >= 2");
  if (y < 0.0) return 0.0;
  const double c = 2.0 * r / (gamma * gamma * -std::expm1(-r * t));
  const double xe = x * std::exp(-r * t);
  const double nu = 0.5 * d - 1.0;
  if (y == 0.0) return nu == 0.0 ? c * std::exp(-c * xe) : 0.0;
  // exp(-c (xe + y)) I(z) = exp(-c (sqrt(xe) - sqrt(y))^2) * exp(-z) I(z)
  const double z = 2.0 * c * std::sqrt(xe * y);
  const double gap = std::sqrt(xe) - std::sqrt(y);
  const double log_ratio = std::log(y / xe);
  return c * std::exp(-c * gap * gap + 0.5 * nu * log_ratio) * bessel_i_scaled(nu, z);
}

double transition_density(const ModelSpec& model, double t, double x, double y) {
  const auto& p = model.params;
  switch (model.kind) {
    case ModelKind::ou:
      return ou_transition(p.r, p.gamma, t, x, y);
    case ModelKind::tanh_ou:
      return tanh_ou_transition(p.r, p.gamma, t, x, y);
    case ModelKind::cir:
      return cir_transition(p.d, p.r, p.gamma, t, x, y);
  }
  throw std::logic_error("unknown model kind");
}

double stationary_density(const ModelSpec& model, double x) {
  const auto& p = model.params;
  const double var = p.stationary_variance();
  switch (model.kind) {
    case ModelKind::ou:
      return std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
    case ModelKind::tanh_ou: {
      if (!(std::abs(x) < 1.0)) throw std::domain_error("tanh_ou state space is (-1, 1)");
      const double u = std::atanh(x);
      return std::exp(-u * u / (2.0 * var)) / std::sqrt(2.0 * M_PI * var) / (1.0 - x * x);
    }
    case ModelKind::cir: {
      if (x < 0.0) return 0.0;
      // Gamma(shape d/2, rate 2r/gamma^2)
      const double shape = 0.5 * p.d;
      const double rate = 2.0 * p.r / (p.gamma * p.gamma);
      if (x == 0.0) return shape == 1.0 ? rate : (shape < 1.0 ? std::numeric_limits<double>::infinity() : 0.0);
      return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                      std::lgamma(shape));
    }
  }
  throw std::logic_error("unknown model kind");
}

}  // namespace nwtd
