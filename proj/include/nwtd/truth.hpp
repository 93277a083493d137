#pragma once

#include "nwtd/diffusion.hpp"

namespace nwtd {

/// Modified Bessel function of the first kind I_order(x), x >= 0, order >= 0.
double bessel_i(double order, double x);

/// exp(-x) * I_order(x); finite for every x >= 0.
double bessel_i_scaled(double order, double x);

// Branches exposed for cross-checking at the switchover point.
double bessel_i_scaled_series(double order, double x);
double bessel_i_scaled_asymptotic(double order, double x);

/// Model 1: Gaussian in y with mean x e^{-rt/2} and variance gamma^2 (1 - e^{-rt}) / (4 r).
double ou_transition(double r, double gamma, double t, double x, double y);

/// Model 2: change of variables of the OU density through tanh.
double tanh_ou_transition(double r, double gamma, double t, double x, double y);

/// Model 3: squared norm of a d-dimensional OU process (CIR), x > 0, y >= 0.
double cir_transition(int d, double r, double gamma, double t, double x, double y);

/// p_t(x, y) for any of the three models.
double transition_density(const ModelSpec& model, double t, double x, double y);

/// Invariant density of the observed process (the law every simulated path starts from).
double stationary_density(const ModelSpec& model, double x);

}  // namespace nwtd
