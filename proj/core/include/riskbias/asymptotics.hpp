#pragma once

namespace riskbias {

// Poisson-limit cell quantities: the cell holds n ~ Poisson(gamma) points,
// gamma = N * alpha, and m | n ~ Binomial(n, p). Sums are truncated once the
// remaining Poisson tail mass drops below 1e-13.

// Expected training-error count of the majority rule: E min(m, n-m).
double poisson_cell_errors(double gamma, double p);

// Expected conditional misclassification probability of the majority rule.
double poisson_cell_risk(double gamma, double p);

// Breakpoint z_T = poisson_cell_errors(1, 1/2) of the bias kernel, computed
// once at first use.
double cell_errors_breakpoint();

// Inverse of z = poisson_cell_errors(1, p) on p in [0, 1/2]; z in [0, z_T].
double noise_for_cell_errors(double z);

// Inverse of z = poisson_cell_errors(gamma, 1/2) on gamma >= 1; z >= z_T.
double occupancy_for_cell_errors(double z);

// Bias kernel psi: poisson_cell_risk(1, p*(z)) below the breakpoint, half the
// solved occupancy above it. Continuous at z_T where both sides equal 1/2.
double bias_kernel(double z);

// Closed-form approximation: linear below z_T, numerically inverted
// closed-form inverse above. Relative error vs bias_kernel stays under 1%.
double bias_kernel_approx(double z);

// Largest e0 with bias_kernel(M*e0)/M <= 1/2, i.e. the curve's domain edge.
double max_admissible_empirical_risk(double relative_size);

// Approximate maximal bias (1/M) psi(M e0) - e0 for relative sample size
// M >= 1. Throws DomainError (carrying the admissible maximum) beyond the
// domain edge.
double max_bias_asymptotic(double e0, double relative_size);

}  // namespace riskbias
