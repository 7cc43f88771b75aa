#pragma once

#include <span>

#include "riskbias/types.hpp"

namespace riskbias {

// Binomial pmf C(n,m) p^m (1-p)^(n-m), evaluated in log space so it stays
// finite and accurate for n up to ~1e6.
double binom_pmf(int m, int n, double p);

// Training errors the per-cell majority rule makes on a cell holding m class-1
// points out of n: min(m, n-m).
int erm_cell_errors(int m, int n);

// Misclassification probability of the per-cell majority rule, conditional on
// the cell, after seeing (m, n). Ties (including empty cells) are decided by a
// fair coin, whose expected loss is 0.5.
double erm_cell_risk(int m, int n, double p);

// Cell statistic averaged by cell_expectation.
enum class CellFunction {
    EmpiricalRisk,  // min(m, n-m)/N
    Risk,           // alpha * erm_cell_risk(m, n, p)
    Bias,           // Risk - EmpiricalRisk
};

// Exact expectation of a cell statistic under n ~ Binomial(N, alpha),
// m | n ~ Binomial(n, p). Full double sum, compensated accumulation.
double cell_expectation(const CellParams& cell, const ProblemSize& size, CellFunction fn);

// Expected empirical risk E-bar(c) of the trained histogram classifier.
double expected_empirical_risk(const HistogramDistribution& dist, const ProblemSize& size);

// Expected risk F(c) of the trained histogram classifier.
double expected_risk(const HistogramDistribution& dist, const ProblemSize& size);

// Both expectations and their difference S = F - E-bar.
BiasPoint bias(const HistogramDistribution& dist, const ProblemSize& size);

// Expected empirical risk of the worst-case family at the branch switch
// (alpha' = 1/N, p' = 1/2): E_T.
double empirical_risk_threshold(const ProblemSize& size);

// Range of expected empirical risk swept by the worst-case family.
Interval attainable_empirical_risk(const ProblemSize& size);

// z-range covered by the per-cell envelope.
Interval envelope_domain(const ProblemSize& size);

// Upper boundary zeta(z) of k*mu_bias over cells with mass in [1/N, 1/k] at
// fixed z = k*mu_empirical. Two parametric branches: mass 1/N with p in
// [0, 1/2], then p = 1/2 with mass in [1/N, 1/k]. The scalar solves use
// bisection on the monotone branch parameter.
double envelope_at(const ProblemSize& size, double z);

// envelope_at over a grid; points carry (z, zeta(z), z + zeta(z)).
BiasCurve envelope(const ProblemSize& size, std::span<const double> z_grid);

// The explicit near-extremal distribution: k-1 cells at (alpha', p') plus one
// remainder cell with p = 0 absorbing the leftover mass. For e0 <= E_T,
// alpha' = 1/N and p' solves the empirical-risk equation; past E_T, p' = 1/2
// and alpha' in [1/N, 1/(k-1)] solves it.
HistogramDistribution worst_distribution(double e0, const ProblemSize& size);

// Exact finite-sample maximal-bias curve point: bias(worst_distribution(e0)).
BiasPoint max_bias_exact(double e0, const ProblemSize& size);

}  // namespace riskbias
