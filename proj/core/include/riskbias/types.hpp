#pragma once

#include <vector>

#include "riskbias/errors.hpp"

namespace riskbias {

// Sample size N and cell count k of the histogram setting. The N < k regime is
// rejected at construction.
class ProblemSize {
public:
    ProblemSize(int sample_size, int cell_count) : n_(sample_size), k_(cell_count) {
        if (n_ < 1 || k_ < 1) {
            throw ArgumentError("ProblemSize: N and k must be positive");
        }
        if (n_ < k_) {
            throw ArgumentError("ProblemSize: N < k is not supported");
        }
    }
    int n() const { return n_; }
    int k() const { return k_; }
    // Relative sample size M = N/k, the average number of points per cell.
    double relative_size() const { return static_cast<double>(n_) / k_; }

private:
    int n_;
    int k_;
};

// One cell: mass alpha = P(x = j) and class-conditional p = P(y = 1 | x = j).
struct CellParams {
    double alpha = 0.0;
    double p = 0.0;
};

struct HistogramDistribution {
    std::vector<CellParams> cells;
    int cell_count() const { return static_cast<int>(cells.size()); }
};

// Throws ArgumentError unless cell parameters are in range and the masses sum
// to 1 within 1e-12.
void validate(const HistogramDistribution& dist);

// Per-cell sample summary: m = class-1 count, n = total count.
struct CellCounts {
    int class1 = 0;
    int total = 0;
};

struct SampleCounts {
    std::vector<CellCounts> cells;
    int total() const;
};

void validate(const SampleCounts& counts, const ProblemSize& size);

// One point of a bias curve: expected_risk = empirical_risk + bias.
struct BiasPoint {
    double empirical_risk = 0.0;
    double bias = 0.0;
    double expected_risk = 0.0;
};

using BiasCurve = std::vector<BiasPoint>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x, double tol = 1e-12) const { return x >= lo - tol && x <= hi + tol; }
};

}  // namespace riskbias
