#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskbias/types.hpp"

namespace riskbias {

// ---------------------------------------------------------------------------
// Histogram-classifier Monte Carlo
// ---------------------------------------------------------------------------

// Draws N i.i.d. points (cell ~ categorical(alpha), label ~ Bernoulli(p_cell))
// and returns the per-cell counts. Deterministic given the seed.
SampleCounts sample_histogram(const HistogramDistribution& dist, const ProblemSize& size,
                              std::uint64_t seed);

// Per-cell majority labels; ties (including empty cells) flip a fair coin
// drawn from the seed.
std::vector<std::uint8_t> train_histogram(const SampleCounts& counts, std::uint64_t seed);

// Exact risk of a fixed label assignment: sum_j alpha_j * (p_j or 1 - p_j).
double true_risk_histogram(const HistogramDistribution& dist,
                           std::span<const std::uint8_t> labels);

// Training error sum_j min(m_j, n_j - m_j) / N; tie cells contribute the same
// either way, so no coin is involved.
double empirical_risk_of(const SampleCounts& counts);

// Exact leave-one-out estimate computed per cell from (m, n); ties in the
// reduced cell count as expected loss 0.5. Requires N >= 2.
double loo_histogram(const SampleCounts& counts);

struct Aggregate {
    double mean = 0.0;
    double se = 0.0;
};

struct RiskReport {
    Aggregate empirical;
    Aggregate loo;
    Aggregate true_risk;
    int replicates = 0;
};

// reps independent sample/train/evaluate replicates; replicate r uses streams
// derived from (seed, r), so results do not depend on thread count.
RiskReport histogram_mc(const HistogramDistribution& dist, const ProblemSize& size, int reps,
                        std::uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// Continuous models and decision trees
// ---------------------------------------------------------------------------

// Piecewise-constant conditional law on [0,1]^dim: P(y=1|x) = g1 inside
// [0, delta]^dim, g2 outside, delta = theta^(1/dim).
struct ContinuousModel {
    int dim = 1;
    double theta = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double delta = 0.0;
    ContinuousModel(int dim, double theta, double g1, double g2);
};

struct FamilyMember {
    std::string family;
    double param = 0.0;
    ContinuousModel model;
};

// Parametric distribution families used for simulation sweeps.
//  A:        g2 = 1; g1 sweeps [0, 1/2] at theta0, then theta sweeps down to
//            theta0/10 at g1 = 1/2 (members labelled "A-g1" / "A-theta").
//  B:        theta = 1/2, g1 = g', g2 = 1 - g', g' in [0, 1/2].
//  Section6: same shape as B with delta fixed by inner volume 1/2.
struct ModelFamily {
    enum class Variant { A, B, Section6 };
    Variant variant = Variant::A;
    int dim = 2;
    double theta0 = 0.83;
    int g1_points = 20;
    int theta_points = 20;
    int param_points = 20;
    std::vector<FamilyMember> members() const;
};

struct LabeledPoint {
    std::vector<double> x;
    int y = 0;
};

// x uniform on the cube; y ~ Bernoulli(g1 or g2 by region).
std::vector<LabeledPoint> sample_continuous(const ContinuousModel& model, int n,
                                            std::uint64_t seed);

struct TreeNode {
    int axis = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;
    std::vector<double> lo;
    std::vector<double> hi;
    bool is_leaf() const { return left < 0; }
};

struct DecisionTree {
    int dim = 0;
    std::vector<TreeNode> nodes;
    int leaf_count() const;
    int predict(std::span<const double> x) const;
};

// Greedy axis-aligned growth: repeatedly applies the split (midpoints between
// consecutive distinct coordinates) with the largest Gini impurity reduction,
// until max_leaves leaves or no split improves. Leaf label = majority class,
// ties -> class 0.
DecisionTree train_tree(std::span<const LabeledPoint> points, int max_leaves);

double training_error(const DecisionTree& tree, std::span<const LabeledPoint> points);

// Exact risk of the tree under the model, via per-leaf rectangle volumes and
// their overlap with the inner region. Verifies the leaf volumes partition
// the cube.
double tree_true_risk(const ContinuousModel& model, const DecisionTree& tree);

// Leave-one-out estimate for the tree learner: retrains on each deleted-point
// sample and scores the held-out point.
double loo_tree(std::span<const LabeledPoint> points, int max_leaves);

struct McCurvePoint {
    std::string family;
    double param = 0.0;
    double mean_empirical = 0.0;
    double mean_risk = 0.0;
    double se_empirical = 0.0;
    double se_risk = 0.0;
    int reps = 0;
    double bias() const { return mean_risk - mean_empirical; }
};

// Per family member: reps train runs, averaging training error and exact true
// risk. Member i, replicate r draws from streams derived from (seed, i, r).
std::vector<McCurvePoint> mc_bias_curve(const ModelFamily& family, int n, int max_leaves,
                                        int reps, std::uint64_t seed, int threads = 1);

}  // namespace riskbias
