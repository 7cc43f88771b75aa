#include "riskbias/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskbias/exact_bias.hpp"
#include "riskbias/numeric.hpp"
#include "riskbias/parallel.hpp"
#include "riskbias/rng.hpp"

namespace riskbias {

namespace {

Aggregate aggregate(const std::vector<double>& xs) {
    Aggregate a;
    const int n = static_cast<int>(xs.size());
    if (n == 0) return a;
    KahanSum sum;
    for (double x : xs) sum.add(x);
    a.mean = sum.value() / n;
    if (n > 1) {
        KahanSum sq;
        for (double x : xs) sq.add((x - a.mean) * (x - a.mean));
        a.se = std::sqrt(sq.value() / (n - 1)) / std::sqrt(static_cast<double>(n));
    }
    return a;
}

}  // namespace

SampleCounts sample_histogram(const HistogramDistribution& dist, const ProblemSize& size,
                              std::uint64_t seed) {
    validate(dist);
    if (dist.cell_count() != size.k()) {
        throw ArgumentError("sample_histogram: distribution has wrong cell count");
    }
    std::vector<double> cum(dist.cells.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < dist.cells.size(); ++j) {
        acc += dist.cells[j].alpha;
        cum[j] = acc;
    }
    Rng rng(seed);
    SampleCounts counts;
    counts.cells.assign(dist.cells.size(), CellCounts{});
    for (int i = 0; i < size.n(); ++i) {
        double u = rng.next_double();
        std::size_t j = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        if (j >= dist.cells.size()) j = dist.cells.size() - 1;
        counts.cells[j].total += 1;
        if (rng.bernoulli(dist.cells[j].p)) counts.cells[j].class1 += 1;
    }
    return counts;
}

std::vector<std::uint8_t> train_histogram(const SampleCounts& counts, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint8_t> labels(counts.cells.size(), 0);
    for (std::size_t j = 0; j < counts.cells.size(); ++j) {
        const CellCounts& c = counts.cells[j];
        int zeros = c.total - c.class1;
        if (c.class1 > zeros) {
            labels[j] = 1;
        } else if (c.class1 == zeros) {
            labels[j] = rng.bernoulli(0.5) ? 1 : 0;
        }
    }
    return labels;
}

double true_risk_histogram(const HistogramDistribution& dist,
                           std::span<const std::uint8_t> labels) {
    validate(dist);
    if (labels.size() != dist.cells.size()) {
        throw ArgumentError("true_risk_histogram: label count mismatch");
    }
    KahanSum risk;
    for (std::size_t j = 0; j < dist.cells.size(); ++j) {
        const CellParams& c = dist.cells[j];
        risk.add(c.alpha * (labels[j] ? 1.0 - c.p : c.p));
    }
    return risk.value();
}

double empirical_risk_of(const SampleCounts& counts) {
    int total = 0;
    int errors = 0;
    for (const CellCounts& c : counts.cells) {
        total += c.total;
        errors += std::min(c.class1, c.total - c.class1);
    }
    if (total == 0) throw ArgumentError("empirical_risk_of: empty sample");
    return static_cast<double>(errors) / total;
}

double loo_histogram(const SampleCounts& counts) {
    const int n_total = counts.total();
    if (n_total < 2) throw ArgumentError("loo_histogram: needs N >= 2");
    KahanSum loo;
    for (const CellCounts& c : counts.cells) {
        const int m = c.class1;
        const int n = c.total;
        if (n == 0) continue;
        // Removing a class-1 point leaves (m-1, n-1): it is misclassified when
        // the rest votes 0, half the time on a tie.
        if (m > 0) {
            double e1 = m - 1 < n - m ? 1.0 : (m - 1 == n - m ? 0.5 : 0.0);
            loo.add(m * e1);
        }
        // Removing a class-0 point leaves (m, n-1).
        if (n - m > 0) {
            double e0 = m > n - 1 - m ? 1.0 : (m == n - 1 - m ? 0.5 : 0.0);
            loo.add((n - m) * e0);
        }
    }
    return loo.value() / n_total;
}

RiskReport histogram_mc(const HistogramDistribution& dist, const ProblemSize& size, int reps,
                        std::uint64_t seed, int threads) {
    if (reps < 1) throw ArgumentError("histogram_mc: reps must be >= 1");
    validate(dist);
    std::vector<double> emp(reps);
    std::vector<double> loo(reps);
    std::vector<double> risk(reps);
    parallel_for(reps, threads, [&](int r) {
        SampleCounts counts = sample_histogram(dist, size, substream(seed, r, 0));
        std::vector<std::uint8_t> labels = train_histogram(counts, substream(seed, r, 1));
        emp[r] = empirical_risk_of(counts);
        loo[r] = loo_histogram(counts);
        risk[r] = true_risk_histogram(dist, labels);
    });
    RiskReport report;
    report.empirical = aggregate(emp);
    report.loo = aggregate(loo);
    report.true_risk = aggregate(risk);
    report.replicates = reps;
    return report;
}

// ---------------------------------------------------------------------------
// Continuous models
// ---------------------------------------------------------------------------

ContinuousModel::ContinuousModel(int dim_, double theta_, double g1_, double g2_)
    : dim(dim_), theta(theta_), g1(g1_), g2(g2_) {
    if (dim < 1) throw ArgumentError("ContinuousModel: dim must be >= 1");
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw ArgumentError("ContinuousModel: theta must be in [0, 1]");
    }
    if (!(g1 >= 0.0 && g1 <= 1.0) || !(g2 >= 0.0 && g2 <= 1.0)) {
        throw ArgumentError("ContinuousModel: g1, g2 must be in [0, 1]");
    }
    delta = std::pow(theta, 1.0 / dim);
    if (std::abs(std::pow(delta, dim) - theta) > 1e-12) {
        throw InternalError("ContinuousModel: delta^dim does not reproduce theta");
    }
}

std::vector<FamilyMember> ModelFamily::members() const {
    auto grid = [](double lo, double hi, int count) {
        std::vector<double> g;
        if (count <= 1) {
            g.push_back(lo);
            return g;
        }
        for (int i = 0; i < count; ++i) {
            g.push_back(lo + (hi - lo) * i / (count - 1));
        }
        return g;
    };
    std::vector<FamilyMember> out;
    switch (variant) {
        case Variant::A: {
            for (double g1 : grid(0.0, 0.5, g1_points)) {
                out.push_back({"A-g1", g1, ContinuousModel(dim, theta0, g1, 1.0)});
            }
            for (double th : grid(theta0, theta0 / 10.0, theta_points)) {
                out.push_back({"A-theta", th, ContinuousModel(dim, th, 0.5, 1.0)});
            }
            break;
        }
        case Variant::B: {
            for (double gp : grid(0.0, 0.5, param_points)) {
                out.push_back({"B", gp, ContinuousModel(dim, 0.5, gp, 1.0 - gp)});
            }
            break;
        }
        case Variant::Section6: {
            for (double gp : grid(0.0, 0.5, param_points)) {
                out.push_back({"section6", gp, ContinuousModel(dim, 0.5, gp, 1.0 - gp)});
            }
            break;
        }
    }
    return out;
}

std::vector<LabeledPoint> sample_continuous(const ContinuousModel& model, int n,
                                            std::uint64_t seed) {
    if (n < 1) throw ArgumentError("sample_continuous: n must be >= 1");
    Rng rng(seed);
    std::vector<LabeledPoint> points(n);
    for (LabeledPoint& pt : points) {
        pt.x.resize(model.dim);
        bool inside = true;
        for (double& c : pt.x) {
            c = rng.next_double();
            inside = inside && c < model.delta;
        }
        pt.y = rng.bernoulli(inside ? model.g1 : model.g2) ? 1 : 0;
    }
    return points;
}

// ---------------------------------------------------------------------------
// Greedy decision trees
// ---------------------------------------------------------------------------

int DecisionTree::leaf_count() const {
    int c = 0;
    for (const TreeNode& nd : nodes) c += nd.is_leaf() ? 1 : 0;
    return c;
}

int DecisionTree::predict(std::span<const double> x) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
        i = x[nodes[i].axis] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    return nodes[i].label;
}

namespace {

// Count-weighted Gini impurity: n * (1 - q0^2 - q1^2).
double gini_impurity(int c1, int n) {
    if (n == 0) return 0.0;
    double c0 = n - c1;
    return n - (c0 * c0 + static_cast<double>(c1) * c1) / n;
}

struct BestSplit {
    double gain = 1e-9;  // minimum accepted improvement
    int node = -1;
    int axis = -1;
    double threshold = 0.0;
};

}  // namespace

DecisionTree train_tree(std::span<const LabeledPoint> points, int max_leaves) {
    if (points.empty()) throw ArgumentError("train_tree: empty sample");
    if (max_leaves < 1) throw ArgumentError("train_tree: max_leaves must be >= 1");
    const int dim = static_cast<int>(points[0].x.size());
    for (const LabeledPoint& pt : points) {
        if (static_cast<int>(pt.x.size()) != dim) {
            throw ArgumentError("train_tree: inconsistent dimensions");
        }
        if (pt.y != 0 && pt.y != 1) throw ArgumentError("train_tree: labels must be 0/1");
    }

    DecisionTree tree;
    tree.dim = dim;
    TreeNode root;
    root.lo.assign(dim, 0.0);
    root.hi.assign(dim, 1.0);
    tree.nodes.push_back(std::move(root));

    std::vector<std::vector<int>> node_points(1);
    node_points[0].resize(points.size());
    std::iota(node_points[0].begin(), node_points[0].end(), 0);

    int leaves = 1;
    std::vector<std::pair<double, int>> order;  // (coordinate, label) scratch
    while (leaves < max_leaves) {
        BestSplit best;
        for (int ni = 0; ni < static_cast<int>(tree.nodes.size()); ++ni) {
            if (!tree.nodes[ni].is_leaf()) continue;
            const std::vector<int>& idx = node_points[ni];
            const int n = static_cast<int>(idx.size());
            if (n < 2) continue;
            int c1 = 0;
            for (int i : idx) c1 += points[i].y;
            const double parent = gini_impurity(c1, n);
            if (parent <= 0.0) continue;  // pure leaf
            for (int ax = 0; ax < dim; ++ax) {
                order.clear();
                for (int i : idx) order.emplace_back(points[i].x[ax], points[i].y);
                std::sort(order.begin(), order.end());
                int left_n = 0;
                int left_c1 = 0;
                for (int t = 0; t + 1 < n; ++t) {
                    left_n += 1;
                    left_c1 += static_cast<int>(order[t].second);
                    if (order[t].first == order[t + 1].first) continue;
                    double gain = parent - gini_impurity(left_c1, left_n) -
                                  gini_impurity(c1 - left_c1, n - left_n);
                    if (gain > best.gain) {
                        best = BestSplit{gain, ni, ax,
                                         0.5 * (order[t].first + order[t + 1].first)};
                    }
                }
            }
        }
        if (best.node < 0) break;

        const int li = static_cast<int>(tree.nodes.size());
        const int ri = li + 1;
        TreeNode& parent = tree.nodes[best.node];
        TreeNode left;
        TreeNode right;
        left.lo = parent.lo;
        left.hi = parent.hi;
        left.hi[best.axis] = best.threshold;
        right.lo = parent.lo;
        right.hi = parent.hi;
        right.lo[best.axis] = best.threshold;
        parent.axis = best.axis;
        parent.threshold = best.threshold;
        parent.left = li;
        parent.right = ri;

        std::vector<int> li_pts;
        std::vector<int> ri_pts;
        for (int i : node_points[best.node]) {
            (points[i].x[best.axis] < best.threshold ? li_pts : ri_pts).push_back(i);
        }
        node_points[best.node].clear();
        tree.nodes.push_back(std::move(left));
        tree.nodes.push_back(std::move(right));
        node_points.push_back(std::move(li_pts));
        node_points.push_back(std::move(ri_pts));
        leaves += 1;
    }

    for (int ni = 0; ni < static_cast<int>(tree.nodes.size()); ++ni) {
        if (!tree.nodes[ni].is_leaf()) continue;
        int c1 = 0;
        for (int i : node_points[ni]) c1 += points[i].y;
        int c0 = static_cast<int>(node_points[ni].size()) - c1;
        tree.nodes[ni].label = c1 > c0 ? 1 : 0;
    }
    return tree;
}

double training_error(const DecisionTree& tree, std::span<const LabeledPoint> points) {
    if (points.empty()) throw ArgumentError("training_error: empty sample");
    int errors = 0;
    for (const LabeledPoint& pt : points) {
        errors += tree.predict(pt.x) != pt.y ? 1 : 0;
    }
    return static_cast<double>(errors) / points.size();
}

double tree_true_risk(const ContinuousModel& model, const DecisionTree& tree) {
    if (tree.dim != model.dim) throw ArgumentError("tree_true_risk: dimension mismatch");
    KahanSum volume;
    KahanSum risk;
    for (const TreeNode& nd : tree.nodes) {
        if (!nd.is_leaf()) continue;
        double vol = 1.0;
        double inner = 1.0;
        for (int ax = 0; ax < model.dim; ++ax) {
            vol *= nd.hi[ax] - nd.lo[ax];
            inner *= std::max(0.0, std::min(nd.hi[ax], model.delta) - nd.lo[ax]);
        }
        volume.add(vol);
        double err1 = nd.label == 0 ? model.g1 : 1.0 - model.g1;
        double err2 = nd.label == 0 ? model.g2 : 1.0 - model.g2;
        risk.add(inner * err1 + (vol - inner) * err2);
    }
    if (std::abs(volume.value() - 1.0) > 1e-9) {
        throw InternalError("tree_true_risk: leaf volumes do not partition the cube");
    }
    return risk.value();
}

double loo_tree(std::span<const LabeledPoint> points, int max_leaves) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw ArgumentError("loo_tree: needs at least 2 points");
    std::vector<LabeledPoint> reduced;
    reduced.reserve(n - 1);
    int errors = 0;
    for (int i = 0; i < n; ++i) {
        reduced.clear();
        for (int j = 0; j < n; ++j) {
            if (j != i) reduced.push_back(points[j]);
        }
        DecisionTree tree = train_tree(reduced, max_leaves);
        errors += tree.predict(points[i].x) != points[i].y ? 1 : 0;
    }
    return static_cast<double>(errors) / n;
}

std::vector<McCurvePoint> mc_bias_curve(const ModelFamily& family, int n, int max_leaves,
                                        int reps, std::uint64_t seed, int threads) {
    if (reps < 1) throw ArgumentError("mc_bias_curve: reps must be >= 1");
    const std::vector<FamilyMember> members = family.members();
    std::vector<McCurvePoint> curve(members.size());
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
        std::vector<double> emp(reps);
        std::vector<double> risk(reps);
        parallel_for(reps, threads, [&](int r) {
            std::vector<LabeledPoint> sample =
                sample_continuous(members[mi].model, n, substream(seed, mi, r));
            DecisionTree tree = train_tree(sample, max_leaves);
            emp[r] = training_error(tree, sample);
            risk[r] = tree_true_risk(members[mi].model, tree);
        });
        Aggregate ae = aggregate(emp);
        Aggregate ar = aggregate(risk);
        curve[mi] = McCurvePoint{members[mi].family, members[mi].param, ae.mean,
                                 ar.mean,           ae.se,              ar.se,  reps};
    }
    return curve;
}

}  // namespace riskbias
