#pragma once

#include <cmath>
#include <utility>

#include "riskbias/errors.hpp"

namespace riskbias {

// Compensated accumulator for long probability sums.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct BisectOptions {
    double x_tol = 1e-10;
    int max_iter = 200;
};

// Solves f(x) = target for nondecreasing f on [lo, hi] by bisection.
// Endpoint targets resolve to the exact endpoint. Throws InternalError when the
// bracket does not contain the target (an invariant violation in the caller).
template <class F>
double bisect_increasing(F&& f, double lo, double hi, double target, BisectOptions opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    if (target <= flo) {
        if (target < flo - 1e-9) {
            throw InternalError("bisect_increasing: target below bracket");
        }
        return lo;
    }
    if (target >= fhi) {
        if (target > fhi + 1e-9) {
            throw InternalError("bisect_increasing: target above bracket");
        }
        return hi;
    }
    for (int i = 0; i < opt.max_iter && hi - lo > opt.x_tol; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace riskbias
