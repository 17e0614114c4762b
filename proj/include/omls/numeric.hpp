#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace omls {

// Trapezoidal integral of uniformly sampled values.
double trapezoid(std::span<const double> y, double dx);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least-squares line through (x, y).
LineFit linear_fit(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> v);

struct MinResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

// Golden-section minimum of f on [lo, hi], narrowed until the bracket is
// smaller than rel_tol * max(|x|, 1).
MinResult golden_section_min(const std::function<double(double)>& f, double lo,
                             double hi, double rel_tol = 1e-6);

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Each index must write only to its own output slot; the
// dispatch order is unspecified.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace omls
