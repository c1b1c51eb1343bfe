#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

#include "quadrix/funcspec.hpp"

namespace quadrix {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss rule for the weight (1 - x^2)^gamma on [-1, 1] (Golub-Welsch).
/// gamma = 0 is Gauss-Legendre.
Rule1D gauss_gegenbauer(int order, double gamma);

/// Gauss-Legendre rule mapped to [0, 1].
Rule1D gauss_legendre_unit(int order);

/// Quadrature rule on the unit sphere S^{n-1} in R^n. Weights sum to its area.
struct SphereRule {
    int dimension = 0;
    std::vector<Vec> directions;
    std::vector<double> weights;
};

/// Product rule: trapezoid in the azimuth with `resolution` points and Gauss-Gegenbauer
/// in each polar angle with resolution/2 points. n = 1 gives {+1, -1} for any resolution.
SphereRule sphere_rule(int n, int resolution);

/// Largest even resolution whose product rule has at most `count` directions (>= 4).
int resolution_for_count(int n, int count);

/// Number of directions in sphere_rule(n, resolution).
long direction_count(int n, int resolution);

/// Deterministic pairwise sum; the result does not depend on how terms were produced.
double pairwise_sum(const double* first, std::size_t count);

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

/// Runs fn(chunk) for chunk in [0, chunks) on up to `jobs` threads. Exceptions are
/// rethrown from the lowest failing chunk so behaviour is independent of scheduling.
void parallel_chunks(std::size_t chunks, int jobs, const std::function<void(std::size_t)>& fn);

/// Worker count from --jobs, else QUADRIX_JOBS, else 1.
int resolve_jobs(int requested);

} // namespace quadrix
