#include "quadrix/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <thread>

#include "quadrix/error.hpp"

namespace quadrix {

Rule1D gauss_gegenbauer(int order, double gamma) {
    if (order < 1) {
        throw DomainError("quadrature order must be positive");
    }
    // Jacobi matrix of the monic orthogonal polynomials for (1 - x^2)^gamma:
    // zero diagonal, off-diagonal b_k^2 = k (k + 2 gamma) / ((2k + 2 gamma)^2 - 1).
    Mat T = Mat::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        double kk = k;
        double b2 = kk * (kk + 2.0 * gamma) / ((2.0 * kk + 2.0 * gamma) * (2.0 * kk + 2.0 * gamma) - 1.0);
        T(k, k - 1) = T(k - 1, k) = std::sqrt(b2);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(T);
    double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(gamma + 1.0) / std::tgamma(gamma + 1.5);
    Rule1D r;
    r.nodes.resize(order);
    r.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        r.nodes[i] = es.eigenvalues()[i];
        double v0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v0 * v0;
    }
    // symmetrise to kill eigen-solver noise
    for (int i = 0; i < order / 2; ++i) {
        int j = order - 1 - i;
        double x = 0.5 * (r.nodes[j] - r.nodes[i]);
        double w = 0.5 * (r.weights[i] + r.weights[j]);
        r.nodes[i] = -x;
        r.nodes[j] = x;
        r.weights[i] = r.weights[j] = w;
    }
    if (order % 2 == 1) {
        r.nodes[order / 2] = 0.0;
    }
    return r;
}

Rule1D gauss_legendre_unit(int order) {
    Rule1D r = gauss_gegenbauer(order, 0.0);
    for (int i = 0; i < order; ++i) {
        r.nodes[i] = 0.5 * (r.nodes[i] + 1.0);
        r.weights[i] *= 0.5;
    }
    return r;
}

namespace {

// Rule on S^m embedded in R^{m+1}.
void append_sphere(int m, int resolution, std::vector<Vec>& dirs, std::vector<double>& weights) {
    if (m == 0) {
        Vec a(1), b(1);
        a << 1.0;
        b << -1.0;
        dirs = {a, b};
        weights = {1.0, 1.0};
        return;
    }
    if (m == 1) {
        dirs.clear();
        weights.clear();
        const double dphi = 2.0 * std::numbers::pi / resolution;
        for (int i = 0; i < resolution; ++i) {
            double phi = (i + 0.5) * dphi;
            Vec u(2);
            u << std::cos(phi), std::sin(phi);
            dirs.push_back(u);
            weights.push_back(dphi);
        }
        return;
    }
    std::vector<Vec> sub_dirs;
    std::vector<double> sub_weights;
    append_sphere(m - 1, resolution, sub_dirs, sub_weights);
    Rule1D polar = gauss_gegenbauer(std::max(2, resolution / 2), 0.5 * (m - 2));
    dirs.clear();
    weights.clear();
    for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
        double c = polar.nodes[i];
        double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (std::size_t j = 0; j < sub_dirs.size(); ++j) {
            Vec u(m + 1);
            u[0] = c;
            u.tail(m) = s * sub_dirs[j];
            dirs.push_back(u);
            weights.push_back(polar.weights[i] * sub_weights[j]);
        }
    }
}

} // namespace

SphereRule sphere_rule(int n, int resolution) {
    if (n < 1 || n > kMaxDimension) {
        throw DomainError("sphere rule dimension out of range");
    }
    if (n > 1 && (resolution < 4 || resolution % 2 != 0)) {
        throw DomainError("sphere rule resolution must be even and at least 4");
    }
    SphereRule r;
    r.dimension = n;
    append_sphere(n - 1, resolution, r.directions, r.weights);
    return r;
}

long direction_count(int n, int resolution) {
    if (n == 1) {
        return 2;
    }
    long c = resolution;
    for (int i = 2; i < n; ++i) {
        c *= std::max(2, resolution / 2);
    }
    return c;
}

int resolution_for_count(int n, int count) {
    int best = 4;
    for (int r = 4; r <= 4096; r += 2) {
        if (direction_count(n, r) <= count) {
            best = r;
        } else {
            break;
        }
    }
    return best;
}

double pairwise_sum(const double* first, std::size_t count) {
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            s += first[i];
        }
        return s;
    }
    std::size_t half = count / 2;
    return pairwise_sum(first, half) + pairwise_sum(first + half, count - half);
}

void parallel_chunks(std::size_t chunks, int jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(chunks);
    auto run = [&](std::size_t c) {
        try {
            fn(c);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };
    std::size_t workers = std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            run(c);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t c = next++; c < chunks; c = next++) {
                    run(c);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

int resolve_jobs(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("QUADRIX_JOBS")) {
        int v = std::atoi(env);
        if (v > 0) {
            return v;
        }
    }
    return 1;
}

} // namespace quadrix
