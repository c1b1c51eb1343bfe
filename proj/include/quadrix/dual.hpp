#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<double>> carries a second
// directional derivative, which is how expression Hessians are computed.

#include <cmath>
#include <string>

#include "quadrix/error.hpp"

namespace quadrix {

template <typename T>
struct Dual {
    T v{};  // primal
    T d{};  // derivative along the seeded direction

    constexpr Dual() = default;
    constexpr Dual(double c) : v(c), d(0.0) {}
    constexpr Dual(T value, T deriv) : v(value), d(deriv) {}
};

inline double primal(double x) { return x; }

template <typename T>
double primal(const Dual<T>& x) {
    return primal(x.v);
}

template <typename T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    return {a.v + b.v, a.d + b.d};
}

template <typename T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    return {a.v - b.v, a.d - b.d};
}

template <typename T>
Dual<T> operator-(const Dual<T>& a) {
    return {-a.v, -a.d};
}

template <typename T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
}

template <typename T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    if (primal(b) == 0.0) {
        throw DomainError("division by zero");
    }
    T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
}

// Elementary functions. The double overloads do the domain checks so that
// every nesting level reports the same error.

inline double q_exp(double x) { return std::exp(x); }
inline double q_cosh(double x) { return std::cosh(x); }
inline double q_sinh(double x) { return std::sinh(x); }

inline double q_log(double x) {
    if (!(x > 0.0)) {
        throw DomainError("log of nonpositive argument " + std::to_string(x));
    }
    return std::log(x);
}

inline double q_sqrt(double x) {
    if (x < 0.0) {
        throw DomainError("sqrt of negative argument " + std::to_string(x));
    }
    return std::sqrt(x);
}

template <typename T>
Dual<T> q_exp(const Dual<T>& a) {
    T e = q_exp(a.v);
    return {e, e * a.d};
}

template <typename T>
Dual<T> q_log(const Dual<T>& a) {
    return {q_log(a.v), a.d / a.v};
}

template <typename T>
Dual<T> q_cosh(const Dual<T>& a) {
    return {q_cosh(a.v), q_sinh(a.v) * a.d};
}

template <typename T>
Dual<T> q_sinh(const Dual<T>& a) {
    return {q_sinh(a.v), q_cosh(a.v) * a.d};
}

template <typename T>
Dual<T> q_sqrt(const Dual<T>& a) {
    if (primal(a) == 0.0) {
        throw DomainError("sqrt is not differentiable at 0");
    }
    T s = q_sqrt(a.v);
    return {s, a.d / (T(2.0) * s)};
}

/// x^n for integer n by repeated squaring; valid for negative x.
template <typename T>
T q_ipow(const T& x, long n) {
    if (n < 0) {
        return T(1.0) / q_ipow(x, -n);
    }
    T result(1.0);
    T base = x;
    while (n > 0) {
        if (n & 1) {
            result = result * base;
        }
        n >>= 1;
        if (n > 0) {
            base = base * base;
        }
    }
    return result;
}

/// x^c for a real constant c; requires x > 0 unless c is an integer.
inline double q_pow_const(double x, double c) {
    if (std::nearbyint(c) == c && std::fabs(c) < 1e9) {
        return q_ipow(x, static_cast<long>(c));
    }
    if (x < 0.0) {
        throw DomainError("non-integer power of negative base");
    }
    return std::pow(x, c);
}

template <typename T>
Dual<T> q_pow_const(const Dual<T>& x, double c) {
    if (std::nearbyint(c) == c && std::fabs(c) < 1e9) {
        return q_ipow(x, static_cast<long>(c));
    }
    if (!(primal(x) > 0.0)) {
        throw DomainError("non-integer power of nonpositive base");
    }
    return {q_pow_const(x.v, c), T(c) * q_pow_const(x.v, c - 1.0) * x.d};
}

/// General x^y with a variable exponent: exp(y log x), x > 0.
template <typename T>
T q_pow(const T& x, const T& y) {
    return q_exp(y * q_log(x));
}

} // namespace quadrix
