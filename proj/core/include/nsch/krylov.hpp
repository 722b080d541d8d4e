#pragma once

// Preconditioned Krylov solvers over std::vector<double>.
//
// Operators and preconditioners are callables void(std::span<const double> in,
// std::span<double> out). All reductions run in index order, so results are
// bit-reproducible for a fixed input.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace nsch {

struct KrylovResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Preconditioned conjugate gradients for SPD (or consistent semi-definite)
/// systems. x holds the initial guess on entry.
template <class Op, class Prec>
KrylovResult conjugate_gradient(Op&& apply, Prec&& precondition, std::span<const double> b,
                                std::span<double> x, double rel_tol, int max_iter) {
    const std::size_t n = b.size();
    std::vector<double> r(n), z(n), p(n), q(n);
    apply(std::span<const double>(x.data(), n), std::span<double>(q));
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];

    const double b_norm = detail::norm2(b);
    KrylovResult result;
    if (b_norm == 0.0) {
        for (std::size_t k = 0; k < n; ++k) x[k] = 0.0;
        result.converged = true;
        return result;
    }
    double r_norm = detail::norm2(r);
    result.relative_residual = r_norm / b_norm;
    if (result.relative_residual <= rel_tol) {
        result.converged = true;
        return result;
    }

    precondition(std::span<const double>(r), std::span<double>(z));
    p = z;
    double rz = detail::dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        apply(std::span<const double>(p), std::span<double>(q));
        const double pq = detail::dot(p, q);
        if (!(pq > 0.0)) break;
        const double alpha = rz / pq;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        r_norm = detail::norm2(r);
        result.iterations = it;
        result.relative_residual = r_norm / b_norm;
        if (result.relative_residual <= rel_tol) {
            result.converged = true;
            return result;
        }
        precondition(std::span<const double>(r), std::span<double>(z));
        const double rz_new = detail::dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    return result;
}

/// Right-preconditioned BiCGSTAB for nonsymmetric systems. x holds the
/// initial guess on entry.
template <class Op, class Prec>
KrylovResult bicgstab(Op&& apply, Prec&& precondition, std::span<const double> b, std::span<double> x,
                      double rel_tol, int max_iter) {
    const std::size_t n = b.size();
    std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), p_hat(n), s_hat(n);

    apply(std::span<const double>(x.data(), n), std::span<double>(t));
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - t[k];

    const double b_norm = detail::norm2(b);
    KrylovResult result;
    if (b_norm == 0.0) {
        for (std::size_t k = 0; k < n; ++k) x[k] = 0.0;
        result.converged = true;
        return result;
    }
    result.relative_residual = detail::norm2(r) / b_norm;
    if (result.relative_residual <= rel_tol) {
        result.converged = true;
        return result;
    }

    r_hat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        const double rho_new = detail::dot(r_hat, r);
        if (rho_new == 0.0) break;
        if (it == 1) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        rho = rho_new;

        precondition(std::span<const double>(p), std::span<double>(p_hat));
        apply(std::span<const double>(p_hat), std::span<double>(v));
        const double rv = detail::dot(r_hat, v);
        if (rv == 0.0) break;
        alpha = rho / rv;
        for (std::size_t k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];

        result.iterations = it;
        const double s_norm = detail::norm2(s);
        if (s_norm / b_norm <= rel_tol) {
            for (std::size_t k = 0; k < n; ++k) x[k] += alpha * p_hat[k];
            result.relative_residual = s_norm / b_norm;
            result.converged = true;
            return result;
        }

        precondition(std::span<const double>(s), std::span<double>(s_hat));
        apply(std::span<const double>(s_hat), std::span<double>(t));
        const double tt = detail::dot(t, t);
        if (tt == 0.0) break;
        omega = detail::dot(t, s) / tt;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p_hat[k] + omega * s_hat[k];
            r[k] = s[k] - omega * t[k];
        }
        result.relative_residual = detail::norm2(r) / b_norm;
        if (result.relative_residual <= rel_tol) {
            result.converged = true;
            return result;
        }
        if (omega == 0.0) break;
    }
    return result;
}

}  // namespace nsch
