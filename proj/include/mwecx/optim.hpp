#ifndef MWECX_OPTIM_HPP
#define MWECX_OPTIM_HPP

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "mwecx/errors.hpp"

namespace mwecx {

using Vector = std::vector<double>;

// point -> (value, gradient); gradient written into the out parameter.
using ObjectiveFunction = std::function<double(const Vector& x, Vector& grad)>;

struct LbfgsConfig {
    std::size_t memory = 10;
    std::size_t max_iters = 500;
    double grad_tol = 1e-6;  // sup-norm of the gradient
    double c1 = 1e-4;
    double c2 = 0.9;
    std::size_t max_line_search_steps = 50;
};

enum class OptStatus { Converged, MaxIters, LineSearchFailed };

struct OptResult {
    Vector x_final;
    double f_final = 0.0;
    double grad_norm = 0.0;  // sup-norm
    std::size_t iterations = 0;
    OptStatus status = OptStatus::MaxIters;
};

namespace detail {

inline double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double sup_norm(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double l2_norm(const Vector& v) { return std::sqrt(dot(v, v)); }

inline void axpy(double a, const Vector& x, Vector& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

struct LineSearchResult {
    double alpha = 0.0;
    double f = 0.0;
    Vector grad;
    bool ok = false;
};

// Strong Wolfe line search, bracket-and-zoom. phi(a) = f(x + a*p).
inline LineSearchResult strong_wolfe(const ObjectiveFunction& f, const Vector& x, const Vector& p,
                                     double f0, const Vector& g0, const LbfgsConfig& cfg) {
    const double dphi0 = dot(g0, p);
    LineSearchResult result;
    if (dphi0 >= 0.0) return result;  // not a descent direction

    const std::size_t n = x.size();
    Vector xt(n), grad(n);
    auto phi = [&](double a, double& dphi) {
        for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + a * p[i];
        double v = f(xt, grad);
        dphi = dot(grad, p);
        return v;
    };

    auto zoom = [&](double lo, double f_lo, double dphi_lo, double hi, double f_hi) {
        for (std::size_t iter = 0; iter < cfg.max_line_search_steps; ++iter) {
            // bisection with a quadratic-interpolation attempt
            double a = 0.5 * (lo + hi);
            double denom = 2.0 * (f_hi - f_lo - dphi_lo * (hi - lo));
            if (std::abs(denom) > 1e-300) {
                double a_q = lo - dphi_lo * (hi - lo) * (hi - lo) / denom;
                double lo_b = std::min(lo, hi), hi_b = std::max(lo, hi);
                double margin = 0.1 * (hi_b - lo_b);
                if (a_q > lo_b + margin && a_q < hi_b - margin) a = a_q;
            }
            double dphi_a = 0.0;
            double f_a = phi(a, dphi_a);
            if (!std::isfinite(f_a) || f_a > f0 + cfg.c1 * a * dphi0 || f_a >= f_lo) {
                hi = a;
                f_hi = f_a;
            } else {
                if (std::abs(dphi_a) <= -cfg.c2 * dphi0) {
                    result.alpha = a;
                    result.f = f_a;
                    result.grad = grad;
                    result.ok = true;
                    return;
                }
                if (dphi_a * (hi - lo) >= 0.0) {
                    hi = lo;
                    f_hi = f_lo;
                }
                lo = a;
                f_lo = f_a;
                dphi_lo = dphi_a;
            }
            if (std::abs(hi - lo) < 1e-16) break;
        }
    };

    double a_prev = 0.0, f_prev = f0, dphi_prev = dphi0;
    double a = 1.0;
    const double a_max = 1e10;
    for (std::size_t iter = 0; iter < cfg.max_line_search_steps; ++iter) {
        double dphi_a = 0.0;
        double f_a = phi(a, dphi_a);
        if (!std::isfinite(f_a) || f_a > f0 + cfg.c1 * a * dphi0 || (iter > 0 && f_a >= f_prev)) {
            zoom(a_prev, f_prev, dphi_prev, a, f_a);
            return result;
        }
        if (std::abs(dphi_a) <= -cfg.c2 * dphi0) {
            result.alpha = a;
            result.f = f_a;
            result.grad = grad;
            result.ok = true;
            return result;
        }
        if (dphi_a >= 0.0) {
            zoom(a, f_a, dphi_a, a_prev, f_prev);
            return result;
        }
        a_prev = a;
        f_prev = f_a;
        dphi_prev = dphi_a;
        a = std::min(2.0 * a, a_max);
    }
    return result;
}

// Plain backtracking Armijo fallback for objectives where the Wolfe zoom
// stalls (e.g. relu kinks).
inline LineSearchResult backtracking(const ObjectiveFunction& f, const Vector& x, const Vector& p,
                                     double f0, const Vector& g0, const LbfgsConfig& cfg) {
    const double dphi0 = dot(g0, p);
    LineSearchResult result;
    if (dphi0 >= 0.0) return result;
    const std::size_t n = x.size();
    Vector xt(n), grad(n);
    double a = 1.0;
    for (std::size_t iter = 0; iter < cfg.max_line_search_steps; ++iter) {
        for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + a * p[i];
        double f_a = f(xt, grad);
        if (std::isfinite(f_a) && f_a <= f0 + cfg.c1 * a * dphi0) {
            result.alpha = a;
            result.f = f_a;
            result.grad = grad;
            result.ok = true;
            return result;
        }
        a *= 0.5;
    }
    return result;
}

}  // namespace detail

// Limited-memory BFGS with two-loop recursion, initial scaling
// gamma = (s.y)/(y.y) and strong-Wolfe line search. Curvature pairs with
// s.y <= 1e-12 * |s||y| are skipped.
inline OptResult minimize(const ObjectiveFunction& f, const Vector& x0, const LbfgsConfig& cfg = {}) {
    if (cfg.memory < 1) throw InvalidArgument("lbfgs: memory must be >= 1");
    if (!(cfg.c1 > 0.0 && cfg.c1 < cfg.c2 && cfg.c2 < 1.0))
        throw InvalidArgument("lbfgs: need 0 < c1 < c2 < 1");

    const std::size_t n = x0.size();
    Vector x = x0, grad(n);
    double fx = f(x, grad);
    if (!std::isfinite(fx)) throw InvalidArgument("lbfgs: objective not finite at x0");

    OptResult result;
    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        result.grad_norm = detail::sup_norm(grad);
        if (result.grad_norm <= cfg.grad_tol) {
            result.status = OptStatus::Converged;
            result.x_final = x;
            result.f_final = fx;
            result.iterations = iter;
            return result;
        }

        // two-loop recursion
        Vector q = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * detail::dot(s_hist[i], q);
            detail::axpy(-alpha[i], y_hist[i], q);
        }
        if (!s_hist.empty()) {
            const Vector& s = s_hist.back();
            const Vector& y = y_hist.back();
            double gamma = detail::dot(s, y) / detail::dot(y, y);
            for (double& v : q) v *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * detail::dot(y_hist[i], q);
            detail::axpy(alpha[i] - beta, s_hist[i], q);
        }
        Vector p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = -q[i];

        auto ls = detail::strong_wolfe(f, x, p, fx, grad, cfg);
        if (!ls.ok) ls = detail::backtracking(f, x, p, fx, grad, cfg);
        if (!ls.ok) {
            // retry from steepest descent once, then give up
            for (std::size_t i = 0; i < n; ++i) p[i] = -grad[i];
            ls = detail::strong_wolfe(f, x, p, fx, grad, cfg);
            if (!ls.ok) ls = detail::backtracking(f, x, p, fx, grad, cfg);
        }
        if (!ls.ok) {
            result.status = OptStatus::LineSearchFailed;
            result.x_final = x;
            result.f_final = fx;
            result.iterations = iter;
            return result;
        }

        Vector s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = ls.alpha * p[i];
            x[i] += s[i];
            y[i] = ls.grad[i] - grad[i];
        }
        fx = ls.f;
        grad = ls.grad;

        double sy = detail::dot(s, y);
        if (sy > 1e-12 * detail::l2_norm(s) * detail::l2_norm(y)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > cfg.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        result.iterations = iter + 1;
    }

    result.grad_norm = detail::sup_norm(grad);
    result.status = result.grad_norm <= cfg.grad_tol ? OptStatus::Converged : OptStatus::MaxIters;
    result.x_final = x;
    result.f_final = fx;
    return result;
}

// Central finite differences; test oracle for analytic gradients.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                         const Vector& x, double h = 1e-6) {
    if (h <= 0.0) throw InvalidArgument("finite_difference_gradient: h must be > 0");
    Vector grad(x.size());
    Vector xt = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xt[i] = x[i] + h;
        double fp = f(xt);
        xt[i] = x[i] - h;
        double fm = f(xt);
        xt[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace mwecx

#endif
