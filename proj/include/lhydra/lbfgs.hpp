#pragma once

#include <Eigen/Dense>

#include <deque>
#include <functional>

namespace lhydra {

// f(x, grad_out) -> objective value; grad_out is filled in place.
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsOptions {
    int memory = 10;
    int max_iterations = 500;
    double gradient_tol = 1e-6;  // infinity norm
    double armijo_c1 = 1e-4;
    double step_shrink = 0.5;
    int max_backtracks = 40;
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Per accepted iterate; iteration 0 is the initial point.
using IterationCallback = std::function<void(int iteration, double value, double grad_inf_norm)>;

// Limited-memory BFGS with Armijo backtracking. Accepted steps strictly
// decrease the objective; a failed line search terminates with the best
// iterate so far.
inline LbfgsResult lbfgs_minimize(const ObjectiveFn& f, Eigen::VectorXd x0,
                                  const LbfgsOptions& opts = {},
                                  const IterationCallback& on_iterate = nullptr) {
    const Eigen::Index n = x0.size();
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd grad(n), grad_new(n), x_new(n);
    double fx = f(x, grad);

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    LbfgsResult res;
    if (on_iterate) on_iterate(0, fx, grad.lpNorm<Eigen::Infinity>());

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const double gnorm = grad.lpNorm<Eigen::Infinity>();
        if (gnorm < opts.gradient_tol) {
            res.converged = true;
            break;
        }

        // two-loop recursion
        Eigen::VectorXd q = grad;
        std::deque<double> alpha;
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            double a = rho_hist[i] * s_hist[i].dot(q);
            alpha.push_front(a);
            q -= a * y_hist[i];
        }
        if (!s_hist.empty()) {
            const Eigen::VectorXd& s = s_hist.back();
            const Eigen::VectorXd& y = y_hist.back();
            q *= s.dot(y) / y.squaredNorm();
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double b = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha[i] - b) * s_hist[i];
        }
        Eigen::VectorXd dir = -q;

        double dg = dir.dot(grad);
        if (dg >= 0.0) {  // not a descent direction; fall back to steepest descent
            dir = -grad;
            dg = -grad.squaredNorm();
        }

        // Armijo backtracking
        double step = 1.0;
        bool accepted = false;
        double f_new = fx;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            x_new = x + step * dir;
            f_new = f(x_new, grad_new);
            if (f_new <= fx + opts.armijo_c1 * step * dg) {
                accepted = true;
                break;
            }
            step *= opts.step_shrink;
        }
        if (!accepted) break;

        Eigen::VectorXd s = x_new - x;
        Eigen::VectorXd y = grad_new - grad;
        double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x.swap(x_new);
        grad.swap(grad_new);
        fx = f_new;
        if (on_iterate) on_iterate(it + 1, fx, grad.lpNorm<Eigen::Infinity>());
    }

    res.x = std::move(x);
    res.value = fx;
    res.gradient_norm = grad.lpNorm<Eigen::Infinity>();
    res.iterations = it;
    if (res.gradient_norm < opts.gradient_tol) res.converged = true;
    return res;
}

} // namespace lhydra
