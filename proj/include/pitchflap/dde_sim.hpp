#pragma once

// Time-domain integration of  x'(psi) = A x(psi) + A_d x(psi - tau)  by the
// method of steps with classical RK4. The step is adjusted so the delay is
// an integer number of steps; delayed mid-stage reads use cubic Hermite
// interpolation on the stored node/derivative history, which keeps the
// fourth-order accuracy of the base scheme.

#include "pitchflap/rotor_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pitchflap {

struct TimeSeries {
    std::vector<double> psi;              ///< uniform grid, psi[0] = 0
    std::vector<Eigen::Vector4d> states;  ///< [theta, beta, theta_dot, beta_dot]
    double step = 0.0;                    ///< adjusted step size
    double tau = 0.0;
    bool diverged = false;                ///< trajectory truncated at the guard
};

enum class HistoryKind {
    ConstantX0, ///< x(psi) = x0 on [-tau, 0]
    Zero        ///< x(psi) = 0 on [-tau, 0), jump to x0 at 0
};

inline TimeSeries simulate(const DelaySystem& sys, const Eigen::Vector4d& x0,
                           double psi_end, double step,
                           HistoryKind history = HistoryKind::ConstantX0) {
    if (!(step > 0.0))
        throw std::invalid_argument("simulate: step must be positive");
    if (!(psi_end > 0.0))
        throw std::invalid_argument("simulate: psi_end must be positive");
    if (sys.tau < 0.0)
        throw std::invalid_argument("simulate: tau must be non-negative");

    const bool delayed = sys.tau > 0.0;
    long lag = 0;
    double h = step;
    if (delayed) {
        lag = static_cast<long>(std::ceil(sys.tau / step - 1e-12));
        h = sys.tau / static_cast<double>(lag);
    }
    const long n = static_cast<long>(std::ceil(psi_end / h - 1e-9));

    TimeSeries ts;
    ts.step = h;
    ts.tau = sys.tau;
    ts.psi.reserve(n + 1);
    ts.states.reserve(n + 1);

    std::vector<Eigen::Vector4d> xs(n + 1), fs(n + 1);
    xs[0] = x0;

    const Eigen::Vector4d hist =
        history == HistoryKind::ConstantX0 ? x0 : Eigen::Vector4d::Zero().eval();

    // State at (possibly fractional) node index idx - lag; indices <= 0 read
    // the prescribed history. Interpolation only ever touches nodes already
    // integrated because lag >= 1 whenever the system is delayed.
    auto delayed_state = [&](double idx) -> Eigen::Vector4d {
        if (idx <= 0.0) return hist;
        const long i0 = static_cast<long>(std::floor(idx));
        const double t = idx - static_cast<double>(i0);
        if (t == 0.0) return xs[i0];
        const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        const double h10 = t * (1.0 - t) * (1.0 - t);
        const double h01 = t * t * (3.0 - 2.0 * t);
        const double h11 = t * t * (t - 1.0);
        return h00 * xs[i0] + h10 * h * fs[i0] + h01 * xs[i0 + 1] + h11 * h * fs[i0 + 1];
    };

    auto rhs = [&](double idx, const Eigen::Vector4d& x) -> Eigen::Vector4d {
        if (!delayed) return sys.A * x + sys.A_d * x;
        return sys.A * x + sys.A_d * delayed_state(idx - static_cast<double>(lag));
    };

    fs[0] = rhs(0.0, xs[0]);
    ts.psi.push_back(0.0);
    ts.states.push_back(xs[0]);

    for (long i = 0; i < n; ++i) {
        const Eigen::Vector4d& x = xs[i];
        const double di = static_cast<double>(i);
        const Eigen::Vector4d k1 = rhs(di, x);
        const Eigen::Vector4d k2 = rhs(di + 0.5, x + 0.5 * h * k1);
        const Eigen::Vector4d k3 = rhs(di + 0.5, x + 0.5 * h * k2);
        const Eigen::Vector4d k4 = rhs(di + 1.0, x + h * k3);
        xs[i + 1] = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        fs[i + 1] = rhs(di + 1.0, xs[i + 1]);

        ts.psi.push_back((i + 1) * h);
        ts.states.push_back(xs[i + 1]);
        if (xs[i + 1].norm() > 1e12) {
            ts.diverged = true;
            break;
        }
    }
    return ts;
}

/// Envelope growth rate of log||x|| over [w_lo, w_hi]: least-squares slope
/// through the interior local maxima of ||x||, or through every sample when
/// the signal is monotone enough to offer no usable peaks.
inline double growth_rate(const TimeSeries& ts, double w_lo, double w_hi) {
    if (ts.psi.empty())
        throw std::invalid_argument("growth_rate: empty series");
    if (!(w_lo >= 0.0) || !(w_hi > w_lo) || w_hi > ts.psi.back() + 1e-12)
        throw std::invalid_argument(ts.diverged
                                        ? "growth_rate: window reaches past divergence truncation"
                                        : "growth_rate: window outside the series");

    const std::size_t i0 = static_cast<std::size_t>(std::ceil(w_lo / ts.step - 1e-9));
    const std::size_t i1 =
        std::min(ts.states.size() - 1, static_cast<std::size_t>(std::floor(w_hi / ts.step + 1e-9)));
    if (i1 <= i0 + 2)
        throw std::invalid_argument("growth_rate: window too short");

    std::vector<double> norms(i1 - i0 + 1);
    bool any_nonzero = false;
    for (std::size_t i = i0; i <= i1; ++i) {
        norms[i - i0] = ts.states[i].norm();
        if (norms[i - i0] > 0.0) any_nonzero = true;
    }
    if (!any_nonzero)
        throw std::domain_error("growth_rate: trajectory is zero in the window");

    std::vector<double> txs, tys;
    for (std::size_t i = 1; i + 1 < norms.size(); ++i) {
        if (norms[i] >= norms[i - 1] && norms[i] >= norms[i + 1] && norms[i] > 0.0) {
            txs.push_back(static_cast<double>(i0 + i) * ts.step);
            tys.push_back(std::log(norms[i]));
        }
    }
    if (txs.size() < 3) {
        txs.clear();
        tys.clear();
        for (std::size_t i = 0; i < norms.size(); ++i) {
            if (norms[i] <= 0.0)
                throw std::domain_error("growth_rate: zero sample inside the window");
            txs.push_back(static_cast<double>(i0 + i) * ts.step);
            tys.push_back(std::log(norms[i]));
        }
    }

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < txs.size(); ++i) {
        mx += txs[i];
        my += tys[i];
    }
    mx /= static_cast<double>(txs.size());
    my /= static_cast<double>(txs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < txs.size(); ++i) {
        sxx += (txs[i] - mx) * (txs[i] - mx);
        sxy += (txs[i] - mx) * (tys[i] - my);
    }
    if (sxx == 0.0)
        throw std::domain_error("growth_rate: degenerate fit window");
    return sxy / sxx;
}

} // namespace pitchflap
