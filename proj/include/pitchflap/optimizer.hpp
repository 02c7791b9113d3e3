#pragma once

// Spectral-abscissa mapping and minimization over the control gains and the
// feedback delay. "Optimal" always means the rightmost characteristic root
// is pushed as far left as possible.

#include "pitchflap/ctcr.hpp"
#include "pitchflap/parallel.hpp"
#include "pitchflap/quasipoly.hpp"
#include "pitchflap/rootfinder.hpp"
#include "pitchflap/rotor_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pitchflap {

/// Certified spectral-abscissa evaluation at one (gains, tau) point.
struct AbscissaSample {
    double value = std::numeric_limits<double>::quiet_NaN();
    std::complex<double> root;
    bool certified = false;
};

inline AbscissaSample evaluate_abscissa(const RotorParams& p, const ControlGains& g,
                                        double tau, const ScanSettings& scan = {}) {
    const QuasiPolynomial qp = extract_pq(build_delay_system(p, g, tau));
    const RightmostResult r = rightmost_root(qp, scan);
    AbscissaSample s;
    if (!r.roots.roots.empty() || r.certified) {
        s.value = r.abscissa;
        s.root = r.root;
        s.certified = r.certified;
    }
    return s;
}

struct DelayOptimum {
    double tau_star = 0.0;
    double abscissa = 0.0;
    bool unimodal = true; ///< pre-scan looked unimodal; false = dense fallback used
    std::vector<std::complex<double>> rightmost_roots; ///< all roots tied at the optimum
};

namespace detail {

inline double golden_section(double lo, double hi,
                             const std::function<double(double)>& f, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Minimize the spectral abscissa over the delay inside a stability
/// interval. A coarse pre-scan brackets the minimum (and detects
/// non-unimodal shapes, which fall back to a 200-point dense scan); the
/// bracket is then refined by golden section to |d tau| < 1e-4.
inline DelayOptimum optimal_delay(const RotorParams& p, const ControlGains& g,
                                  double tau_lo, double tau_hi,
                                  const ScanSettings& scan = {}) {
    if (!(tau_lo >= 0.0) || !(tau_hi > tau_lo))
        throw std::invalid_argument("optimal_delay: empty or unordered delay interval");

    auto abscissa = [&](double tau) {
        const AbscissaSample s = evaluate_abscissa(p, g, tau, scan);
        if (std::isnan(s.value))
            throw std::runtime_error("optimal_delay: abscissa evaluation failed");
        return s.value;
    };

    // Keep clear of the interval ends where a crossing root touches the axis.
    const double pad = 1e-3 * (tau_hi - tau_lo);
    const double lo = tau_lo + pad, hi = tau_hi - pad;

    DelayOptimum opt;
    const int coarse = 17;
    std::vector<double> ts(coarse), vs(coarse);
    for (int i = 0; i < coarse; ++i) {
        ts[i] = lo + (hi - lo) * i / (coarse - 1);
        vs[i] = abscissa(ts[i]);
    }
    int best = 0;
    int minima = 0;
    for (int i = 0; i < coarse; ++i) {
        if (vs[i] < vs[best]) best = i;
        if (i > 0 && i + 1 < coarse && vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1]) ++minima;
    }
    if (minima > 1) {
        opt.unimodal = false;
        const int dense = 200;
        ts.resize(dense);
        vs.resize(dense);
        for (int i = 0; i < dense; ++i) {
            ts[i] = lo + (hi - lo) * i / (dense - 1);
            vs[i] = abscissa(ts[i]);
        }
        best = 0;
        for (int i = 0; i < dense; ++i)
            if (vs[i] < vs[best]) best = i;
    }

    const double bl = best > 0 ? ts[best - 1] : lo;
    const double bh = best + 1 < static_cast<int>(ts.size()) ? ts[best + 1] : hi;
    opt.tau_star = detail::golden_section(bl, bh, abscissa, 1e-5);
    const AbscissaSample at_star = evaluate_abscissa(p, g, opt.tau_star, scan);
    opt.abscissa = at_star.value;

    const QuasiPolynomial qp = extract_pq(build_delay_system(p, g, opt.tau_star));
    const RightmostResult rr = rightmost_root(qp, scan);
    for (const auto& r : rr.roots.roots)
        if (r.s.real() > rr.abscissa - 1e-3) opt.rightmost_roots.push_back(r.s);
    return opt;
}

/// Spectral abscissa sampled over an inclusive (a, b) gain grid at a fixed
/// delay. Cells whose certification fails carry NaN and a flag, never a
/// silent number.
struct SweepGrid {
    std::vector<double> a_values;
    std::vector<double> b_values;
    std::vector<std::vector<double>> abscissa; ///< [i_a][i_b]
    std::vector<std::vector<bool>> flagged;    ///< true = uncertified cell
    double tau = 0.0;
    double min_value = std::numeric_limits<double>::quiet_NaN();
    double min_a = 0.0, min_b = 0.0;
};

inline SweepGrid sweep_gain_surface(const RotorParams& p, double tau,
                                    double a_lo, double a_hi, int n_a,
                                    double b_lo, double b_hi, int n_b,
                                    const ScanSettings& scan = {}) {
    if (n_a < 1 || n_b < 1)
        throw std::invalid_argument("sweep_gain_surface: grid must have at least one point");
    if (!std::isfinite(a_lo) || !std::isfinite(a_hi) || !std::isfinite(b_lo) || !std::isfinite(b_hi))
        throw std::invalid_argument("sweep_gain_surface: ranges must be finite");

    SweepGrid grid;
    grid.tau = tau;
    for (int i = 0; i < n_a; ++i)
        grid.a_values.push_back(n_a == 1 ? a_lo : a_lo + (a_hi - a_lo) * i / (n_a - 1));
    for (int j = 0; j < n_b; ++j)
        grid.b_values.push_back(n_b == 1 ? b_lo : b_lo + (b_hi - b_lo) * j / (n_b - 1));
    grid.abscissa.assign(n_a, std::vector<double>(n_b, std::numeric_limits<double>::quiet_NaN()));
    grid.flagged.assign(n_a, std::vector<bool>(n_b, false));

    parallel_for(static_cast<std::size_t>(n_a) * n_b, [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / n_b;
        const int j = static_cast<int>(idx) % n_b;
        const AbscissaSample s =
            evaluate_abscissa(p, ControlGains{grid.a_values[i], grid.b_values[j]}, tau, scan);
        if (s.certified) {
            grid.abscissa[i][j] = s.value;
        } else {
            grid.flagged[i][j] = true;
            grid.abscissa[i][j] = std::numeric_limits<double>::quiet_NaN();
        }
    });

    for (int i = 0; i < n_a; ++i) {
        for (int j = 0; j < n_b; ++j) {
            const double v = grid.abscissa[i][j];
            if (!std::isnan(v) && (std::isnan(grid.min_value) || v < grid.min_value)) {
                grid.min_value = v;
                grid.min_a = grid.a_values[i];
                grid.min_b = grid.b_values[j];
            }
        }
    }
    return grid;
}

struct JointOptimum {
    ControlGains gains;
    double tau = 0.0;
    double abscissa = 0.0;
    bool converged = false; ///< false = evaluation budget exhausted first
    int evaluations = 0;
};

/// Derivative-free local descent (Nelder-Mead) on abscissa(a, b, tau).
/// Coordinates are scaled so the tiny gains and the O(0.1) delay move at
/// comparable rates. The incumbent never regresses: the best point seen is
/// what gets returned.
inline JointOptimum optimize_joint(const RotorParams& p, const ControlGains& init,
                                   double tau0, int budget = 400,
                                   const ScanSettings& scan = {}) {
    if (!(tau0 > 0.0))
        throw std::invalid_argument("optimize_joint: initial tau must be positive");

    const double sa = std::max(std::abs(init.a), 1e-4);
    const double sb = std::max(std::abs(init.b), 1e-4);
    const double st = std::max(std::abs(tau0), 0.1);

    JointOptimum best;
    best.gains = init;
    best.tau = tau0;

    const AbscissaSample s0 = evaluate_abscissa(p, init, tau0, scan);
    if (std::isnan(s0.value))
        throw std::invalid_argument("optimize_joint: initial point is infeasible");
    best.abscissa = s0.value;
    best.evaluations = 1;

    auto objective = [&](const std::array<double, 3>& u) {
        const double tau = u[2] * st;
        if (tau <= 1e-4) return 1e9; // delay collapsed; treat as infeasible
        const ControlGains g{u[0] * sa, u[1] * sb};
        const AbscissaSample s = evaluate_abscissa(p, g, tau, scan);
        ++best.evaluations;
        if (std::isnan(s.value) || !s.certified) return 1e9;
        if (s.value < best.abscissa) {
            best.abscissa = s.value;
            best.gains = g;
            best.tau = tau;
        }
        return s.value;
    };

    std::array<std::array<double, 3>, 4> simplex{};
    simplex[0] = {init.a / sa, init.b / sb, tau0 / st};

    std::array<double, 4> fvals{};
    fvals[0] = s0.value;
    for (int i = 1; i < 4; ++i) {
        simplex[i] = simplex[0];
        simplex[i][i - 1] += 0.05;
        fvals[i] = objective(simplex[i]);
    }

    auto order = [&] {
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (fvals[j] < fvals[i]) {
                    std::swap(fvals[i], fvals[j]);
                    std::swap(simplex[i], simplex[j]);
                }
    };
    auto diameter = [&] {
        double d = 0.0;
        for (int i = 1; i < 4; ++i)
            for (int k = 0; k < 3; ++k)
                d = std::max(d, std::abs(simplex[i][k] - simplex[0][k]));
        return d;
    };

    while (best.evaluations < budget) {
        order();
        if (diameter() < 1e-6) {
            best.converged = true;
            break;
        }
        std::array<double, 3> centroid{};
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) centroid[k] += simplex[i][k] / 3.0;

        auto combine = [&](double coef) {
            std::array<double, 3> u{};
            for (int k = 0; k < 3; ++k)
                u[k] = centroid[k] + coef * (centroid[k] - simplex[3][k]);
            return u;
        };

        const auto reflected = combine(1.0);
        const double fr = objective(reflected);
        if (fr < fvals[0]) {
            const auto expanded = combine(2.0);
            const double fe = objective(expanded);
            if (fe < fr) {
                simplex[3] = expanded;
                fvals[3] = fe;
            } else {
                simplex[3] = reflected;
                fvals[3] = fr;
            }
        } else if (fr < fvals[2]) {
            simplex[3] = reflected;
            fvals[3] = fr;
        } else {
            const auto contracted = combine(-0.5);
            const double fc = objective(contracted);
            if (fc < fvals[3]) {
                simplex[3] = contracted;
                fvals[3] = fc;
            } else {
                for (int i = 1; i < 4; ++i) { // shrink toward the best vertex
                    for (int k = 0; k < 3; ++k)
                        simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                    fvals[i] = objective(simplex[i]);
                }
            }
        }
    }
    return best;
}

} // namespace pitchflap
