#pragma once

// Cluster Treatment of Characteristic Roots for the single-delay rotor
// system: imaginary-axis crossing frequencies, the delays that generate
// them, root tendencies, and the resulting delay-interval stability table.

#include "pitchflap/polynomial.hpp"
#include "pitchflap/quasipoly.hpp"
#include "pitchflap/rotor_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace pitchflap {

/// One imaginary-axis crossing family: the core delay plus its
/// 2*pi/omega_c-periodic repetitions, sharing a single root tendency.
struct Crossing {
    double omega_c = 0.0;   ///< crossing frequency, > 0
    double tau_core = 0.0;  ///< smallest non-negative generating delay
    int rt = 0;             ///< root tendency: +1 destabilizing, -1 stabilizing, 0 degenerate
    double period = 0.0;    ///< 2*pi / omega_c
    bool degenerate = false;

    std::vector<double> delays_up_to(double tau_max) const {
        std::vector<double> out;
        for (double t = tau_core; t <= tau_max; t += period) out.push_back(t);
        return out;
    }
};

/// Crossing frequencies with the quartic in eta = omega^2 they came from.
struct CrossingSet {
    std::vector<double> omegas;          ///< admissible crossing frequencies, ascending
    std::array<double, 5> eta_quartic{}; ///< |P(jw)|^2 - |Q(jw)|^2 in eta, ascending, monic
    bool degenerate = false;             ///< near-double eta roots present
};

namespace detail {

/// Magnitude-squared of a degree<=4 polynomial on the imaginary axis, as a
/// polynomial in eta = omega^2 (ascending, length 5).
inline std::array<double, 5> imag_axis_mag_sq(std::span<const double> c) {
    // real part of c(j w):  c0 - c2 eta + c4 eta^2 ; imag part / w: c1 - c3 eta
    const double c0 = c.size() > 0 ? c[0] : 0.0;
    const double c1 = c.size() > 1 ? c[1] : 0.0;
    const double c2 = c.size() > 2 ? c[2] : 0.0;
    const double c3 = c.size() > 3 ? c[3] : 0.0;
    const double c4 = c.size() > 4 ? c[4] : 0.0;
    std::array<double, 5> out{};
    out[0] = c0 * c0;
    out[1] = -2.0 * c0 * c2 + c1 * c1;
    out[2] = c2 * c2 + 2.0 * c0 * c4 - 2.0 * c1 * c3;
    out[3] = -2.0 * c2 * c4 + c3 * c3;
    out[4] = c4 * c4;
    return out;
}

inline std::array<double, 5> eta_quartic(const QuasiPolynomial& qp) {
    const auto pp = imag_axis_mag_sq(qp.p);
    const auto qq = imag_axis_mag_sq(qp.q);
    std::array<double, 5> out{};
    for (int i = 0; i < 5; ++i) out[i] = pp[i] - qq[i];
    return out;
}

} // namespace detail

/// Solve |P(j w)|^2 = |Q(j w)|^2 for the admissible crossing frequencies.
/// The magnitude condition is a monic quartic in eta = w^2 solved through
/// companion-matrix eigenvalues; real roots above the positivity threshold
/// map to w = sqrt(eta). Near-double eta roots flag the set degenerate.
inline CrossingSet crossing_frequencies(const QuasiPolynomial& qp) {
    CrossingSet set;
    set.eta_quartic = detail::eta_quartic(qp);

    const auto roots = poly_roots(set.eta_quartic);
    double eta_scale = 0.0;
    for (const auto& r : roots) eta_scale = std::max(eta_scale, std::abs(r));

    std::vector<double> etas;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) < 1e-9 * (1.0 + std::abs(r)) && r.real() > 1e-9)
            etas.push_back(r.real());
    }
    std::sort(etas.begin(), etas.end());
    for (std::size_t i = 1; i < etas.size(); ++i) {
        if (etas[i] - etas[i - 1] < 1e-6 * std::max(1.0, eta_scale))
            set.degenerate = true;
    }
    for (double e : etas) set.omegas.push_back(std::sqrt(e));
    return set;
}

/// Constant term of the eta-quartic, evaluated as P(0)^2 - Q(0)^2.
/// An eta = 0 root of the magnitude condition exists iff this vanishes.
inline double constant_term_c0(const QuasiPolynomial& qp) {
    return qp.p[0] * qp.p[0] - qp.q[0] * qp.q[0];
}

/// Dual-route report for the c0 coefficient. The historically published
/// closed form carries a rounded gain coefficient (944 instead of 944.25)
/// and an opposite sign on the middle term; both variants are evaluated so
/// the discrepancy stays visible.
struct C0Report {
    double c0 = 0.0;               ///< P(0)^2 - Q(0)^2 from the extracted quasipolynomial
    double c0_quartic = 0.0;       ///< constant term of the eta-quartic (same quantity)
    double published_form = 0.0;   ///< closed form as printed (944 / 1416, +middle sign)
    double corrected_form = 0.0;   ///< factorization-derived closed form (944.25 / 1416.375, -middle sign)
    double diff_published = 0.0;
    double diff_corrected = 0.0;
};

inline C0Report constant_term_c0_report(const DelaySystem& sys) {
    const QuasiPolynomial qp = extract_pq(sys);
    const RotorParams& p = sys.params;
    const double a = sys.gains.a;
    const double l2 = p.lambda1 * p.lambda1;
    const double nu2 = p.nu1_sq;
    const double srg = p.gamma * p.r_g * p.sigma / p.c_h;

    C0Report rep;
    rep.c0 = constant_term_c0(qp);
    rep.c0_quartic = detail::eta_quartic(qp)[0];
    rep.published_form = l2 * (l2 - 944.0 * p.gamma * a) * nu2 * nu2 +
                         srg * (3.0 * l2 - 1416.0 * p.gamma * a) * nu2 +
                         2.25 * srg * srg;
    // (P(0)+Q(0)) * (P(0)-Q(0)) expanded in closed form. The gain enters
    // through Q(0) = (gamma/8) * act_gain * nu1^2 * a, i.e. with the exact
    // coefficients 944.25 = 2 * 3777/8 and 1416.375 = 1.5 * 944.25.
    const double g8a = 2.0 * (p.act_gain / 8.0);
    rep.corrected_form = l2 * (l2 - g8a * p.gamma * a) * nu2 * nu2 +
                         srg * (-3.0 * l2 + 1.5 * g8a * p.gamma * a) * nu2 +
                         2.25 * srg * srg;
    rep.diff_published = rep.c0 - rep.published_form;
    rep.diff_corrected = rep.c0 - rep.corrected_form;
    return rep;
}

/// Core delay for one crossing frequency, from the phase condition
/// tau = (angle Q(jw) - angle P(jw) + pi) / w folded into [0, 2*pi/w).
/// Every generated delay is verified against the quasipolynomial.
inline Crossing crossing_delays(double omega_c, const QuasiPolynomial& qp,
                                double tau_max = 0.0) {
    if (!(omega_c > 0.0))
        throw std::invalid_argument("crossing_delays: omega_c must be positive");
    const std::complex<double> jw(0.0, omega_c);
    const std::complex<double> Pj = qp.p_at(jw);
    const std::complex<double> Qj = qp.q_at(jw);
    if (std::abs(Qj) <= 1e-12)
        throw std::domain_error("crossing_delays: |Q(j omega_c)| ~ 0, no genuine crossing");

    const double period = 2.0 * std::numbers::pi / omega_c;
    double tau = (std::arg(Qj) - std::arg(Pj) + std::numbers::pi) / omega_c;
    tau -= period * std::floor(tau / period);

    Crossing c;
    c.omega_c = omega_c;
    c.tau_core = tau;
    c.period = period;

    const double tol = 1e-8 * std::abs(Pj);
    for (double t = tau; t <= std::max(tau, tau_max); t += period) {
        const double resid = std::abs(Pj + Qj * std::exp(-jw * t));
        if (resid > tol)
            throw std::runtime_error("crossing_delays: generated delay fails the crossing check");
    }
    return c;
}

/// Root tendency at a crossing: sign of Re[ds/dtau] with
/// ds/dtau = s Q(s) e^{-tau s} / (P'(s) + (Q'(s) - tau Q(s)) e^{-tau s}).
/// Returns 0 for tangential (degenerate) crossings.
inline int root_tendency(double omega_c, double tau_c, const QuasiPolynomial& qp) {
    const std::complex<double> s(0.0, omega_c);
    const std::complex<double> expterm = std::exp(-tau_c * s);
    const std::complex<double> Qs = qp.q_at(s);
    const std::complex<double> denom =
        poly_eval_derivative(qp.p, s) + (poly_eval_derivative(qp.q, s) - tau_c * Qs) * expterm;
    const double scale = std::max(1.0, std::abs(qp.p_at(s)) + std::abs(Qs));
    if (std::abs(denom) < 1e-12 * scale)
        throw std::runtime_error("root_tendency: vanishing denominator (non-simple root)");
    const std::complex<double> dsdt = s * Qs * expterm / denom;
    if (std::abs(dsdt.real()) < 1e-10) return 0;
    return dsdt.real() > 0.0 ? 1 : -1;
}

/// Delay-axis stability map assembled from all crossing families.
struct StabilityTable {
    struct Breakpoint {
        double tau;
        double omega_c;
        int k;        ///< periodic repetition index within its family
        int rt;
        int nu_after; ///< unstable-root count just past this delay
    };
    struct Interval {
        double lo;
        double hi;
        int nu;
    };

    int nu_zero = 0;                     ///< unstable roots of the delay-free system
    std::vector<Crossing> crossings;     ///< one per admissible frequency
    std::vector<Breakpoint> breakpoints; ///< sorted ascending in tau
    std::vector<Interval> intervals;     ///< piecewise-constant NU over [0, tau_max]
    std::vector<Interval> stable_intervals;
    double tau_max = 0.0;
    bool certified = true;
    std::vector<std::string> flags;

    int nu_at(double tau) const {
        int nu = nu_zero;
        for (const auto& bp : breakpoints) {
            if (bp.tau <= tau) nu = bp.nu_after;
            else break;
        }
        return nu;
    }
};

/// Count of unstable eigenvalues of the delay-free closed loop A + A_d.
/// The Pyragas difference term cancels at tau = 0, so this is the
/// uncontrolled spectrum regardless of the gains.
inline int delay_free_unstable_count(const DelaySystem& sys) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(Eigen::Matrix4d(sys.A + sys.A_d));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("delay_free_unstable_count: eigensolver failed");
    int n = 0;
    for (int i = 0; i < 4; ++i)
        if (es.eigenvalues()(i).real() > kMarginalBand) ++n;
    return n;
}

inline StabilityTable stability_table(const DelaySystem& sys, double tau_max) {
    if (!(tau_max > 0.0))
        throw std::invalid_argument("stability_table: tau_max must be positive");

    StabilityTable table;
    table.tau_max = tau_max;
    table.nu_zero = delay_free_unstable_count(sys);

    const QuasiPolynomial qp = extract_pq(sys);
    const CrossingSet set = crossing_frequencies(qp);
    if (set.degenerate) {
        table.certified = false;
        table.flags.push_back("near-double eta roots; crossing set degenerate");
    }

    for (double w : set.omegas) {
        const std::complex<double> Qj = qp.q_at(std::complex<double>(0.0, w));
        if (std::abs(Qj) <= 1e-12) {
            table.certified = false;
            table.flags.push_back("crossing with |Q(j w)| ~ 0 skipped (delay-independent root?)");
            continue;
        }
        Crossing c = crossing_delays(w, qp, tau_max);
        c.rt = root_tendency(w, c.tau_core, qp);
        if (c.rt == 0) {
            c.degenerate = true;
            table.certified = false;
            table.flags.push_back("tangential crossing (rt = 0); table not certified");
        }
        table.crossings.push_back(c);
    }

    for (const auto& c : table.crossings) {
        int k = 0;
        for (double t : c.delays_up_to(tau_max))
            table.breakpoints.push_back({t, c.omega_c, k++, c.rt, 0});
    }
    // Ties across families are measure-zero but must not crash: process
    // them in descending omega_c order and flag for manual review.
    std::sort(table.breakpoints.begin(), table.breakpoints.end(),
              [](const auto& x, const auto& y) {
                  if (std::abs(x.tau - y.tau) < 1e-9) return x.omega_c > y.omega_c;
                  return x.tau < y.tau;
              });
    for (std::size_t i = 1; i < table.breakpoints.size(); ++i) {
        if (std::abs(table.breakpoints[i].tau - table.breakpoints[i - 1].tau) < 1e-9 &&
            table.breakpoints[i].omega_c != table.breakpoints[i - 1].omega_c) {
            table.certified = false;
            table.flags.push_back("simultaneous crossings within 1e-9; manual review needed");
        }
    }

    int nu = table.nu_zero;
    for (auto& bp : table.breakpoints) {
        nu += 2 * bp.rt;
        if (nu < 0) {
            table.certified = false;
            table.flags.push_back("negative NU reached; accumulation inconsistent");
        }
        bp.nu_after = nu;
    }

    double lo = 0.0;
    nu = table.nu_zero;
    for (const auto& bp : table.breakpoints) {
        if (bp.tau > lo)
            table.intervals.push_back({lo, bp.tau, nu});
        lo = bp.tau;
        nu = bp.nu_after;
    }
    if (lo < tau_max) table.intervals.push_back({lo, tau_max, nu});
    for (const auto& iv : table.intervals)
        if (iv.nu == 0) table.stable_intervals.push_back(iv);

    return table;
}

/// Grid report for the origin-crossing question: where does c0 vanish, and
/// does an eta = 0 root of the magnitude quartic appear exactly there?
struct OriginCheckReport {
    struct Entry {
        double sigma;
        double nu1_sq;
        double a;
        double c0;
        bool origin_root; ///< eta-quartic has a root within tolerance of 0
    };
    std::vector<Entry> entries;
    bool equivalence_holds = true; ///< c0 = 0 <=> eta = 0 root, on every grid point
};

inline OriginCheckReport divergence_origin_check(const RotorParams& base, double gain_b,
                                                 std::span<const double> sigmas,
                                                 std::span<const double> nu1_sqs,
                                                 std::span<const double> gains_a) {
    OriginCheckReport rep;
    for (double sig : sigmas) {
        for (double nu : nu1_sqs) {
            for (double a : gains_a) {
                RotorParams p = base;
                p.sigma = sig;
                p.nu1_sq = nu;
                const DelaySystem sys =
                    build_delay_system(p, ControlGains{a, gain_b}, 0.0);
                const QuasiPolynomial qp = extract_pq(sys);
                const auto quartic = detail::eta_quartic(qp);
                double scale = 0.0;
                for (double c : quartic) scale = std::max(scale, std::abs(c));

                OriginCheckReport::Entry e;
                e.sigma = sig;
                e.nu1_sq = nu;
                e.a = a;
                e.c0 = constant_term_c0(qp);

                e.origin_root = false;
                for (const auto& r : poly_roots(quartic))
                    if (std::abs(r) < 1e-9 * std::max(1.0, scale)) e.origin_root = true;

                const bool zero_c0 = std::abs(e.c0) < 1e-9 * std::max(1.0, scale);
                if (zero_c0 != e.origin_root) rep.equivalence_holds = false;
                rep.entries.push_back(e);
            }
        }
    }
    return rep;
}

} // namespace pitchflap
