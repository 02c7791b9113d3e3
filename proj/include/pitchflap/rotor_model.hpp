#pragma once

// Pitch-flap dynamics of a hovering helicopter rotor blade and the
// delayed-feedback closed loop built on top of it.
//
// The independent variable throughout is the azimuth angle psi = Omega*t;
// all frequencies and delays are expressed per radian of azimuth. The state
// vector ordering is x = [theta, beta, theta_dot, beta_dot].

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pitchflap {

/// Physical rotor constants. Defaults are the fixed-parameter study values
/// plus the working point used for the controlled-rotor analyses.
struct RotorParams {
    double r_g = 4.1;        ///< span-wise c.g. location [m]
    double c_h = 0.527;      ///< chord [m]
    double gamma = 6.95;     ///< Lock number
    double lambda1 = 1.1;    ///< first flap natural frequency [/Omega]
    double sigma = 0.08;     ///< c.g. offset from center of pressure [chord fraction]
    double nu1_sq = 10.8;    ///< squared torsional natural frequency [/Omega^2]
    double act_gain = 3777.0;///< actuation-rod constant

    void validate() const {
        auto bad = [](double v) { return !std::isfinite(v); };
        if (bad(r_g) || bad(c_h) || bad(gamma) || bad(lambda1) || bad(sigma) ||
            bad(nu1_sq) || bad(act_gain))
            throw std::invalid_argument("RotorParams: non-finite parameter");
        if (r_g <= 0.0 || c_h <= 0.0 || gamma <= 0.0 || lambda1 <= 0.0)
            throw std::invalid_argument("RotorParams: r_g, c_h, gamma, lambda1 must be positive");
        if (sigma < 0.0 || nu1_sq < 0.0)
            throw std::invalid_argument("RotorParams: sigma and nu1_sq must be non-negative");
    }
};

/// Delayed-feedback gains: u = a*(beta - beta_delayed) + b*(beta_dot - beta_dot_delayed).
struct ControlGains {
    double a = 0.0;
    double b = 0.0;

    void validate() const {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("ControlGains: gains must be finite");
    }
};

/// Inertia, damping, and stiffness matrices of the two-DOF blade model,
/// normalized to azimuth time.
struct StructuralMatrices {
    Eigen::Matrix2d M;
    Eigen::Matrix2d C;
    Eigen::Matrix2d K;
};

/// First-order closed-loop model  x' = A x(psi) + A_d x(psi - tau).
/// At tau = 0 the feedback cancels structurally: A + A_d equals the
/// uncontrolled state matrix.
struct DelaySystem {
    Eigen::Matrix4d A;
    Eigen::Matrix4d A_d;
    double tau = 0.0;
    ControlGains gains;
    RotorParams params;
};

inline StructuralMatrices build_matrices(const RotorParams& p) {
    p.validate();
    const double coupling = -12.0 * p.r_g * p.sigma / p.c_h;
    const double damping = p.gamma / 8.0;
    StructuralMatrices s;
    s.M << 1.0, coupling,
           0.0, 1.0;
    s.C << damping, 0.0,
           0.0, damping;
    s.K << p.nu1_sq, coupling,
           -damping, p.lambda1 * p.lambda1;
    return s;
}

namespace detail {

/// Closed-form inverse of the unit-determinant inertia matrix.
inline Eigen::Matrix2d invert_inertia(const Eigen::Matrix2d& M) {
    Eigen::Matrix2d inv;
    inv << 1.0, -M(0, 1),
           0.0, 1.0;
    return inv;
}

} // namespace detail

/// Uncontrolled state matrix A_u = [[0, I], [-M^-1 K, -M^-1 C]].
inline Eigen::Matrix4d build_uncontrolled(const RotorParams& p) {
    const StructuralMatrices s = build_matrices(p);
    const Eigen::Matrix2d Minv = detail::invert_inertia(s.M);
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    A.topRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
    A.bottomLeftCorner<2, 2>() = -Minv * s.K;
    A.bottomRightCorner<2, 2>() = -Minv * s.C;
    return A;
}

inline DelaySystem build_delay_system(const RotorParams& p, const ControlGains& g,
                                      double tau) {
    p.validate();
    g.validate();
    if (!(tau >= 0.0))
        throw std::invalid_argument("build_delay_system: tau must be non-negative");

    const StructuralMatrices s = build_matrices(p);
    const Eigen::Matrix2d Minv = detail::invert_inertia(s.M);

    Eigen::Matrix2d E = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d F = Eigen::Matrix2d::Zero();
    E(0, 1) = p.act_gain * p.nu1_sq * g.a;
    F(0, 1) = p.act_gain * p.nu1_sq * g.b;

    DelaySystem sys;
    sys.A = Eigen::Matrix4d::Zero();
    sys.A.topRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
    sys.A.bottomLeftCorner<2, 2>() = -Minv * s.K + E;
    sys.A.bottomRightCorner<2, 2>() = -Minv * s.C + F;

    sys.A_d = Eigen::Matrix4d::Zero();
    sys.A_d.bottomLeftCorner<2, 2>() = -E;
    sys.A_d.bottomRightCorner<2, 2>() = -F;

    sys.tau = tau;
    sys.gains = g;
    sys.params = p;
    return sys;
}

/// Divergence boundary: the nu1^2 at which det K vanishes for a given sigma.
inline double divergence_boundary(double sigma, const RotorParams& p) {
    if (!(sigma >= 0.0))
        throw std::invalid_argument("divergence_boundary: sigma must be non-negative");
    return 3.0 * p.gamma * p.r_g * sigma / (2.0 * p.c_h * p.lambda1 * p.lambda1);
}

/// One point of the flutter boundary, parameterized by crossing frequency.
struct FlutterPoint {
    double nu1_sq;
    double sigma;
};

inline FlutterPoint flutter_boundary(double omega_f, const RotorParams& p) {
    if (!(omega_f > 0.0))
        throw std::invalid_argument("flutter_boundary: omega_f must be positive");
    const double w2 = omega_f * omega_f;
    if (std::abs(w2 - 1.0) < 1e-9)
        throw std::domain_error("flutter_boundary: pole at omega_f = 1");
    const double l2 = p.lambda1 * p.lambda1;
    const double num = p.gamma * p.gamma * w2 + 64.0 * w2 * w2 -
                       128.0 * w2 * l2 + 64.0 * l2 * l2;
    return FlutterPoint{2.0 * w2 - l2,
                        p.c_h * num / (96.0 * p.r_g * p.gamma * (w2 - 1.0))};
}

enum class RegionLabel { Stable, DivergenceOnly, FlutterOnly, Both };

inline const char* to_string(RegionLabel label) {
    switch (label) {
        case RegionLabel::Stable: return "Stable";
        case RegionLabel::DivergenceOnly: return "DivergenceOnly";
        case RegionLabel::FlutterOnly: return "FlutterOnly";
        case RegionLabel::Both: return "Both";
    }
    return "?";
}

/// Eigenvalue-based classification of the uncontrolled system. Real parts
/// within `kMarginalBand` of zero are reported as marginal rather than
/// silently counted either way.
struct Classification {
    RegionLabel label = RegionLabel::Stable;
    int real_unstable = 0;   ///< real eigenvalues with positive real part
    int pairs_unstable = 0;  ///< complex-conjugate pairs with positive real part
    bool marginal = false;   ///< some eigenvalue sits inside the dead band
    std::vector<std::complex<double>> eigenvalues;
};

inline constexpr double kMarginalBand = 1e-9;

inline Classification classify_uncontrolled(const RotorParams& p) {
    const Eigen::Matrix4d A = build_uncontrolled(p);
    Eigen::EigenSolver<Eigen::Matrix4d> es(A);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("classify_uncontrolled: eigensolver failed");

    Classification c;
    for (int i = 0; i < 4; ++i) {
        const std::complex<double> ev = es.eigenvalues()(i);
        c.eigenvalues.push_back(ev);
        if (std::abs(ev.real()) <= kMarginalBand) {
            c.marginal = true;
            continue;
        }
        if (ev.real() > kMarginalBand) {
            if (std::abs(ev.imag()) < 1e-9 * (1.0 + std::abs(ev)))
                ++c.real_unstable;
            else
                ++c.pairs_unstable; // counts both members; halved below
        }
    }
    c.pairs_unstable /= 2;

    if (c.real_unstable > 0 && c.pairs_unstable > 0)
        c.label = RegionLabel::Both;
    else if (c.real_unstable > 0)
        c.label = RegionLabel::DivergenceOnly;
    else if (c.pairs_unstable > 0)
        c.label = RegionLabel::FlutterOnly;
    else
        c.label = RegionLabel::Stable;
    return c;
}

/// Tabulated stability boundary curves (the data behind the uncontrolled
/// stability chart).
struct BoundaryChart {
    struct DivergenceRow {
        double sigma;
        double nu1_sq;
    };
    struct FlutterRow {
        double omega_f;
        double nu1_sq;
        double sigma;
    };
    std::vector<DivergenceRow> divergence;
    std::vector<FlutterRow> flutter;
};

/// Sweep both boundary curves. Flutter rows whose frequency falls on the
/// omega_f = 1 pole are skipped. Ranges must stay inside the study window
/// (sigma in [0, 0.08], nu1^2 in [0, 8] via the flutter parameterization).
inline BoundaryChart boundary_chart(double sigma_lo, double sigma_hi,
                                    double omega_lo, double omega_hi,
                                    int n_points, const RotorParams& p) {
    p.validate();
    if (n_points < 0)
        throw std::invalid_argument("boundary_chart: n_points must be non-negative");
    const double omega_max = std::sqrt((8.0 + p.lambda1 * p.lambda1) / 2.0);
    if (n_points > 0) {
        if (sigma_lo > sigma_hi || omega_lo > omega_hi)
            throw std::invalid_argument("boundary_chart: empty-ordered range");
        if (sigma_lo < 0.0 || sigma_hi > 0.08 + 1e-12)
            throw std::invalid_argument("boundary_chart: sigma range outside study window");
        if (omega_lo <= 0.0 || omega_hi > omega_max + 1e-9)
            throw std::invalid_argument("boundary_chart: omega_f range outside study window");
    }

    BoundaryChart chart;
    for (int i = 0; i < n_points; ++i) {
        const double t = (n_points == 1) ? 0.0 : static_cast<double>(i) / (n_points - 1);
        const double sig = sigma_lo + t * (sigma_hi - sigma_lo);
        chart.divergence.push_back({sig, divergence_boundary(sig, p)});

        const double wf = omega_lo + t * (omega_hi - omega_lo);
        if (std::abs(wf * wf - 1.0) < 1e-6) continue; // pole
        const FlutterPoint fp = flutter_boundary(wf, p);
        chart.flutter.push_back({wf, fp.nu1_sq, fp.sigma});
    }
    return chart;
}

} // namespace pitchflap
