#pragma once

// Characteristic quasipolynomial  f(s) = P(s) + Q(s) e^{-tau s}  of a
// single-delay system with a rank-1 delayed matrix. P is the monic
// degree-4 characteristic polynomial of A; Q collects the delay term.

#include "pitchflap/polynomial.hpp"
#include "pitchflap/rotor_model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace pitchflap {

/// Coefficients are stored ascending by power. p is monic (p[4] = 1),
/// q has degree <= 3.
struct QuasiPolynomial {
    std::array<double, 5> p{};
    std::array<double, 4> q{};
    double tau = 0.0;

    std::complex<double> p_at(std::complex<double> s) const { return poly_eval(p, s); }
    std::complex<double> q_at(std::complex<double> s) const { return poly_eval(q, s); }

    /// f(s) = P(s) + Q(s) e^{-tau s}
    std::complex<double> eval(std::complex<double> s) const {
        return p_at(s) + q_at(s) * std::exp(-tau * s);
    }

    /// df/ds = P'(s) + (Q'(s) - tau Q(s)) e^{-tau s}
    std::complex<double> eval_s_derivative(std::complex<double> s) const {
        return poly_eval_derivative(p, s) +
               (poly_eval_derivative(q, s) - tau * q_at(s)) * std::exp(-tau * s);
    }
};

/// Extract P and Q from det(sI - A - z A_d), which is affine in z for a
/// rank-1 A_d. The determinant is sampled at z in {0,1} on five integer
/// nodes and fitted to exact-degree polynomials; affinity is then verified
/// at z = 2 so a higher-rank A_d cannot slip through.
inline QuasiPolynomial extract_pq(const DelaySystem& sys) {
    constexpr std::array<double, 5> nodes{-2.0, -1.0, 0.0, 1.0, 2.0};

    Eigen::Matrix<double, 5, 5> vand;
    Eigen::Matrix<double, 5, 1> det0, det1;
    for (int i = 0; i < 5; ++i) {
        double pw = 1.0;
        for (int j = 0; j < 5; ++j) {
            vand(i, j) = pw;
            pw *= nodes[i];
        }
        const Eigen::Matrix4d sI = nodes[i] * Eigen::Matrix4d::Identity();
        det0(i) = (sI - sys.A).determinant();
        det1(i) = (sI - sys.A - sys.A_d).determinant();
    }

    const Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(vand);
    const Eigen::Matrix<double, 5, 1> pc = lu.solve(det0);
    const Eigen::Matrix<double, 5, 1> pqc = lu.solve(det1);

    double scale = 1.0;
    for (int i = 0; i < 5; ++i) scale = std::max({scale, std::abs(pc(i)), std::abs(pqc(i))});

    if (std::abs(pc(4) - 1.0) > 1e-9)
        throw std::runtime_error("extract_pq: P is not monic after fitting");
    if (std::abs(pqc(4) - pc(4)) > 1e-9 * scale)
        throw std::runtime_error("extract_pq: delay part has degree 4");

    QuasiPolynomial qp;
    for (int i = 0; i < 4; ++i) {
        qp.p[i] = pc(i);
        qp.q[i] = pqc(i) - pc(i);
    }
    qp.p[4] = 1.0;
    qp.tau = sys.tau;

    // Affinity check at z = 2: fails when rank(A_d) > 1.
    for (double s : nodes) {
        const double direct =
            (s * Eigen::Matrix4d::Identity() - sys.A - 2.0 * sys.A_d).determinant();
        const double affine = poly_eval(qp.p, std::complex<double>(s, 0.0)).real() +
                              2.0 * poly_eval(qp.q, std::complex<double>(s, 0.0)).real();
        if (std::abs(direct - affine) > 1e-9 * std::max(1.0, std::abs(direct)))
            throw std::runtime_error(
                "extract_pq: determinant is not affine in the delay term (rank(A_d) > 1?)");
    }
    return qp;
}

} // namespace pitchflap
