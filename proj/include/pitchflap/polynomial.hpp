#pragma once

// Small real-coefficient polynomial helpers shared by the stability and
// root-finding code. Coefficients are stored in ascending order of power.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace pitchflap {

/// Horner evaluation at a complex point.
inline std::complex<double> poly_eval(std::span<const double> coeffs,
                                      std::complex<double> s) {
    std::complex<double> acc{0.0, 0.0};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * s + *it;
    return acc;
}

/// Derivative evaluation at a complex point.
inline std::complex<double> poly_eval_derivative(std::span<const double> coeffs,
                                                 std::complex<double> s) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = coeffs.size(); i-- > 1;)
        acc = acc * s + static_cast<double>(i) * coeffs[i];
    return acc;
}

/// All complex roots of a real polynomial via companion-matrix eigenvalues.
/// Trailing near-zero coefficients (relative to the largest) are stripped
/// before forming the companion matrix.
inline std::vector<std::complex<double>>
poly_roots(std::span<const double> coeffs) {
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return {};

    std::size_t deg = coeffs.size() - 1;
    while (deg > 0 && std::abs(coeffs[deg]) < 1e-14 * scale) --deg;
    if (deg == 0) return {};

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<int>(deg),
                                                      static_cast<int>(deg));
    const double lead = coeffs[deg];
    for (std::size_t i = 0; i < deg; ++i) {
        if (i + 1 < deg) companion(static_cast<int>(i) + 1, static_cast<int>(i)) = 1.0;
        companion(static_cast<int>(i), static_cast<int>(deg) - 1) = -coeffs[i] / lead;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("poly_roots: eigensolver failed to converge");

    std::vector<std::complex<double>> roots(deg);
    for (std::size_t i = 0; i < deg; ++i) roots[i] = es.eigenvalues()(static_cast<int>(i));
    return roots;
}

/// Largest real root of a real polynomial, or `fallback` when none exists.
inline double largest_real_root(std::span<const double> coeffs, double fallback) {
    double best = fallback;
    bool found = false;
    for (const auto& r : poly_roots(coeffs)) {
        if (std::abs(r.imag()) < 1e-9 * (1.0 + std::abs(r)) &&
            (!found || r.real() > best)) {
            best = r.real();
            found = true;
        }
    }
    return best;
}

} // namespace pitchflap
