#pragma once

// Characteristic-root location for quasipolynomials inside a complex-plane
// rectangle. Seeds come from sign-change cells of Re f and Im f on a grid
// (the zero-level-curve intersection picture), get polished by damped
// Newton, and the count is certified through the argument principle.

#include "pitchflap/polynomial.hpp"
#include "pitchflap/quasipoly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pitchflap {

/// Search rectangle in the s-plane. Restricting im_min >= 0 exploits the
/// conjugate symmetry of real-coefficient quasipolynomials.
struct Region {
    double re_min, re_max, im_min, im_max;

    void validate() const {
        if (!(re_min < re_max) || !(im_min < im_max))
            throw std::invalid_argument("Region: bounds must be ordered");
    }
    bool contains(std::complex<double> s, double slack = 1e-9) const {
        return s.real() >= re_min - slack && s.real() <= re_max + slack &&
               s.imag() >= im_min - slack && s.imag() <= im_max + slack;
    }
    double min_extent() const { return std::min(re_max - re_min, im_max - im_min); }
};

struct Root {
    std::complex<double> s;
    double residual = 0.0;  ///< |f(s)| / (1 + |P(s)|)
    int multiplicity = 1;
    bool multiple = false;  ///< |f'| nearly vanished at the converged point
};

struct RootSet {
    std::vector<Root> roots; ///< sorted by (re, im)
    Region region{};
    int certified_count = -1;
    bool certified = false;
    std::vector<std::string> warnings;
};

namespace detail {

inline double qp_coeff_scale(const QuasiPolynomial& qp) {
    double s = 1.0;
    for (double c : qp.p) s = std::max(s, std::abs(c));
    for (double c : qp.q) s = std::max(s, std::abs(c));
    return s;
}

/// Damped Newton from a seed. Returns the converged root, or nullopt when
/// the iteration stalls or leaves the search region by a wide margin.
inline std::optional<Root> newton_polish(const QuasiPolynomial& qp,
                                         std::complex<double> s, const Region& reg) {
    const double slack = 0.5 * std::max(reg.re_max - reg.re_min, reg.im_max - reg.im_min);
    std::complex<double> fv = qp.eval(s);
    for (int it = 0; it < 50; ++it) {
        const double scale = 1.0 + std::abs(qp.p_at(s));
        if (std::abs(fv) <= 1e-12 * scale) {
            if (!reg.contains(s)) return std::nullopt;
            Root r;
            r.s = s;
            r.residual = std::abs(fv) / scale;
            const double dscale = qp_coeff_scale(qp);
            if (std::abs(qp.eval_s_derivative(s)) < 1e-8 * dscale) r.multiple = true;
            return r;
        }
        const std::complex<double> d = qp.eval_s_derivative(s);
        if (d == std::complex<double>(0.0, 0.0)) return std::nullopt;
        std::complex<double> step = fv / d;
        std::complex<double> s_next = s - step;
        std::complex<double> f_next = qp.eval(s_next);
        for (int halve = 0; halve < 25 && std::abs(f_next) > std::abs(fv); ++halve) {
            step *= 0.5;
            s_next = s - step;
            f_next = qp.eval(s_next);
        }
        s = s_next;
        fv = f_next;
        if (!reg.contains(s, slack)) return std::nullopt;
    }
    return std::nullopt;
}

struct SignGrid {
    int nx = 0, ny = 0; ///< cell counts
    double h = 0.0;
    double x0 = 0.0, y0 = 0.0;
    std::vector<std::complex<double>> f; ///< node values, (nx+1) x (ny+1)

    std::complex<double> at(int i, int j) const { return f[static_cast<std::size_t>(i) * (ny + 1) + j]; }
};

inline SignGrid eval_grid(const QuasiPolynomial& qp, const Region& reg, double h) {
    SignGrid g;
    g.h = h;
    g.x0 = reg.re_min;
    g.y0 = reg.im_min;
    g.nx = std::max(1, static_cast<int>(std::ceil((reg.re_max - reg.re_min) / h - 1e-12)));
    g.ny = std::max(1, static_cast<int>(std::ceil((reg.im_max - reg.im_min) / h - 1e-12)));
    g.f.resize(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1));
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny; ++j)
            g.f[static_cast<std::size_t>(i) * (g.ny + 1) + j] =
                qp.eval({g.x0 + i * h, g.y0 + j * h});
    return g;
}

inline bool mixed_sign(double a, double b, double c, double d) {
    const bool pos = a > 0 || b > 0 || c > 0 || d > 0;
    const bool neg = a < 0 || b < 0 || c < 0 || d < 0;
    const bool zero = a == 0 || b == 0 || c == 0 || d == 0;
    return (pos && neg) || zero;
}

/// Checkerboard corner pattern: both diagonals agree with each other but
/// disagree across, so the curve topology inside the cell is ambiguous.
inline bool saddle_pattern(double a, double b, double c, double d) {
    return (a > 0 && d > 0 && b < 0 && c < 0) || (a < 0 && d < 0 && b > 0 && c > 0);
}

} // namespace detail

/// Conservative frequency cap: every root with Re(s) >= x0 satisfies
/// |s| < cap. Derived from monic-P dominance: |P(s)| exceeds the largest
/// possible |Q(s) e^{-tau s}| once |s| clears the returned radius.
inline double dominance_cap(const QuasiPolynomial& qp, double x0) {
    const double damp = std::exp(-qp.tau * x0);
    std::array<double, 5> g{};
    for (int i = 0; i < 4; ++i) g[i] = -std::abs(qp.p[i]) - damp * std::abs(qp.q[i]);
    g[4] = 1.0;
    const double r = largest_real_root(g, 0.0);
    return std::max(1.0, 1.05 * r + 0.1);
}

namespace detail {

/// Upper bound on |df/ds| valid on a straight segment with both endpoint
/// moduli below `radius` and real parts at least `re_lo` (the modulus along
/// a segment is maximal at an endpoint).
inline double derivative_bound(const QuasiPolynomial& qp, double radius, double re_lo) {
    double p_deriv = 0.0, q_mag = 0.0, q_deriv = 0.0;
    double pw = 1.0;
    for (int i = 1; i <= 4; ++i) {
        p_deriv += i * std::abs(qp.p[i]) * pw;
        if (i <= 3) q_deriv += i * std::abs(qp.q[i]) * pw;
        pw *= radius;
    }
    pw = 1.0;
    for (int i = 0; i <= 3; ++i) {
        q_mag += std::abs(qp.q[i]) * pw;
        pw *= radius;
    }
    return p_deriv + (q_deriv + qp.tau * q_mag) * std::exp(-qp.tau * re_lo);
}

} // namespace detail

/// Winding number of f around the rectangle boundary; equals the number of
/// enclosed roots with multiplicity. Each boundary segment is accepted only
/// once a rigorous |f'| bound certifies that f cannot leave a zero-free disk
/// across it, which caps the true argument increment per step below pi/2 and
/// rules out the 2*pi aliasing a plain angle heuristic can suffer near
/// almost-touching roots. Sampling is capped at 2^16 evaluations per edge;
/// roots sitting (numerically) on the contour trigger an outward nudge that
/// escalates until the contour clears them.
inline int count_roots(const QuasiPolynomial& qp, Region reg) {
    reg.validate();
    const double coeff_scale = detail::qp_coeff_scale(qp);

    constexpr double kNudges[] = {0.0, 1e-6, 1e-4, 5e-4, 2e-3};
    std::string failure;

    for (double eps : kNudges) {
        const Region r{reg.re_min - eps, reg.re_max + eps, reg.im_min - eps, reg.im_max + eps};
        const std::complex<double> corners[5] = {{r.re_min, r.im_min},
                                                 {r.re_max, r.im_min},
                                                 {r.re_max, r.im_max},
                                                 {r.re_min, r.im_max},
                                                 {r.re_min, r.im_min}};
        double total = 0.0;
        bool retry = false;

        for (int e = 0; e < 4 && !retry; ++e) {
            const std::complex<double> p0 = corners[e];
            const std::complex<double> p1 = corners[e + 1];
            const double edge_len = std::abs(p1 - p0);
            constexpr int kInitial = 64;
            constexpr int kBudget = 1 << 16;
            int evals = 0;

            struct Sample {
                double t;
                std::complex<double> f;
            };
            auto sample = [&](double t) {
                const std::complex<double> v = qp.eval(p0 + (p1 - p0) * t);
                ++evals;
                if (std::abs(v) < 1e-13 * coeff_scale) retry = true;
                return Sample{t, v};
            };
            auto certified = [&](const Sample& a, const Sample& b) {
                const std::complex<double> sa = p0 + (p1 - p0) * a.t;
                const std::complex<double> sb = p0 + (p1 - p0) * b.t;
                const double radius = std::max(std::abs(sa), std::abs(sb));
                const double re_lo = std::min(sa.real(), sb.real());
                const double bound = detail::derivative_bound(qp, radius, re_lo);
                const double len = (b.t - a.t) * edge_len;
                return bound * len <= 0.44 * std::min(std::abs(a.f), std::abs(b.f));
            };

            std::vector<std::pair<Sample, Sample>> stack;
            Sample prev = sample(0.0);
            for (int i = 1; i <= kInitial && !retry; ++i) {
                const Sample cur = sample(static_cast<double>(i) / kInitial);
                stack.emplace_back(prev, cur);
                prev = cur;
            }
            while (!stack.empty() && !retry) {
                const auto [a, b] = stack.back();
                stack.pop_back();
                if (certified(a, b)) {
                    double d = std::arg(b.f) - std::arg(a.f);
                    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
                    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
                    total += d;
                    continue;
                }
                if (evals >= kBudget) {
                    retry = true;
                    failure = "sampling budget exhausted";
                    break;
                }
                const Sample mid = sample(0.5 * (a.t + b.t));
                stack.emplace_back(a, mid);
                stack.emplace_back(mid, b);
            }
        }
        if (retry) {
            if (failure.empty()) failure = "boundary near-zero";
            continue;
        }
        const double w = total / (2.0 * std::numbers::pi);
        const long rounded = std::lround(w);
        if (std::abs(w - static_cast<double>(rounded)) > 0.25) {
            failure = "winding sum is not an integer";
            continue;
        }
        return static_cast<int>(rounded);
    }
    throw std::runtime_error("count_roots: root on boundary persists (" + failure + ")");
}

/// Locate roots inside `reg` from a grid of cell seeds plus a dedicated
/// scan along the real axis (where Im f vanishes identically and cell sign
/// tests degenerate). The returned set is certified against the argument
/// principle over a hair-expanded rectangle.
inline RootSet find_roots(const QuasiPolynomial& qp, const Region& reg, double grid_step) {
    reg.validate();
    if (!(grid_step > 0.0) || grid_step > reg.min_extent() / 10.0)
        throw std::invalid_argument("find_roots: grid_step must be in (0, min_extent/10]");

    RootSet out;
    out.region = reg;

    const detail::SignGrid grid = detail::eval_grid(qp, reg, grid_step);
    std::vector<std::complex<double>> seeds;
    int ambiguous_cells = 0;

    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            const std::complex<double> c00 = grid.at(i, j), c10 = grid.at(i + 1, j),
                                       c01 = grid.at(i, j + 1), c11 = grid.at(i + 1, j + 1);
            const bool re_mixed =
                detail::mixed_sign(c00.real(), c10.real(), c01.real(), c11.real());
            const bool im_mixed =
                detail::mixed_sign(c00.imag(), c10.imag(), c01.imag(), c11.imag());
            if (re_mixed && im_mixed) {
                seeds.emplace_back(grid.x0 + (i + 0.5) * grid_step,
                                   grid.y0 + (j + 0.5) * grid_step);
                if (detail::saddle_pattern(c00.real(), c10.real(), c01.real(), c11.real()) ||
                    detail::saddle_pattern(c00.imag(), c10.imag(), c01.imag(), c11.imag()))
                    ++ambiguous_cells;
            }
        }
    }
    if (ambiguous_cells > 0)
        out.warnings.push_back(std::to_string(ambiguous_cells) +
                               " cell(s) with ambiguous curve topology; grid may be coarse");

    // Real-axis scan: f is real-valued there, so bracket sign changes of
    // Re f directly. Only applies when the axis belongs to the region.
    if (reg.im_min <= 0.0 && reg.im_max >= 0.0) {
        const int n = grid.nx;
        double prev = qp.eval({reg.re_min, 0.0}).real();
        for (int i = 1; i <= n; ++i) {
            const double x = std::min(reg.re_min + i * grid_step, reg.re_max);
            const double cur = qp.eval({x, 0.0}).real();
            if ((prev <= 0.0 && cur >= 0.0) || (prev >= 0.0 && cur <= 0.0))
                seeds.emplace_back(x - 0.5 * grid_step, 0.0);
            prev = cur;
        }
    }

    int newton_failures = 0;
    for (const auto& seed : seeds) {
        const auto polished = detail::newton_polish(qp, seed, reg);
        if (!polished) {
            ++newton_failures;
            continue;
        }
        bool duplicate = false;
        for (auto& kept : out.roots) {
            if (std::abs(kept.s - polished->s) < 1e-6) {
                if (polished->residual < kept.residual) kept = *polished;
                duplicate = true;
                break;
            }
        }
        if (!duplicate) out.roots.push_back(*polished);
    }
    if (newton_failures > 0)
        out.warnings.push_back(std::to_string(newton_failures) +
                               " seed(s) did not converge or left the region");

    // Multiplicity follow-up on roots where f' nearly vanished.
    for (auto& r : out.roots) {
        if (!r.multiple) continue;
        const double d = 1e-3;
        try {
            r.multiplicity = count_roots(
                qp, Region{r.s.real() - d, r.s.real() + d, r.s.imag() - d, r.s.imag() + d});
        } catch (const std::runtime_error&) {
            out.warnings.push_back("multiplicity certification failed near a flat root");
        }
    }

    std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
        if (a.s.real() != b.s.real()) return a.s.real() < b.s.real();
        return a.s.imag() < b.s.imag();
    });

    try {
        const double eps = 5e-4; // off-edge envelope so axis roots sit firmly inside
        out.certified_count = count_roots(
            qp, Region{reg.re_min - eps, reg.re_max + eps, reg.im_min - eps, reg.im_max + eps});
        int found = 0;
        for (const auto& r : out.roots) found += r.multiplicity;
        out.certified = (out.certified_count == found);
        if (!out.certified)
            out.warnings.push_back("argument-principle count " +
                                   std::to_string(out.certified_count) + " != " +
                                   std::to_string(found) + " roots found");
    } catch (const std::runtime_error& e) {
        out.certified = false;
        out.warnings.push_back(std::string("certification failed: ") + e.what());
    }
    return out;
}

/// Cell-edge crossing points of the Re f = 0 and Im f = 0 level curves,
/// for external plotting.
struct ZeroCurves {
    std::vector<std::pair<double, double>> re_curve;
    std::vector<std::pair<double, double>> im_curve;
};

inline ZeroCurves zero_curves(const QuasiPolynomial& qp, const Region& reg, double grid_step) {
    reg.validate();
    const detail::SignGrid g = detail::eval_grid(qp, reg, grid_step);
    ZeroCurves out;
    auto emit = [&](double v0, double v1, double x0, double y0, double x1, double y1,
                    std::vector<std::pair<double, double>>& into) {
        if ((v0 < 0.0) == (v1 < 0.0) || v0 == v1) return;
        const double t = v0 / (v0 - v1);
        into.emplace_back(x0 + t * (x1 - x0), y0 + t * (y1 - y0));
    };
    for (int i = 0; i <= g.nx; ++i) {
        for (int j = 0; j <= g.ny; ++j) {
            const double x = g.x0 + i * grid_step, y = g.y0 + j * grid_step;
            const std::complex<double> v = g.at(i, j);
            if (i < g.nx) {
                const std::complex<double> r = g.at(i + 1, j);
                emit(v.real(), r.real(), x, y, x + grid_step, y, out.re_curve);
                emit(v.imag(), r.imag(), x, y, x + grid_step, y, out.im_curve);
            }
            if (j < g.ny) {
                const std::complex<double> u = g.at(i, j + 1);
                emit(v.real(), u.real(), x, y, x, y + grid_step, out.re_curve);
                emit(v.imag(), u.imag(), x, y, x, y + grid_step, out.im_curve);
            }
        }
    }
    return out;
}

/// Settings for the rightmost-root scan.
struct ScanSettings {
    Region region{-2.0, 1.5, 0.0, 5.0};
    double grid_step = 0.02;
    double omega_cap = 0.0;  ///< 0 = derive from the dominance bound
    double margin = 1e-4;    ///< width of the excluded strip right of the candidate
    int max_expand = 6;
};

struct RightmostResult {
    std::complex<double> root;
    double abscissa = 0.0;
    bool certified = false;
    RootSet roots;
    std::string note;
};

/// Spectral-abscissa witness: the root of maximal real part, certified by
/// showing (argument principle + dominance cap) that no root lies to its
/// right. On certification failure the search region is widened and the
/// grid refined before giving up with a flagged best-effort answer.
inline RightmostResult rightmost_root(const QuasiPolynomial& qp, ScanSettings scan = {}) {
    RightmostResult res;
    Region reg = scan.region;
    double h = scan.grid_step;

    for (int attempt = 0; attempt <= scan.max_expand; ++attempt) {
        RootSet rs = find_roots(qp, reg, h);
        if (rs.roots.empty()) {
            reg.re_min -= 1.5; // all roots left of the window; widen and retry
            continue;
        }
        const Root* best = &rs.roots.front();
        for (const auto& r : rs.roots)
            if (r.s.real() > best->s.real()) best = &r;

        res.root = best->s;
        res.abscissa = best->s.real();
        res.roots = std::move(rs);

        // Certify emptiness of a strip right of the candidate. When another
        // root sits almost exactly at the strip edge (tied rightmost pairs at
        // a minimax point) the winding integral cannot resolve it, so the
        // margin escalates until the edge clears the tie.
        int to_the_right = -1;
        double cap = 0.0;
        std::string last_error;
        for (double margin = scan.margin; margin <= 64.0 * scan.margin; margin *= 4.0) {
            const double x0 = res.abscissa + margin;
            cap = scan.omega_cap > 0.0 ? scan.omega_cap : dominance_cap(qp, x0);
            if (x0 >= cap) {
                to_the_right = 0; // cap alone excludes everything right of the root
                break;
            }
            try {
                to_the_right = count_roots(qp, Region{x0, cap, -cap, cap});
                break;
            } catch (const std::runtime_error& e) {
                last_error = e.what();
            }
        }
        if (to_the_right < 0) {
            res.note = "certification failed: " + last_error;
            return res;
        }
        if (to_the_right == 0) {
            res.certified = true;
            return res;
        }
        // A root to the right was missed by the grid: widen, refine, retry.
        reg = Region{reg.re_min, std::max(reg.re_max, cap), 0.0, std::max(reg.im_max, cap)};
        h = std::max(h / 2.0, 1e-4);
        const double nodes =
            ((reg.re_max - reg.re_min) / h) * ((reg.im_max - reg.im_min) / h);
        if (nodes > 2.0e7)
            h = std::sqrt((reg.re_max - reg.re_min) * (reg.im_max - reg.im_min) / 2.0e7);
        res.note = "expanded search after finding roots right of the candidate";
    }
    res.note += (res.note.empty() ? "" : "; ") + std::string("gave up after max_expand attempts");
    return res;
}

} // namespace pitchflap
