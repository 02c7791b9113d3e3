#pragma once

// JSON adapters for the library value types (nlohmann::json). Polynomial
// coefficients serialize ascending by power, matching the in-memory layout.

#include "pitchflap/ctcr.hpp"
#include "pitchflap/dde_sim.hpp"
#include "pitchflap/optimizer.hpp"
#include "pitchflap/quasipoly.hpp"
#include "pitchflap/rootfinder.hpp"
#include "pitchflap/rotor_model.hpp"

#include <json.hpp>

namespace pitchflap {

inline void to_json(nlohmann::json& j, const RotorParams& p) {
    j = nlohmann::json{{"r_g", p.r_g},         {"c_h", p.c_h},
                       {"gamma", p.gamma},     {"lambda1", p.lambda1},
                       {"sigma", p.sigma},     {"nu1_sq", p.nu1_sq},
                       {"act_gain", p.act_gain}};
}

inline void to_json(nlohmann::json& j, const ControlGains& g) {
    j = nlohmann::json{{"a", g.a}, {"b", g.b}};
}

inline void to_json(nlohmann::json& j, const QuasiPolynomial& qp) {
    j = nlohmann::json{{"p_ascending", qp.p}, {"q_ascending", qp.q}, {"tau", qp.tau}};
}

inline void to_json(nlohmann::json& j, const Crossing& c) {
    j = nlohmann::json{{"omega_c", c.omega_c},
                       {"tau_core", c.tau_core},
                       {"rt", c.rt},
                       {"period", c.period},
                       {"degenerate", c.degenerate}};
}

inline void to_json(nlohmann::json& j, const StabilityTable& t) {
    nlohmann::json bps = nlohmann::json::array();
    for (const auto& bp : t.breakpoints)
        bps.push_back({{"tau", bp.tau},
                       {"omega_c", bp.omega_c},
                       {"k", bp.k},
                       {"rt", bp.rt},
                       {"nu_after", bp.nu_after}});
    nlohmann::json ivs = nlohmann::json::array();
    for (const auto& iv : t.intervals)
        ivs.push_back({{"tau_lo", iv.lo}, {"tau_hi", iv.hi}, {"nu", iv.nu}});
    nlohmann::json stable = nlohmann::json::array();
    for (const auto& iv : t.stable_intervals)
        stable.push_back({{"tau_lo", iv.lo}, {"tau_hi", iv.hi}});
    j = nlohmann::json{{"nu_zero", t.nu_zero},
                       {"crossings", t.crossings},
                       {"breakpoints", bps},
                       {"intervals", ivs},
                       {"stable_intervals", stable},
                       {"tau_max", t.tau_max},
                       {"certified", t.certified},
                       {"flags", t.flags}};
}

inline void to_json(nlohmann::json& j, const Region& r) {
    j = nlohmann::json{
        {"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min}, {"im_max", r.im_max}};
}

inline void to_json(nlohmann::json& j, const RootSet& rs) {
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& r : rs.roots)
        roots.push_back({{"re", r.s.real()},
                         {"im", r.s.imag()},
                         {"residual", r.residual},
                         {"multiplicity", r.multiplicity}});
    j = nlohmann::json{{"roots", roots},
                       {"region", rs.region},
                       {"certified_count", rs.certified_count},
                       {"certified", rs.certified},
                       {"warnings", rs.warnings}};
}

inline void to_json(nlohmann::json& j, const Classification& c) {
    nlohmann::json evs = nlohmann::json::array();
    for (const auto& ev : c.eigenvalues) evs.push_back({{"re", ev.real()}, {"im", ev.imag()}});
    j = nlohmann::json{{"label", to_string(c.label)},
                       {"real_unstable", c.real_unstable},
                       {"pairs_unstable", c.pairs_unstable},
                       {"marginal", c.marginal},
                       {"eigenvalues", evs}};
}

inline void to_json(nlohmann::json& j, const DelayOptimum& o) {
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& r : o.rightmost_roots) roots.push_back({{"re", r.real()}, {"im", r.imag()}});
    j = nlohmann::json{{"tau_star", o.tau_star},
                       {"abscissa", o.abscissa},
                       {"unimodal", o.unimodal},
                       {"rightmost_roots", roots}};
}

inline void to_json(nlohmann::json& j, const JointOptimum& o) {
    j = nlohmann::json{{"a", o.gains.a},
                       {"b", o.gains.b},
                       {"tau", o.tau},
                       {"abscissa", o.abscissa},
                       {"converged", o.converged},
                       {"evaluations", o.evaluations}};
}

inline void to_json(nlohmann::json& j, const C0Report& r) {
    j = nlohmann::json{{"c0", r.c0},
                       {"c0_quartic", r.c0_quartic},
                       {"published_form", r.published_form},
                       {"corrected_form", r.corrected_form},
                       {"diff_published", r.diff_published},
                       {"diff_corrected", r.diff_corrected}};
}

} // namespace pitchflap
