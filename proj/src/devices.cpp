#include "gfmcert/devices.hpp"

#include <algorithm>
#include <cmath>

#include "gfmcert/rational.hpp"

namespace gfmcert {

std::vector<std::string> ConverterSpec::validate() const {
    std::vector<std::string> out;
    if (!(d_p > 0.0)) out.push_back("d_p must be positive");
    if (!(d_q > 0.0)) out.push_back("d_q must be positive");
    if (tau_p < 0.0) out.push_back("tau_p must be nonnegative");
    if (tau_q < 0.0) out.push_back("tau_q must be nonnegative");
    if (!(s_local > 0.0)) out.push_back("s_local must be positive");
    if (!(s_global > 0.0)) out.push_back("s_global must be positive");
    return out;
}

void ConverterSpec::require_valid() const {
    auto v = validate();
    if (!v.empty()) throw ValidationError(std::move(v));
}

ConverterSpec rebase_gains(const ConverterSpec& spec) {
    spec.require_valid();
    ConverterSpec out = spec;
    const double ratio = spec.s_global / spec.s_local;
    out.d_p *= ratio;
    out.d_q *= ratio;
    out.s_local = spec.s_global;
    return out;
}

namespace {

/// First-order lag g/(τ s + 1); static gain when τ = 0.
StateSpaceModel lag(double gain, double tau) {
    if (tau == 0.0) return StateSpaceModel::gain(gain * Mat::Ones(1, 1));
    const auto r = realize_siso(Rational{Polynomial({gain}), Polynomial({1.0, tau})});
    return StateSpaceModel{r.a, r.b, r.c, r.d, {}, {}};
}

/// Place a SISO entry at (row, col) of a 2×2 transfer matrix.
StateSpaceModel embed_entry(const StateSpaceModel& entry, int row, int col) {
    Mat sel_in = Mat::Zero(1, 2);
    sel_in(0, col) = 1.0;
    Mat sel_out = Mat::Zero(2, 1);
    sel_out(row, 0) = 1.0;
    return postmultiply_gain(sel_out, premultiply_gain(entry, sel_in));
}

}  // namespace

StateSpaceModel droop_model(const ConverterSpec& spec) {
    spec.require_valid();
    return blockdiag({lag(spec.d_p, spec.tau_p), lag(spec.d_q, spec.tau_q)});
}

StateSpaceModel build_D(const std::vector<ConverterSpec>& specs) {
    if (specs.empty()) throw IllPosed("build_D: need at least one converter");
    std::vector<StateSpaceModel> blocks;
    blocks.reserve(specs.size());
    for (const auto& s : specs) blocks.push_back(droop_model(s));
    return blockdiag(blocks);
}

StateSpaceModel full_vsc_model(const DetailedVscSpec& spec) {
    spec.conv.require_valid();
    if (!(spec.l_f > 0.0)) throw IllPosed("full_vsc_model: l_f must be positive");
    if (spec.c_f < 0.0) throw IllPosed("full_vsc_model: c_f must be nonnegative");
    if (!(spec.v_d0 > 0.0)) throw DegenerateOperatingPoint("full_vsc_model: v_d0 must be positive");
    // r_f appears in the parameter tables but not in the printed closed-form
    // model; it is deliberately unused here.

    const double w0 = spec.omega0;
    const double lf_w = spec.l_f / w0;
    const double cf_w = spec.c_f / w0;

    // PI_cc = P_c(s)/s, G_cc = P_c/Q with Q = s² l_f/ω0 + P_c,
    // 1 − G_cc = s² (l_f/ω0)/Q.
    const Polynomial p_c({spec.pi_cc.k_i, spec.pi_cc.k_p});
    const Polynomial p_v({spec.pi_vc.k_i, spec.pi_vc.k_p});
    const Polynomial q = Polynomial({0.0, 0.0, lf_w}) + p_c;

    const double k1 = spec.i_d0 + spec.i_q0 - spec.v_d0 * spec.c_f;
    const double k2 = spec.i_q0 + spec.v_d0 * spec.c_f;

    // Common denominators with the 1/s of PI_vc and the 1/Q of G_cc cleared
    // (multiplying numerator and denominator by s·Q), so no origin factor
    // survives in the realized entries:
    //   den1 = −s³(l_f/ω0)·k1 + v_d0·P_c·P_v + (c_f/ω0)·s²·Q
    //   den2 = +s³(l_f/ω0)·i_d0 + v_d0·P_c·P_v + (c_f/ω0)·s²·Q
    const Polynomial s3({0.0, 0.0, 0.0, 1.0});
    const Polynomial vpp = p_c * p_v * spec.v_d0;
    const Polynomial cfq = (Polynomial({0.0, 0.0, cf_w})) * q;
    Polynomial den1 = s3 * (-lf_w * k1) + vpp + cfq;
    Polynomial den2 = s3 * (lf_w * spec.i_d0) + vpp + cfq;
    den1.trim(1e-14);
    den2.trim(1e-14);
    if (den1.is_zero() || den2.is_zero())
        throw DegenerateOperatingPoint("full_vsc_model: closed-form denominator vanishes");

    // D21 = s³(l_f/ω0) / den1
    const Rational d21{s3 * lf_w, den1};

    // D22 = v_d0·P_c·P_v·d_q / ((τ_q s+1)·den1) − s⁵(l_f/ω0)²·k2 / (Q·den2)
    // The two fractions keep their slightly different printed denominators
    // (den1 vs den2); this asymmetry is reproduced as published.
    const Polynomial tauq({1.0, spec.conv.tau_q});
    const Rational d22a{vpp * spec.conv.d_q, tauq * den1};
    const Polynomial s5({0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
    const Rational d22b{s5 * (lf_w * lf_w * k2), q * den2};
    const Rational d22 = d22a - d22b;

    if (!d21.proper() || !d22.proper())
        throw DegenerateOperatingPoint("full_vsc_model: improper closed-form entry");

    const auto r21 = realize_siso(d21);
    const auto r22 = realize_siso(d22);
    const StateSpaceModel e11 = embed_entry(lag(spec.conv.d_p, spec.conv.tau_p), 0, 0);
    const StateSpaceModel e21 = embed_entry(StateSpaceModel{r21.a, r21.b, r21.c, r21.d, {}, {}}, 1, 0);
    const StateSpaceModel e22 = embed_entry(StateSpaceModel{r22.a, r22.b, r22.c, r22.d, {}, {}}, 1, 1);
    return add(add(e11, e21), e22);
}

double reduction_consistency(const DetailedVscSpec& detailed, const FrequencyGrid& grid) {
    const auto full = full_vsc_model(detailed);
    const auto reduced = droop_model(detailed.conv);
    double worst = 0.0;
    for (double w : grid.omegas) {
        const CMat f = eval_freq(full, w);
        const CMat r = eval_freq(reduced, w);
        worst = std::max(worst, (f - r).norm() / std::max(r.norm(), 1e-300));
    }
    return worst;
}

}  // namespace gfmcert
