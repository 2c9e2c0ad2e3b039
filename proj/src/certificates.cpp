#include "gfmcert/certificates.hpp"

#include <algorithm>
#include <cmath>

namespace gfmcert {

namespace {

constexpr double kBoundaryTol = 1e-9;

ConditionResult make_result(double lhs, double rhs) {
    ConditionResult r;
    r.margin = rhs - lhs;
    r.pass = r.margin > 0.0;
    r.near_boundary = std::abs(r.margin) < kBoundaryTol * std::max(1.0, std::abs(rhs));
    return r;
}

}  // namespace

RhoCoefficients table1_coeffs(double rho, double vmax) {
    if (rho < 0.0) throw IllPosed("table1_coeffs: rho must be nonnegative");
    if (!(vmax > 0.0)) throw IllPosed("table1_coeffs: vmax must be positive");
    RhoCoefficients c;
    c.rho = rho;
    c.vmax = vmax;
    const double r2 = rho * rho;
    const double v2 = vmax * vmax;
    c.c1 = (1.0 + r2) / (5.0 + 2.0 * r2);
    c.c3 = 2.0 * rho * (1.0 + r2);
    c.c5 = 5.0 * (1.0 + r2) / 4.0;
    c.c6 = (1.0 + r2) / (2.0 * r2 * v2 + 5.0 * v2);
    c.c8 = -2.0 * rho * v2 * v2;
    c.c9 = v2 * (2.0 * r2 - 5.0);
    if (rho == 0.0) {
        c.degenerate = true;
        c.c2 = c.c4 = c.c7 = 0.0;
        return c;
    }
    c.c2 = (1.0 + r2) * (1.0 + r2) / (6.0 * rho);
    c.c4 = ((2.0 * r2 - 5.0) + std::sqrt((5.0 - 2.0 * r2) * (5.0 - 2.0 * r2) + 16.0 * r2)) /
           (4.0 * rho);
    c.c7 = (r2 + 1.0) * (r2 + 1.0) / (6.0 * rho * v2);
    return c;
}

CouplingStrengths coupling_strengths(const NetworkSpec& net, const ConverterSpec& conv, int i) {
    net.require_valid();
    conv.require_valid();
    if (i < 0 || i >= net.n) throw IllPosed("coupling_strengths: node index out of range");
    CouplingStrengths cs;
    const double sb = net.sum_b(i);
    cs.alpha_p = conv.d_p * net.vmax * net.vmax * sb;
    cs.alpha_q = conv.d_q / net.v0(i) * sb;
    cs.tau_p_tilde = conv.tau_p * net.omega0;
    cs.tau_q_tilde = conv.tau_q * net.omega0;
    return cs;
}

std::array<ConditionResult, 4> check_active(const CouplingStrengths& cs,
                                            const RhoCoefficients& c) {
    if (c.degenerate) throw RhoZero("check_active: conditions are vacuous at rho = 0");
    const double rho = c.rho;
    const double r2 = rho * rho;
    const double tp = cs.tau_p_tilde;
    std::array<ConditionResult, 4> out;
    out[0] = make_result(cs.alpha_p, c.c1 * (2.0 * rho + tp * (1.0 + r2)));
    out[1] = make_result(cs.alpha_p, c.c2);
    out[2] = make_result(cs.alpha_p, c.c3 * (tp * (tp * (1.0 + r2) + 2.0 * rho) + 1.0) /
                                         (4.0 * tp * rho * (1.0 + r2) + 2.0 * r2 + 5.0));
    out[3] = make_result(cs.alpha_p, c.c4);
    return out;
}

std::array<ConditionResult, 4> check_reactive(const CouplingStrengths& cs,
                                              const RhoCoefficients& c) {
    if (c.degenerate) throw RhoZero("check_reactive: conditions are vacuous at rho = 0");
    const double tq = cs.tau_q_tilde;
    const double aq = cs.alpha_q;
    std::array<ConditionResult, 4> out;
    out[0] = make_result(aq, c.c5);
    out[1] = make_result(aq, c.c6 * 2.0 * c.rho * tq);
    out[2] = make_result(aq, c.c7 * tq);
    // Positivity of the quadratic form; margin is the form value itself.
    const double form = aq * aq * c.c8 + aq * tq * c.c9 + 2.0 * tq * tq * c.rho;
    ConditionResult d;
    d.margin = form;
    d.pass = form > 0.0;
    const double scale = std::max({1.0, std::abs(aq * aq * c.c8), std::abs(aq * tq * c.c9),
                                   std::abs(2.0 * tq * tq * c.rho)});
    d.near_boundary = std::abs(form) < kBoundaryTol * scale;
    out[3] = d;
    return out;
}

std::pair<bool, bool> check_corollary(const CouplingStrengths& cs, double rho,
                                      const ConverterSpec& conv) {
    const double c5 = 5.0 * (1.0 + rho * rho) / 4.0;
    return {cs.alpha_q < c5, conv.tau_p > 0.0};
}

CertificateReport evaluate_certificates(const NetworkSpec& net,
                                        const std::vector<ConverterSpec>& convs) {
    net.require_valid();
    if (static_cast<int>(convs.size()) != net.n)
        throw IllPosed("evaluate_certificates: one converter per network node required");
    CertificateReport rep;
    rep.coeffs = table1_coeffs(net.rho, net.vmax);
    rep.dynamic_pass = !rep.coeffs.degenerate;
    rep.level1_pass = true;
    rep.level2_pass = true;
    for (int i = 0; i < net.n; ++i) {
        ConverterCertificate cert;
        cert.coupling = coupling_strengths(net, convs[static_cast<size_t>(i)], i);
        if (!rep.coeffs.degenerate) {
            cert.active = check_active(cert.coupling, rep.coeffs);
            cert.reactive = check_reactive(cert.coupling, rep.coeffs);
            cert.dynamic_pass = true;
            for (const auto& r : cert.active) cert.dynamic_pass &= r.pass;
            for (const auto& r : cert.reactive) cert.dynamic_pass &= r.pass;
        }
        const auto [aq_ok, tp_ok] =
            check_corollary(cert.coupling, net.rho, convs[static_cast<size_t>(i)]);
        cert.corollary_alpha_q = aq_ok;
        cert.corollary_tau_p = tp_ok;
        cert.level1_pass = aq_ok && tp_ok;
        cert.level2_pass = true;  // positive droop gains suffice at this level
        rep.dynamic_pass &= cert.dynamic_pass;
        rep.level1_pass &= cert.level1_pass;
        rep.converters.push_back(std::move(cert));
    }
    return rep;
}

RegionGrid sample_region(double rho, double vmax, double alpha_min, double alpha_max,
                         double tau_min, double tau_max, int resolution, RegionKind kind) {
    if (resolution < 2) throw IllPosed("sample_region: resolution must be at least 2");
    if (!(alpha_max > alpha_min) || !(tau_max >= tau_min))
        throw IllPosed("sample_region: empty sampling window");
    const auto c = table1_coeffs(rho, vmax);
    RegionGrid g;
    g.alphas.resize(static_cast<size_t>(resolution));
    g.taus.resize(static_cast<size_t>(resolution));
    for (int k = 0; k < resolution; ++k) {
        const double t = static_cast<double>(k) / (resolution - 1);
        g.alphas[static_cast<size_t>(k)] = alpha_min + t * (alpha_max - alpha_min);
        g.taus[static_cast<size_t>(k)] = tau_min + t * (tau_max - tau_min);
    }
    g.feasible.assign(static_cast<size_t>(resolution),
                      std::vector<bool>(static_cast<size_t>(resolution), false));
    for (int ti = 0; ti < resolution; ++ti) {
        for (int ai = 0; ai < resolution; ++ai) {
            CouplingStrengths cs;
            bool ok = true;
            if (c.degenerate) {
                ok = false;
            } else if (kind == RegionKind::Active) {
                cs.alpha_p = g.alphas[static_cast<size_t>(ai)];
                cs.tau_p_tilde = g.taus[static_cast<size_t>(ti)];
                for (const auto& r : check_active(cs, c)) ok &= r.pass;
            } else {
                cs.alpha_q = g.alphas[static_cast<size_t>(ai)];
                cs.tau_q_tilde = g.taus[static_cast<size_t>(ti)];
                for (const auto& r : check_reactive(cs, c)) ok &= r.pass;
            }
            g.feasible[static_cast<size_t>(ti)][static_cast<size_t>(ai)] = ok;
        }
    }
    return g;
}

}  // namespace gfmcert
