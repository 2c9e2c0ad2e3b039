#include "gfmcert/passivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace gfmcert {

namespace {

/// Place a SISO subsystem at entry (row, col) of a 2×2 transfer matrix.
StateSpaceModel embed_entry2(const StateSpaceModel& entry, int row, int col) {
    Mat sel_in = Mat::Zero(1, 2);
    sel_in(0, col) = 1.0;
    Mat sel_out = Mat::Zero(2, 1);
    sel_out(row, 0) = 1.0;
    return postmultiply_gain(sel_out, premultiply_gain(entry, sel_in));
}

StateSpaceModel from_siso(const SisoRealization& r) {
    return StateSpaceModel{r.a, r.b, r.c, r.d, {}, {}};
}

Polynomial line_den(double rho, double omega0) {
    return Polynomial({omega0 * omega0 * (1.0 + rho * rho), 2.0 * rho * omega0, 1.0});
}

void require_pair(const NetworkSpec& net, const std::vector<ConverterSpec>& convs) {
    net.require_valid();
    if (static_cast<int>(convs.size()) != net.n)
        throw IllPosed("one converter per network node required");
    for (const auto& c : convs) c.require_valid();
}

}  // namespace

GammaBuild build_gamma(const NetworkSpec& net, const std::vector<ConverterSpec>& convs) {
    require_pair(net, convs);
    if (!(net.rho > 0.0)) throw RhoZero("build_gamma: loop shifting requires rho > 0");
    const double rho = net.rho;
    const double w0 = net.omega0;
    const double opr = 1.0 + rho * rho;

    GammaBuild out;
    out.spec.gamma1 = Vec(net.n);
    out.spec.gamma2 = Vec(net.n);
    out.spec.gamma3_p = Vec(net.n);
    out.spec.gamma3_q = Vec(net.n);
    out.spec.gamma3_q_tilde = Vec(net.n);
    out.spec.tilde_clamped.assign(static_cast<size_t>(net.n), false);

    std::vector<StateSpaceModel> blocks;
    blocks.reserve(static_cast<size_t>(net.n));
    const Polynomial den = line_den(rho, w0);
    for (int i = 0; i < net.n; ++i) {
        const double sb = net.sum_b(i);
        const double g1 = 2.0 * net.vmax * net.vmax * sb / (w0 * w0);
        const double g2 = -3.0 * net.vmax * net.vmax * sb;
        const double g3p = -g2 / opr;
        const double floor = 0.8 * sb / opr;
        const double natural = net.v0(i) / convs[static_cast<size_t>(i)].d_q;
        const bool clamped = natural < floor;
        const double tilde = clamped ? floor : natural;
        const double g3q = -g2 / opr + tilde;
        out.spec.gamma1(i) = g1;
        out.spec.gamma2(i) = g2;
        out.spec.gamma3_p(i) = g3p;
        out.spec.gamma3_q(i) = g3q;
        out.spec.gamma3_q_tilde(i) = tilde;
        out.spec.tilde_clamped[static_cast<size_t>(i)] = clamped;

        // Γᵖ: the third parameter cancels the DC part exactly, leaving a
        // stable first-over-second-order element.
        const Rational gp{Polynomial({2.0 * rho * w0 * g3p, g1 * w0 * w0 + g3p}), den};
        // Γᵠ: the surplus tilde keeps a simple origin pole.
        const Rational gq{Polynomial({tilde * w0 * w0 * opr, 2.0 * rho * w0 * g3q,
                                      g1 * w0 * w0 + g3q}),
                          Polynomial({0.0, w0 * w0 * opr, 2.0 * rho * w0, 1.0})};
        blocks.push_back(add(embed_entry2(from_siso(realize_siso(gp)), 0, 0),
                             embed_entry2(from_siso(realize_siso(gq)), 1, 1)));
    }
    out.model = blockdiag(blocks);
    return out;
}

StateSpaceModel transformed_device_model(const NetworkSpec& net,
                                         const std::vector<ConverterSpec>& convs) {
    require_pair(net, convs);
    std::vector<StateSpaceModel> blocks;
    blocks.reserve(static_cast<size_t>(net.n));
    for (int i = 0; i < net.n; ++i) {
        const auto& c = convs[static_cast<size_t>(i)];
        if (c.tau_q == 0.0)
            throw IllPosed("transformed_device_model: voltage-rate channel is improper at tau_q = 0");
        // p channel in rad/s per pu power.
        const Rational dp{Polynomial({c.d_p * net.omega0}), Polynomial({1.0, c.tau_p})};
        // q channel: normalized voltage rate.
        const Rational dq{Polynomial({0.0, c.d_q / net.v0(i)}), Polynomial({1.0, c.tau_q})};
        blocks.push_back(add(embed_entry2(from_siso(realize_siso(dp)), 0, 0),
                             embed_entry2(from_siso(realize_siso(dq)), 1, 1)));
    }
    return blockdiag(blocks);
}

std::pair<StateSpaceModel, StateSpaceModel> loop_shift(const StateSpaceModel& d,
                                                       const StateSpaceModel& n,
                                                       const StateSpaceModel& gamma) {
    // D(I−ΓD)⁻¹ is the w1→y1 map of the standard feedback pair with −Γ in
    // the return path.
    const Mat neg = -Mat::Identity(gamma.n_outputs(), gamma.n_outputs());
    const auto gang = interconnect_gang_of_four(d, postmultiply_gain(neg, gamma));
    return {gang.sensitivity_h1, add(n, gamma)};
}

CMat closed_form_S_Nprime(const NetworkSpec& net, const GammaSpec& g, double omega) {
    net.require_valid();
    if (!(net.rho > 0.0)) throw RhoZero("closed_form_S_Nprime: requires rho > 0");
    const double rho = net.rho;
    const double w0 = net.omega0;
    const double a = w0 * w0 + rho * rho * w0 * w0 - omega * omega;
    const double h = 4.0 * rho * w0 * w0 * w0 /
                     (a * a + 4.0 * rho * rho * w0 * w0 * omega * omega);
    const Complex jw_ratio(0.0, omega / w0);

    CMat s = CMat::Zero(2 * net.n, 2 * net.n);
    for (int i = 0; i < net.n; ++i) {
        const double sb = net.sum_b(i);
        const double diag_corr = omega * omega * g.gamma1(i) - g.gamma2(i);
        CMat blk(2, 2);
        const double lv = net.v0(i) * net.v0(i) * sb;
        blk << Complex(-lv + diag_corr, 0.0), -lv * jw_ratio,  //
            lv * jw_ratio, Complex(-lv + diag_corr, 0.0);
        s.block(2 * i, 2 * i, 2, 2) = h * blk;
        for (int j = 0; j < net.n; ++j) {
            if (j == i || net.b(i, j) == 0.0) continue;
            const double w = net.v0(i) * net.v0(j) * net.b(i, j);
            CMat off(2, 2);
            off << Complex(w, 0.0), w * jw_ratio, -w * jw_ratio, Complex(w, 0.0);
            s.block(2 * i, 2 * j, 2, 2) = h * off;
        }
    }
    return s;
}

Mat closed_form_residue_origin(const NetworkSpec& net, const GammaSpec& g) {
    net.require_valid();
    const double opr = 1.0 + net.rho * net.rho;
    Mat r = Mat::Zero(2 * net.n, 2 * net.n);
    for (int i = 0; i < net.n; ++i) {
        double d11 = 0.0;
        double d22 = 0.0;
        for (int j = 0; j < net.n; ++j) {
            if (j == i) continue;
            const double vivj = net.v0(i) * net.v0(j) * net.b(i, j);
            d11 += vivj / opr;
            d22 += (2.0 * net.v0(i) * net.v0(i) * net.b(i, j) - vivj) / opr;
            r(2 * i, 2 * j) = -vivj / opr;
            r(2 * i + 1, 2 * j + 1) = -vivj / opr;
        }
        r(2 * i, 2 * i) = d11;
        r(2 * i + 1, 2 * i + 1) = d22 + g.gamma3_q_tilde(i);
    }
    return r;
}

CMat residue_at_axis_pole(const StateSpaceModel& m, Complex lambda, double rel_tol) {
    m.check_dims();
    if (m.n_states() == 0) return CMat::Zero(m.n_outputs(), m.n_inputs());
    const CMat a = m.a.cast<Complex>();
    const double scale = std::max(1.0, m.a.norm());
    const double radius = rel_tol * scale;

    Eigen::ComplexEigenSolver<CMat> right(a, /*computeEigenvectors=*/true);
    Eigen::ComplexEigenSolver<CMat> left(a.adjoint(), /*computeEigenvectors=*/true);

    std::vector<Eigen::Index> ri, li;
    for (Eigen::Index k = 0; k < m.n_states(); ++k) {
        if (std::abs(right.eigenvalues()(k) - lambda) < radius) ri.push_back(k);
        if (std::abs(left.eigenvalues()(k) - std::conj(lambda)) < radius) li.push_back(k);
    }
    if (ri.empty()) return CMat::Zero(m.n_outputs(), m.n_inputs());
    if (ri.size() != li.size())
        throw NotSimplePole("residue_at_axis_pole: eigenvalue cluster sizes disagree");

    const Eigen::Index k = static_cast<Eigen::Index>(ri.size());
    CMat v0(m.n_states(), k), w0(m.n_states(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
        v0.col(c) = right.eigenvectors().col(ri[static_cast<size_t>(c)]);
        w0.col(c) = left.eigenvectors().col(li[static_cast<size_t>(c)]);
    }
    const CMat overlap = w0.adjoint() * v0;
    Eigen::JacobiSVD<CMat> svd(overlap);
    if (svd.singularValues()(k - 1) < rel_tol * std::max(1.0, svd.singularValues()(0)))
        throw NotSimplePole("residue_at_axis_pole: defective eigenvalue cluster");
    const CMat projector = v0 * overlap.inverse() * w0.adjoint();
    return m.c.cast<Complex>() * projector * m.b.cast<Complex>();
}

CMat residue_at_origin(const StateSpaceModel& m, double rel_tol) {
    return residue_at_axis_pole(m, Complex(0.0, 0.0), rel_tol);
}

std::pair<HurwitzCoefficients, bool> dprime_p_coeffs(const ConverterSpec& conv,
                                                     const GammaSpec& g, const NetworkSpec& net,
                                                     int i) {
    conv.require_valid();
    if (i < 0 || i >= net.n) throw IllPosed("dprime_p_coeffs: node index out of range");
    const double rho = net.rho;
    const double w0 = net.omega0;
    const double opr = 1.0 + rho * rho;
    const double dsi = conv.d_p * w0;  // rad/s per pu power
    HurwitzCoefficients h;
    h.a0 = w0 * w0 * opr - 2.0 * rho * w0 * dsi * g.gamma3_p(i);
    h.a1 = 2.0 * rho * w0 + conv.tau_p * w0 * w0 * opr - dsi * w0 * w0 * g.gamma1(i) -
           dsi * g.gamma3_p(i);
    h.a2 = 2.0 * w0 * conv.tau_p * rho + 1.0;
    h.a3 = conv.tau_p;
    h.b0 = w0 * w0 * opr;
    h.b1 = 2.0 * rho * w0;
    h.b2 = 1.0;
    const bool hurwitz = h.a0 > 0.0 && h.a1 > 0.0 && h.a2 > 0.0 && h.a2 * h.a1 > h.a0 * h.a3;
    return {h, hurwitz};
}

Rational dprime_p_rational(const ConverterSpec& conv, const GammaSpec& g, const NetworkSpec& net,
                           int i) {
    const auto [h, ok] = dprime_p_coeffs(conv, g, net, i);
    (void)ok;
    const double dsi = conv.d_p * net.omega0;
    Polynomial den({h.a0, h.a1, h.a2, h.a3});
    den.trim(1e-14);
    return {Polynomial({h.b0, h.b1, h.b2}) * dsi, den};
}

Rational dprime_q_rational(const ConverterSpec& conv, const GammaSpec& g, const NetworkSpec& net,
                           int i) {
    conv.require_valid();
    if (i < 0 || i >= net.n) throw IllPosed("dprime_q_rational: node index out of range");
    const double rho = net.rho;
    const double w0 = net.omega0;
    const double opr = 1.0 + rho * rho;
    const double k = conv.d_q / net.v0(i);
    const Polynomial den_dim = line_den(rho, w0);
    const Polynomial ng({g.gamma3_q_tilde(i) * w0 * w0 * opr, 2.0 * rho * w0 * g.gamma3_q(i),
                         g.gamma1(i) * w0 * w0 + g.gamma3_q(i)});
    Polynomial den_raw = Polynomial({1.0, conv.tau_q}) * den_dim - ng * k;
    den_raw.trim(1e-14);
    // When tilde was chosen as |v|₀/d_q the denominator's constant term
    // vanishes exactly and the origin pair cancels.
    if (std::abs(1.0 - k * g.gamma3_q_tilde(i)) < 1e-9) {
        return {den_dim * k, den_raw.deflate_origin(1e-9)};
    }
    return {den_dim * Polynomial({0.0, k}), den_raw};
}

PassivityVerdict passivity_check(const StateSpaceModel& model, const FrequencyGrid& grid,
                                 double tol, bool strict, double pole_exclusion) {
    model.check_dims();
    if (model.n_inputs() != model.n_outputs())
        throw IllPosed("passivity_check: model must be square");
    if (!grid.valid() || grid.omegas.empty())
        throw IllPosed("passivity_check: invalid frequency grid");

    PassivityVerdict v;
    v.strict = strict;

    const auto ps = poles(model);
    std::vector<double> axis_freqs;  // nonnegative imaginary parts of axis poles
    bool pole_ok = true;
    bool has_axis = false;
    for (const auto& p : ps) {
        const double axis_tol = 1e-9 * std::max(1.0, std::abs(p));
        const bool on_axis = std::abs(p.real()) <= axis_tol;
        if (strict) {
            pole_ok &= p.real() < -axis_tol;
        } else {
            pole_ok &= p.real() <= axis_tol;
        }
        if (on_axis) {
            has_axis = true;
            if (p.imag() >= 0.0) axis_freqs.push_back(p.imag());
        }
    }
    v.pole_check = pole_ok;

    // Distinct axis frequencies for exclusion and residues.
    std::sort(axis_freqs.begin(), axis_freqs.end());
    std::vector<double> distinct;
    for (double w : axis_freqs)
        if (distinct.empty() || w - distinct.back() > pole_exclusion) distinct.push_back(w);

    std::vector<double> sweep = grid.omegas;
    const bool origin_pole =
        !distinct.empty() && distinct.front() < pole_exclusion;
    if (!origin_pole) sweep.insert(sweep.begin(), 0.0);

    v.grid_psd = true;
    v.worst_min_eig = std::numeric_limits<double>::infinity();
    for (double w : sweep) {
        bool excluded = false;
        for (double pw : distinct)
            if (std::abs(w - pw) < pole_exclusion) excluded = true;
        if (excluded) continue;
        const CMat resp = eval_freq(model, w);
        const CMat herm = resp + resp.adjoint();
        Eigen::SelfAdjointEigenSolver<CMat> es(herm, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues()(0);
        if (min_eig < v.worst_min_eig) {
            v.worst_min_eig = min_eig;
            v.worst_omega = w;
        }
        v.grid_psd &= strict ? (min_eig > tol) : (min_eig >= -tol);
    }

    v.residue_ok = true;
    if (!strict) {
        for (double pw : distinct) {
            const Complex lambda(0.0, pw);
            const CMat r = residue_at_axis_pole(model, lambda);
            const double rscale = std::max(1.0, r.norm());
            bool ok = (r - r.adjoint()).norm() <= 1e-8 * rscale;
            if (ok) {
                Eigen::SelfAdjointEigenSolver<CMat> es(CMat(0.5 * (r + r.adjoint())),
                                                       Eigen::EigenvaluesOnly);
                ok = es.eigenvalues()(0) >= -1e-10 * rscale;
            }
            v.residue_psd.emplace_back(lambda, ok);
            v.residue_ok &= ok;
        }
    } else if (has_axis) {
        v.diagnostics = "imaginary-axis pole present; strict passivity excluded";
    }

    v.overall = v.pole_check && v.grid_psd && v.residue_ok;
    return v;
}

FrequencyGrid default_passivity_grid(const StateSpaceModel& m, double omega0) {
    FrequencyGrid g = FrequencyGrid::log_spaced(1e-3, 1e5, 400);
    auto refine = [&g](double center) {
        if (!(center > 0.0)) return;
        std::vector<double> pts(50);
        const double lo = 0.8 * center;
        const double hi = 1.2 * center;
        for (int k = 0; k < 50; ++k) pts[static_cast<size_t>(k)] = lo + (hi - lo) * k / 49.0;
        g.merge(pts);
    };
    refine(omega0);
    for (const auto& p : poles(m))
        if (std::abs(p.real()) < 0.1 * std::abs(p.imag())) refine(std::abs(p.imag()));
    return g;
}

CertificateTrace certificate_trace(const NetworkSpec& net,
                                   const std::vector<ConverterSpec>& convs,
                                   const FrequencyGrid& grid, double tol) {
    require_pair(net, convs);
    CertificateTrace trace;
    auto push = [&trace](TraceStep s) { trace.steps.push_back(std::move(s)); };

    // I. Coordinate transformation: interconnection signals become the angle
    // rate and normalized voltage rate.
    StateSpaceModel n_t;
    std::vector<int> improper_q;
    {
        TraceStep step;
        step.name = "coordinate-transform";
        for (int i = 0; i < net.n; ++i)
            if (convs[static_cast<size_t>(i)].tau_q == 0.0) improper_q.push_back(i);
        n_t = build_N_transformed(net);
        step.pass = true;
        if (!improper_q.empty()) {
            std::ostringstream os;
            os << "voltage-rate channel improper (tau_q = 0) at node(s):";
            for (int i : improper_q) os << ' ' << i;
            step.detail = os.str();
        }
        push(std::move(step));
    }

    // II. Loop shifting.
    GammaBuild gb;
    StateSpaceModel nprime;
    {
        TraceStep step;
        step.name = "loop-shift";
        try {
            gb = build_gamma(net, convs);
            nprime = add(n_t, gb.model);
            step.pass = true;
            std::ostringstream os;
            for (int i = 0; i < net.n; ++i)
                if (gb.spec.tilde_clamped[static_cast<size_t>(i)])
                    os << "gamma3_q_tilde clamped to its lower bound at node " << i
                       << " (origin cancellation inexact); ";
            step.detail = os.str();
        } catch (const RhoZero& e) {
            step.pass = false;
            step.detail = e.what();
            push(std::move(step));
            trace.overall = false;
            return trace;
        }
        trace.gamma = gb.spec;
        push(std::move(step));
    }

    // III. Passivity of the shifted network.
    {
        TraceStep step;
        step.name = "network-passivity";
        const auto pv = passivity_check(nprime, grid, tol, /*strict=*/false);
        step.pass = pv.overall;
        step.worst_omega = pv.worst_omega;
        step.margin = pv.worst_min_eig;
        if (!pv.pole_check) step.detail += "pole condition failed; ";
        if (!pv.grid_psd) step.detail += "grid positive-semidefiniteness failed; ";
        if (!pv.residue_ok) step.detail += "origin residue not PSD; ";
        push(std::move(step));
    }

    // III. Strict passivity of every shifted device channel.
    {
        TraceStep step;
        step.name = "device-strict-passivity";
        step.pass = true;
        step.margin = std::numeric_limits<double>::infinity();
        std::ostringstream os;
        for (int i = 0; i < net.n; ++i) {
            const auto& c = convs[static_cast<size_t>(i)];
            const auto check_channel = [&](const Rational& r, const char* tag) {
                if (!r.proper()) {
                    step.pass = false;
                    os << tag << " channel improper at node " << i << "; ";
                    return;
                }
                const auto pv =
                    passivity_check(from_siso(realize_siso(r)), grid, tol / 10.0, /*strict=*/true);
                if (!pv.overall) {
                    step.pass = false;
                    os << tag << " channel fails strict passivity at node " << i << " (worst "
                       << pv.worst_min_eig << " at " << pv.worst_omega << " rad/s); ";
                }
                if (pv.worst_min_eig < step.margin) {
                    step.margin = pv.worst_min_eig;
                    step.worst_omega = pv.worst_omega;
                }
            };
            check_channel(dprime_p_rational(c, gb.spec, net, i), "active");
            check_channel(dprime_q_rational(c, gb.spec, net, i), "reactive");
        }
        step.detail = os.str();
        push(std::move(step));
    }

    // III. High-frequency gain condition for the passivity theorem.
    {
        TraceStep step;
        step.name = "gain-condition";
        const double w_top = grid.omegas.back();
        const Complex s(0.0, w_top);
        Eigen::JacobiSVD<CMat> svd(eval_freq(nprime, w_top));
        const double sigma_n = svd.singularValues()(0);
        double sigma_d = 0.0;
        for (int i = 0; i < net.n; ++i) {
            const auto& c = convs[static_cast<size_t>(i)];
            sigma_d = std::max(sigma_d, std::abs(dprime_p_rational(c, gb.spec, net, i).eval(s)));
            sigma_d = std::max(sigma_d, std::abs(dprime_q_rational(c, gb.spec, net, i).eval(s)));
        }
        step.margin = 1.0 - sigma_n * sigma_d;
        step.worst_omega = w_top;
        step.pass = step.margin > 0.0;
        push(std::move(step));
    }

    // IV. Final value theorem: delegated to the closed-loop DC-structure
    // check, which owns the assembled interconnection.
    {
        TraceStep step;
        step.name = "final-value";
        step.pass = true;
        step.deferred = true;
        step.detail = "delegated to the closed-loop final-value check";
        push(std::move(step));
    }

    trace.overall = true;
    for (const auto& s : trace.steps) trace.overall &= s.pass;
    return trace;
}

}  // namespace gfmcert
