#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gfmcert/analysis.hpp"
#include "gfmcert/certificates.hpp"
#include "gfmcert/passivity.hpp"

using namespace gfmcert;

namespace {

NetworkSpec three_bus() {
    NetworkSpec s;
    s.n = 3;
    s.b = 2.5 * (Mat::Ones(3, 3) - Mat::Identity(3, 3));
    s.rho = 0.05;
    s.omega0 = 100.0 * M_PI;
    s.v0 = Vec(3);
    s.v0 << 1.0, 0.9, 1.1;
    s.delta0 = Vec::Zero(3);
    return s;
}

ConverterSpec gfm(double d_p, double d_q, double tau_p, double tau_q) {
    ConverterSpec c;
    c.d_p = d_p;
    c.d_q = d_q;
    c.tau_p = tau_p;
    c.tau_q = tau_q;
    return c;
}

std::vector<ConverterSpec> cond_dyn() {
    return {gfm(0.003, 0.01, 0.1, 0.1), gfm(0.003, 0.01, 0.1, 0.1), gfm(0.003, 0.01, 0.1, 0.1)};
}

}  // namespace

TEST_CASE("build_gamma: parameter values and pole pattern") {
    const auto net = three_bus();
    const auto gb = build_gamma(net, cond_dyn());
    const double w0 = net.omega0;
    for (int i = 0; i < 3; ++i) {
        CHECK(gb.spec.gamma1(i) == doctest::Approx(2.0 * 1.21 * 5.0 / (w0 * w0)).epsilon(1e-12));
        CHECK(gb.spec.gamma2(i) == doctest::Approx(-18.15).epsilon(1e-12));
        CHECK(gb.spec.gamma3_p(i) == doctest::Approx(18.15 / 1.0025).epsilon(1e-12));
        CHECK(!gb.spec.tilde_clamped[static_cast<size_t>(i)]);
    }
    CHECK(gb.spec.gamma3_q_tilde(0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(gb.spec.gamma3_q_tilde(2) == doctest::Approx(110.0).epsilon(1e-12));

    // Poles: one origin pole per node plus two resonant pairs per node.
    int at_origin = 0, resonant = 0;
    for (const auto& p : poles(gb.model)) {
        if (std::abs(p) < 1e-6 * w0) {
            ++at_origin;
        } else {
            CHECK(std::abs(p.real() + net.rho * w0) < 1e-6 * w0);
            CHECK(std::abs(std::abs(p.imag()) - w0) < 1e-6 * w0);
            ++resonant;
        }
    }
    CHECK(at_origin == 3);
    CHECK(resonant == 12);
}

TEST_CASE("build_gamma: origin residue is diag(0, gamma3_q_tilde)") {
    const auto net = three_bus();
    const auto gb = build_gamma(net, cond_dyn());
    const CMat r = residue_at_origin(gb.model);
    Mat expect = Mat::Zero(6, 6);
    for (int i = 0; i < 3; ++i) expect(2 * i + 1, 2 * i + 1) = gb.spec.gamma3_q_tilde(i);
    CHECK((r - expect.cast<Complex>()).norm() < 1e-8 * expect.norm());
}

TEST_CASE("build_gamma clamps an inadmissible damping surplus") {
    const auto net = three_bus();
    auto convs = cond_dyn();
    convs[1].d_q = 5.0;  // natural surplus 0.18 < floor 3.99
    const auto gb = build_gamma(net, convs);
    CHECK(gb.spec.tilde_clamped[1]);
    CHECK(gb.spec.gamma3_q_tilde(1) == doctest::Approx(0.8 * 5.0 / 1.0025).epsilon(1e-12));
    CHECK(!gb.spec.tilde_clamped[0]);
}

TEST_CASE("build_gamma requires positive loss ratio") {
    auto net = three_bus();
    net.rho = 0.0;
    CHECK_THROWS_AS(build_gamma(net, cond_dyn()), RhoZero);
}

TEST_CASE("transformed device model: frequency response and impropriety guard") {
    const auto net = three_bus();
    const auto d = transformed_device_model(net, cond_dyn());
    const double w = 7.0;
    const CMat h = eval_freq(d, w);
    const Complex lag = 1.0 / Complex(1.0, 0.1 * w);
    CHECK(std::abs(h(0, 0) - 0.003 * net.omega0 * lag) < 1e-10);
    CHECK(std::abs(h(3, 3) - (0.01 / 0.9) * Complex(0.0, w) * lag) < 1e-10);
    CHECK(std::abs(h(0, 1)) == 0.0);

    auto convs = cond_dyn();
    convs[2].tau_q = 0.0;
    CHECK_THROWS_AS(transformed_device_model(net, convs), IllPosed);
}

TEST_CASE("loop_shift with zero shift returns the pair unchanged") {
    const auto net = three_bus();
    const auto d = transformed_device_model(net, cond_dyn());
    const auto n = build_N_transformed(net);
    const auto [dp, np] = loop_shift(d, n, StateSpaceModel::zero(6, 6));
    for (double w : {0.3, 12.0, 500.0}) {
        CHECK((eval_freq(dp, w) - eval_freq(d, w)).norm() < 1e-10);
        CHECK((eval_freq(np, w) - eval_freq(n, w)).norm() < 1e-10);
    }
}

TEST_CASE("loop_shift scalar example preserves the closed loop") {
    const auto d = StateSpaceModel::gain(Mat::Ones(1, 1));
    const auto n = StateSpaceModel::integrator();
    const auto g = StateSpaceModel::integrator();
    const auto [dp, np] = loop_shift(d, n, g);
    for (double w : {0.1, 1.0, 10.0}) {
        const Complex s(0.0, w);
        const Complex orig = 1.0 / (1.0 + 1.0 / s);  // (I+DN)^{-1} D
        const CMat hd = eval_freq(dp, w), hn = eval_freq(np, w);
        const Complex shifted = hd(0, 0) / (1.0 + hd(0, 0) * hn(0, 0));
        CHECK(std::abs(orig - shifted) < 1e-12);
        CHECK(std::abs(orig - s / (s + 1.0)) < 1e-12);
    }
}

TEST_CASE("loop-shift identity holds for the assembled case-study pair") {
    const auto net = three_bus();
    const auto convs = cond_dyn();
    const auto d = transformed_device_model(net, convs);
    const auto n = build_N_transformed(net);
    const auto gb = build_gamma(net, convs);
    const auto [dp, np] = loop_shift(d, n, gb.model);

    const auto orig = interconnect_gang_of_four(d, n).sensitivity_h1;
    const auto shifted = interconnect_gang_of_four(dp, np).sensitivity_h1;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ud(std::log(1e-2), std::log(1e4));
    for (int t = 0; t < 20; ++t) {
        const double w = std::exp(ud(rng));
        const CMat a = eval_freq(orig, w);
        const CMat b = eval_freq(shifted, w);
        CHECK((a - b).norm() < 1e-8 * std::max(1.0, a.norm()));
    }
}

TEST_CASE("shifted network poles lie in {0} and the resonant pair") {
    const auto net = three_bus();
    const auto gb = build_gamma(net, cond_dyn());
    const auto np = add(build_N_transformed(net), gb.model);
    for (const auto& p : poles(np)) {
        const bool origin = std::abs(p) < 1e-6 * net.omega0;
        const bool resonant = std::abs(p.real() + net.rho * net.omega0) < 1e-6 * net.omega0 &&
                              std::abs(std::abs(p.imag()) - net.omega0) < 1e-6 * net.omega0;
        CHECK((origin || resonant));
    }
}

TEST_CASE("closed-form S agrees with the numeric shifted network") {
    const auto net = three_bus();
    const auto gb = build_gamma(net, cond_dyn());
    const auto np = add(build_N_transformed(net), gb.model);
    const auto grid = default_passivity_grid(np, net.omega0);
    double worst = 0.0;
    for (double w : grid.omegas) {
        const CMat resp = eval_freq(np, w);
        const CMat numeric = resp + resp.adjoint();
        const CMat closed = closed_form_S_Nprime(net, gb.spec, w);
        worst = std::max(worst, (numeric - closed).norm());
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("closed-form S: DC value reproduces the resonance-weight formula") {
    const auto net = three_bus();
    const auto gb = build_gamma(net, cond_dyn());
    const CMat s0 = closed_form_S_Nprime(net, gb.spec, 0.0);
    const double h0 = 4.0 * net.rho / (net.omega0 * std::pow(1.0 + net.rho * net.rho, 2.0));
    // off-diagonal (1,2) block upper-left: h(0)·v0_1·v0_2·b_12
    CHECK(std::abs(s0(0, 2) - Complex(h0 * 1.0 * 0.9 * 2.5, 0.0)) < 1e-14);
    // block off-diagonals vanish at DC (the jω/ω0 terms)
    CHECK(std::abs(s0(0, 1)) == 0.0);
    CHECK(std::abs(s0(0, 3)) == 0.0);
}

TEST_CASE("closed-form S is Gershgorin dominant at every grid frequency") {
    const auto net = three_bus();
    const auto gb = build_gamma(net, cond_dyn());
    const auto np = add(build_N_transformed(net), gb.model);
    const auto grid = default_passivity_grid(np, net.omega0);
    for (double w : grid.omegas)
        CHECK(gershgorin_dominant(closed_form_S_Nprime(net, gb.spec, w)));
}

TEST_CASE("residue: integrator gives one, defective pair throws") {
    CHECK(std::abs(residue_at_origin(StateSpaceModel::integrator())(0, 0) - Complex(1.0, 0.0)) <
          1e-12);
    // 1/s² has a defective origin eigenvalue.
    StateSpaceModel dbl;
    dbl.a = Mat::Zero(2, 2);
    dbl.a(0, 1) = 1.0;
    dbl.b = Mat::Zero(2, 1);
    dbl.b(1, 0) = 1.0;
    dbl.c = Mat::Zero(1, 2);
    dbl.c(0, 0) = 1.0;
    dbl.d = Mat::Zero(1, 1);
    CHECK_THROWS_AS(residue_at_origin(dbl), NotSimplePole);
    // No origin eigenvalue → zero residue.
    const auto lagm = StateSpaceModel{-Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1),
                                      Mat::Zero(1, 1), {}, {}};
    CHECK(residue_at_origin(lagm).norm() == 0.0);
}

TEST_CASE("shifted network origin residue matches the closed form and is dominant") {
    const auto net = three_bus();
    const auto gb = build_gamma(net, cond_dyn());
    const auto np = add(build_N_transformed(net), gb.model);
    const CMat r = residue_at_origin(np);
    const Mat expect = closed_form_residue_origin(net, gb.spec);
    CHECK((r - expect.cast<Complex>()).norm() < 1e-8 * expect.norm());
    CHECK(gershgorin_dominant(expect.cast<Complex>()));
}

TEST_CASE("shifted p-channel coefficients track the parametric conditions") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> rho_d(0.02, 0.3), tau_d(0.0, 60.0),
        alpha_d(0.001, 1.2);
    int violations_seen = 0;
    for (int t = 0; t < 200; ++t) {
        NetworkSpec net;
        net.n = 2;
        net.b = Mat::Zero(2, 2);
        net.b(0, 1) = net.b(1, 0) = 2.0;
        net.rho = rho_d(rng);
        net.omega0 = 100.0 * M_PI;
        net.v0 = Vec::Constant(2, 1.0);
        net.delta0 = Vec::Zero(2);
        const double alpha = alpha_d(rng);
        const double tau_t = tau_d(rng);
        auto conv = gfm(alpha / (net.vmax * net.vmax * 2.0), 0.01, tau_t / net.omega0, 0.1);
        const auto gb = build_gamma(net, {conv, conv});
        const auto [h, hurwitz] = dprime_p_coeffs(conv, gb.spec, net, 0);

        CouplingStrengths cs;
        cs.alpha_p = alpha;
        cs.tau_p_tilde = tau_t;
        const auto cond = check_active(cs, table1_coeffs(net.rho, net.vmax));
        CHECK(cond[0].pass == (h.a1 > 0.0));
        CHECK(cond[1].pass == (h.a0 > 0.0));
        CHECK(cond[2].pass == (h.a2 * h.a1 > h.a0 * h.a3));
        CHECK(hurwitz == (cond[0].pass && cond[1].pass && cond[2].pass));
        if (!hurwitz) ++violations_seen;
        CHECK(h.b2 == 1.0);
        CHECK(h.b1 == doctest::Approx(2.0 * net.rho * net.omega0).epsilon(1e-12));
        CHECK(h.b0 ==
              doctest::Approx(net.omega0 * net.omega0 * (1.0 + net.rho * net.rho)).epsilon(1e-12));
    }
    CHECK(violations_seen > 10);  // the draw covers both sides of the boundary
}

TEST_CASE("vanishing active droop recovers the open-loop denominator") {
    auto net = three_bus();
    auto conv = gfm(1e-12, 0.01, 0.1, 0.1);
    const auto gb = build_gamma(net, {conv, conv, conv});
    const auto [h, hurwitz] = dprime_p_coeffs(conv, gb.spec, net, 0);
    CHECK(hurwitz);
    const double w0 = net.omega0, opr = 1.0 + net.rho * net.rho;
    // (τ_p s + 1)(s² + 2ρω0 s + ω0²(1+ρ²)) coefficients
    CHECK(h.a0 == doctest::Approx(w0 * w0 * opr).epsilon(1e-6));
    CHECK(h.a1 == doctest::Approx(2.0 * net.rho * w0 + 0.1 * w0 * w0 * opr).epsilon(1e-6));
    CHECK(h.a2 == doctest::Approx(1.0 + 0.2 * net.rho * w0).epsilon(1e-12));
    CHECK(h.a3 == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("passivity_check basics: integrator and first-order lag") {
    const auto grid = FrequencyGrid::log_spaced(1e-3, 1e5, 100);
    const auto vi = passivity_check(StateSpaceModel::integrator(), grid, 1e-9, false);
    CHECK(vi.overall);
    REQUIRE(vi.residue_psd.size() == 1);
    CHECK(vi.residue_psd[0].second);
    const auto vis = passivity_check(StateSpaceModel::integrator(), grid, 1e-10, true);
    CHECK(!vis.overall);
    CHECK(!vis.pole_check);

    const auto lagm = StateSpaceModel{-Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1),
                                      Mat::Zero(1, 1), {}, {}};
    CHECK(passivity_check(lagm, grid, 1e-10, true).overall);
}

TEST_CASE("case-study shifted devices are strictly passive on and off the grid") {
    const auto net = three_bus();
    const auto convs = cond_dyn();
    const auto gb = build_gamma(net, convs);
    const auto grid = FrequencyGrid::log_spaced(1e-3, 1e5, 400);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ud(std::log(1e-3), std::log(1e5));
    for (int i = 0; i < net.n; ++i) {
        for (const auto& r : {dprime_p_rational(convs[static_cast<size_t>(i)], gb.spec, net, i),
                              dprime_q_rational(convs[static_cast<size_t>(i)], gb.spec, net, i)}) {
            const auto sr = realize_siso(r);
            const auto v = passivity_check(StateSpaceModel{sr.a, sr.b, sr.c, sr.d, {}, {}}, grid,
                                           1e-10, true);
            CHECK(v.overall);
            for (int t = 0; t < 10; ++t) {
                const double w = std::exp(ud(rng));
                CHECK(2.0 * r.eval(Complex(0.0, w)).real() > 1e-10);
            }
        }
    }
}

TEST_CASE("shifted q-channel is improper without voltage filtering") {
    const auto net = three_bus();
    auto conv = gfm(0.125, 0.125, 0.0, 0.0);
    const auto gb = build_gamma(net, {conv, conv, conv});
    CHECK(!dprime_q_rational(conv, gb.spec, net, 2).proper());
}

TEST_CASE("certificate trace passes end to end for the certified design") {
    const auto net = three_bus();
    const auto np = add(build_N_transformed(net), build_gamma(net, cond_dyn()).model);
    const auto trace =
        certificate_trace(net, cond_dyn(), default_passivity_grid(np, net.omega0));
    CHECK(trace.overall);
    REQUIRE(trace.steps.size() == 6);
    for (const auto& s : trace.steps) CHECK(s.pass);
    CHECK(trace.steps[5].deferred);
    // High-frequency gain condition leaves a real margin.
    CHECK(trace.steps[4].margin > 0.0);
    CHECK(trace.steps[4].margin < 1.0);
}

TEST_CASE("certificate trace pinpoints the uncertified design at device strictness") {
    const auto net = three_bus();
    std::vector<ConverterSpec> convs = {gfm(0.003, 0.01, 0.1, 0.1), gfm(0.003, 0.01, 0.1, 0.1),
                                        gfm(0.125, 0.125, 0.0, 0.0)};
    const auto np = add(build_N_transformed(net), build_gamma(net, convs).model);
    const auto trace = certificate_trace(net, convs, default_passivity_grid(np, net.omega0));
    CHECK(!trace.overall);
    CHECK(trace.steps[2].pass);   // shifted network stays passive
    CHECK(!trace.steps[3].pass);  // device strict passivity fails
    CHECK(trace.steps[3].detail.find("improper") != std::string::npos);
}
