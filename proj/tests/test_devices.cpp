#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gfmcert/devices.hpp"

using namespace gfmcert;

namespace {

DetailedVscSpec detailed_fixture(double pi_scale = 1.0) {
    DetailedVscSpec d;
    d.conv.d_p = 0.003;
    d.conv.d_q = 0.01;
    d.conv.tau_p = 0.1;
    d.conv.tau_q = 0.1;
    d.l_f = 0.1;
    d.c_f = 0.1;
    d.r_f = 0.01;
    d.pi_cc = {1.0 * pi_scale, 10.0 * pi_scale};
    d.pi_vc = {1.0 * pi_scale, 10.0 * pi_scale};
    d.v_d0 = 1.0;
    d.i_d0 = 0.9;
    d.i_q0 = -0.2;
    return d;
}

/// Direct evaluation of the printed closed-form VSC entries (test oracle).
CMat vsc_closed_form(const DetailedVscSpec& d, double omega) {
    const Complex s(0.0, omega);
    const double w0 = d.omega0;
    auto pi = [&](const PiGains& g) { return g.k_p + g.k_i / s; };
    const Complex picc = pi(d.pi_cc), pivc = pi(d.pi_vc);
    const Complex gcc = picc / (s * d.l_f / w0 + picc);
    const Complex den1 = (gcc - 1.0) * (d.i_d0 + d.i_q0 - d.v_d0 * d.c_f) +
                         d.v_d0 * gcc * pivc + d.c_f * s / w0;
    const Complex den2 =
        (1.0 - gcc) * d.i_d0 + d.v_d0 * gcc * pivc + d.c_f * s / w0;
    CMat out = CMat::Zero(2, 2);
    out(0, 0) = d.conv.d_p / (d.conv.tau_p * s + 1.0);
    out(1, 0) = (1.0 - gcc) / den1;
    out(1, 1) = d.v_d0 * gcc * pivc * (d.conv.d_q / (d.conv.tau_q * s + 1.0)) / den1 -
                (1.0 - gcc) * (1.0 - gcc) * (d.i_q0 + d.v_d0 * d.c_f) / den2;
    return out;
}

}  // namespace

TEST_CASE("rebase_gains scales droop gains by the base ratio") {
    ConverterSpec c;
    c.d_p = 0.006;
    c.d_q = 0.25;
    c.tau_p = 0.1;
    c.tau_q = 0.0;
    c.s_local = 200.0;
    c.s_global = 100.0;
    const auto r = rebase_gains(c);
    CHECK(r.d_p == doctest::Approx(0.003));
    CHECK(r.d_q == doctest::Approx(0.125));
    CHECK(r.tau_p == c.tau_p);
    // idempotent once bases are equal
    const auto r2 = rebase_gains(r);
    CHECK(r2.d_p == doctest::Approx(r.d_p));
    CHECK(r2.d_q == doctest::Approx(r.d_q));
}

TEST_CASE("droop_model: DC gain, pole locations, mid-band response") {
    ConverterSpec c;
    c.d_p = 0.003;
    c.d_q = 0.01;
    c.tau_p = 0.1;
    c.tau_q = 0.2;
    const auto m = droop_model(c);
    const CMat h0 = eval_freq(m, 0.0);
    CHECK(std::abs(h0(0, 0) - Complex(0.003, 0)) < 1e-15);
    CHECK(std::abs(h0(1, 1) - Complex(0.01, 0)) < 1e-15);
    CHECK(std::abs(h0(0, 1)) == 0.0);

    auto p = poles(m);
    REQUIRE(p.size() == 2);
    std::sort(p.begin(), p.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    CHECK(std::abs(p[0] - Complex(-10.0, 0)) < 1e-10);
    CHECK(std::abs(p[1] - Complex(-5.0, 0)) < 1e-10);

    const CMat h = eval_freq(m, 10.0);  // ω = 1/τ_p
    CHECK(std::abs(h(0, 0) - 0.003 / Complex(1, 1)) < 1e-14);
}

TEST_CASE("droop_model: tau=0 channels are static") {
    ConverterSpec c;
    c.d_p = 0.125;
    c.d_q = 0.125;
    const auto m = droop_model(c);
    CHECK(m.n_states() == 0);
}

TEST_CASE("droop_model is strictly passive for positive gains and taus") {
    ConverterSpec c;
    c.d_p = 0.1;
    c.d_q = 0.05;
    c.tau_p = 0.1;
    c.tau_q = 0.02;
    const auto m = droop_model(c);
    const auto grid = FrequencyGrid::log_spaced(1e-3, 1e5, 200);
    for (double w : grid.omegas) {
        const CMat h = eval_freq(m, w);
        const CMat herm = h + h.adjoint();
        Eigen::SelfAdjointEigenSolver<CMat> es(herm, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()(0) > 0.0);
    }
}

TEST_CASE("build_D: block-diagonal assembly") {
    ConverterSpec a;
    a.d_p = 0.003;
    a.d_q = 0.01;
    a.tau_p = 0.1;
    a.tau_q = 0.1;
    ConverterSpec b = a;
    b.d_p = 0.005;
    ConverterSpec c = a;
    c.tau_q = 0.2;
    const auto m = build_D({a, b, c});
    CHECK(m.n_states() == 6);
    CHECK(m.n_inputs() == 6);

    // single converter reduces to droop_model
    const auto single = build_D({a});
    for (double w : {0.0, 3.0, 40.0})
        CHECK((eval_freq(single, w) - eval_freq(droop_model(a), w)).norm() < 1e-14);

    // cross-converter entries exactly zero
    for (double w : {0.0, 7.0, 120.0}) {
        const CMat h = eval_freq(m, w);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) CHECK(h.block(2 * i, 2 * j, 2, 2).norm() == 0.0);
    }
}

TEST_CASE("full_vsc_model matches the closed-form entries") {
    const auto d = detailed_fixture();
    const auto m = full_vsc_model(d);
    for (double w : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
        const CMat expect = vsc_closed_form(d, w);
        const CMat got = eval_freq(m, w);
        CHECK((got - expect).norm() / expect.norm() < 1e-9);
        CHECK(std::abs(got(0, 1)) < 1e-12);  // D_12 ≡ 0
    }
}

TEST_CASE("full_vsc_model D_11 equals the droop (1,1) entry") {
    const auto d = detailed_fixture();
    const auto m = full_vsc_model(d);
    const auto dr = droop_model(d.conv);
    for (double w : {0.0, 5.0, 60.0})
        CHECK(std::abs(eval_freq(m, w)(0, 0) - eval_freq(dr, w)(0, 0)) < 1e-12);
}

TEST_CASE("full_vsc_model has no poles at the origin") {
    const auto m = full_vsc_model(detailed_fixture());
    for (const auto& p : poles(m)) CHECK(std::abs(p) > 1e-6);
}

TEST_CASE("high-gain inner loops reduce to the droop model") {
    FrequencyGrid grid = FrequencyGrid::log_spaced(1e-3, 10.0, 80);
    const double dev = reduction_consistency(detailed_fixture(1e6), grid);
    CHECK(dev < 1e-3);
}

TEST_CASE("reduction deviation decreases monotonically with PI gain scale") {
    FrequencyGrid grid = FrequencyGrid::log_spaced(1e-3, 10.0, 40);
    const double d2 = reduction_consistency(detailed_fixture(1e2), grid);
    const double d4 = reduction_consistency(detailed_fixture(1e4), grid);
    const double d6 = reduction_consistency(detailed_fixture(1e6), grid);
    CHECK(d4 < d2);
    CHECK(d6 < d4);
}

TEST_CASE("full_vsc_model rejects a degenerate operating point") {
    auto d = detailed_fixture();
    d.v_d0 = 0.0;
    CHECK_THROWS_AS(full_vsc_model(d), DegenerateOperatingPoint);
}
