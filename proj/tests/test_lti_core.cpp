#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gfmcert/analysis.hpp"
#include "gfmcert/rational.hpp"
#include "gfmcert/state_space.hpp"

using namespace gfmcert;

namespace {

StateSpaceModel random_stable_model(std::mt19937& rng, int nx, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    StateSpaceModel m;
    m.a = Mat::NullaryExpr(nx, nx, [&] { return u(rng); });
    // Shift spectrum well into the left half plane.
    m.a -= (m.a.eigenvalues().real().maxCoeff() + 1.0) * Mat::Identity(nx, nx);
    m.b = Mat::NullaryExpr(nx, n, [&] { return u(rng); });
    m.c = Mat::NullaryExpr(n, nx, [&] { return u(rng); });
    m.d = Mat::NullaryExpr(n, n, [&] { return 0.1 * u(rng); });
    return m;
}

}  // namespace

TEST_CASE("eval_freq: integrator at omega=1 is -j") {
    const auto m = StateSpaceModel::integrator();
    const CMat h = eval_freq(m, 1.0);
    CHECK(std::abs(h(0, 0) - Complex(0.0, -1.0)) < 1e-14);
}

TEST_CASE("eval_freq: pure gain is constant in frequency") {
    Mat k(2, 2);
    k << 1.0, 2.0, 3.0, 4.0;
    const auto m = StateSpaceModel::gain(k);
    for (double w : {0.0, 1.0, 100.0, 1e5}) {
        const CMat h = eval_freq(m, w);
        CHECK((h - k.cast<Complex>()).norm() < 1e-15);
    }
}

TEST_CASE("eval_freq: first-order lag DC gain") {
    // gain 0.003, time constant 0.1 s: H(s) = 0.003/(0.1 s + 1)
    const auto r = realize_siso(Rational{Polynomial({0.003}), Polynomial({1.0, 0.1})});
    StateSpaceModel m{r.a, r.b, r.c, r.d, {}, {}};
    CHECK(std::abs(eval_freq(m, 0.0)(0, 0) - Complex(0.003, 0.0)) < 1e-15);
    // at omega = 1/tau the response is g/(1+j)
    const Complex h = eval_freq(m, 10.0)(0, 0);
    CHECK(std::abs(h - 0.003 / Complex(1.0, 1.0)) < 1e-15);
}

TEST_CASE("eval_freq throws PoleOnGrid at a pole") {
    const auto m = StateSpaceModel::integrator();
    CHECK_THROWS_AS(eval_freq(m, 0.0), PoleOnGrid);
}

TEST_CASE("gang of four: scalar static loop") {
    const auto g = interconnect_gang_of_four(StateSpaceModel::gain(Mat::Ones(1, 1)),
                                             StateSpaceModel::gain(Mat::Ones(1, 1)));
    CHECK(std::abs(eval_freq(g.sensitivity_h1, 3.0)(0, 0) - Complex(0.5, 0.0)) < 1e-14);
}

TEST_CASE("gang of four: integrator with gain feedback has pole at -k") {
    const double k = 2.5;
    const auto g = interconnect_gang_of_four(StateSpaceModel::integrator(),
                                             StateSpaceModel::gain(k * Mat::Ones(1, 1)));
    const auto p = poles(g.sensitivity_h1);
    REQUIRE(p.size() == 1);
    CHECK(std::abs(p[0] - Complex(-k, 0.0)) < 1e-12);
    // upper-left is 1/(s+k)
    const Complex h = eval_freq(g.sensitivity_h1, 1.0)(0, 0);
    CHECK(std::abs(h - 1.0 / Complex(k, 1.0)) < 1e-12);
}

TEST_CASE("gang of four: h2 = 0 gives open loop") {
    std::mt19937 rng(7);
    const auto h1 = random_stable_model(rng, 3, 2);
    const auto g = interconnect_gang_of_four(h1, StateSpaceModel::zero(2, 2));
    for (double w : {0.1, 1.0, 10.0}) {
        CHECK((eval_freq(g.sensitivity_h1, w) - eval_freq(h1, w)).norm() < 1e-12);
        CHECK(eval_freq(g.h2_sensitivity, w).norm() < 1e-15);
    }
}

TEST_CASE("gang of four matches transfer-matrix formulas at random frequencies") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const auto h1 = random_stable_model(rng, 4, 2);
        const auto h2 = random_stable_model(rng, 3, 2);
        const auto g = interconnect_gang_of_four(h1, h2);
        for (double w : {0.3, 2.0, 17.0}) {
            const CMat g1 = eval_freq(h1, w);
            const CMat g2 = eval_freq(h2, w);
            const CMat inv = (CMat::Identity(2, 2) + g1 * g2).inverse();
            CHECK((eval_freq(g.sensitivity_h1, w) - inv * g1).norm() < 1e-9);
            CHECK((eval_freq(g.h1h2_complement, w) + inv * g1 * g2).norm() < 1e-9);
            CHECK((eval_freq(g.h2_sensitivity_h1, w) - g2 * inv * g1).norm() < 1e-9);
            CHECK((eval_freq(g.h2_sensitivity, w) - g2 * inv).norm() < 1e-9);
        }
    }
}

TEST_CASE("gang of four shares one state matrix: identical pole sets") {
    std::mt19937 rng(3);
    const auto h1 = random_stable_model(rng, 4, 2);
    const auto h2 = random_stable_model(rng, 2, 2);
    const auto g = interconnect_gang_of_four(h1, h2);
    const auto p0 = poles(g.sensitivity_h1);
    for (const auto* m : {&g.h1h2_complement, &g.h2_sensitivity_h1, &g.h2_sensitivity}) {
        const auto p = poles(*m);
        REQUIRE(p.size() == p0.size());
        for (size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - p0[i]) < 1e-8);
    }
}

TEST_CASE("gang of four throws IllPosed when I + D1 D2 is singular") {
    const auto h1 = StateSpaceModel::gain(-Mat::Ones(1, 1));
    const auto h2 = StateSpaceModel::gain(Mat::Ones(1, 1));
    CHECK_THROWS_AS(interconnect_gang_of_four(h1, h2), IllPosed);
}

TEST_CASE("poles: diagonal state map") {
    StateSpaceModel m;
    m.a = Mat::Zero(2, 2);
    m.a(0, 0) = -1.0;
    m.a(1, 1) = -2.0;
    m.b = Mat::Ones(2, 1);
    m.c = Mat::Ones(1, 2);
    m.d = Mat::Zero(1, 1);
    const auto p = poles(m);
    REQUIRE(p.size() == 2);
    CHECK(std::abs(p[0] - Complex(-1.0, 0.0)) < 1e-14);
    CHECK(std::abs(p[1] - Complex(-2.0, 0.0)) < 1e-14);
}

TEST_CASE("stability_verdict: scalar minimal systems") {
    StateSpaceModel m;
    m.a = -Mat::Ones(1, 1);
    m.b = Mat::Ones(1, 1);
    m.c = Mat::Ones(1, 1);
    m.d = Mat::Zero(1, 1);
    CHECK(stability_verdict(m, 1e-9, 1e-7).stable);
    m.a(0, 0) = 0.1;
    CHECK_FALSE(stability_verdict(m, 1e-9, 1e-7).stable);
}

TEST_CASE("stability_verdict: unobservable origin mode is structural") {
    // x1 stable and observed, x2 an integrator decoupled from the output.
    StateSpaceModel m;
    m.a = Mat::Zero(2, 2);
    m.a(0, 0) = -1.0;
    m.b = Mat::Ones(2, 1);
    m.c = Mat::Zero(1, 2);
    m.c(0, 0) = 1.0;
    m.d = Mat::Zero(1, 1);
    const auto v = stability_verdict(m, 1e-9, 1e-7);
    CHECK(v.stable);
    CHECK(v.n_structural == 1);
}

TEST_CASE("series composition frequency response is the product") {
    std::mt19937 rng(11);
    const auto g = random_stable_model(rng, 3, 2);
    const auto h = random_stable_model(rng, 4, 2);
    const auto s = series(g, h);
    for (double w : {0.0, 0.5, 5.0, 50.0}) {
        const CMat lhs = eval_freq(s, w);
        const CMat rhs = eval_freq(g, w) * eval_freq(h, w);
        CHECK((lhs - rhs).norm() / std::max(rhs.norm(), 1e-300) < 1e-10);
    }
}

TEST_CASE("add composition frequency response is the sum") {
    std::mt19937 rng(13);
    const auto g = random_stable_model(rng, 2, 2);
    const auto h = random_stable_model(rng, 3, 2);
    const auto s = add(g, h);
    for (double w : {0.0, 1.0, 30.0})
        CHECK((eval_freq(s, w) - eval_freq(g, w) - eval_freq(h, w)).norm() < 1e-11);
}

TEST_CASE("postmultiply_channel_dynamics: integrator and gain channels") {
    Mat k(1, 2);
    k << 2.0, 3.0;
    const auto m = StateSpaceModel::gain(k);
    const auto r = postmultiply_channel_dynamics(m, {true, false}, {0.0, 0.5});
    // H(s) = [2/s, 1.5]
    const CMat h = eval_freq(r, 2.0);
    CHECK(std::abs(h(0, 0) - Complex(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(h(0, 1) - Complex(1.5, 0.0)) < 1e-14);
    CHECK(r.n_states() == 1);
}

TEST_CASE("rational: roots of quadratic and realization round trip") {
    // (s+1)(s+3) = s^2 + 4 s + 3
    Polynomial p({3.0, 4.0, 1.0});
    auto rts = p.roots();
    std::sort(rts.begin(), rts.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    CHECK(std::abs(rts[0] - Complex(-3.0, 0.0)) < 1e-12);
    CHECK(std::abs(rts[1] - Complex(-1.0, 0.0)) < 1e-12);

    const Rational r{Polynomial({1.0, 2.0}), Polynomial({3.0, 4.0, 1.0})};
    const auto ss = realize_siso(r);
    StateSpaceModel m{ss.a, ss.b, ss.c, ss.d, {}, {}};
    for (double w : {0.0, 1.0, 10.0}) {
        const Complex direct = r.eval(Complex(0.0, w));
        CHECK(std::abs(eval_freq(m, w)(0, 0) - direct) < 1e-12);
    }
}

TEST_CASE("rational: biproper realization carries feedthrough") {
    // (2s+1)/(s+1): d = 2
    const auto ss = realize_siso(Rational{Polynomial({1.0, 2.0}), Polynomial({1.0, 1.0})});
    CHECK(ss.d(0, 0) == doctest::Approx(2.0));
    StateSpaceModel m{ss.a, ss.b, ss.c, ss.d, {}, {}};
    CHECK(std::abs(eval_freq(m, 1e6)(0, 0) - Complex(2.0, 0.0)) < 1e-4);
}

TEST_CASE("rational: improper realization throws") {
    CHECK_THROWS_AS(realize_siso(Rational{Polynomial({0.0, 0.0, 1.0}), Polynomial({1.0, 1.0})}),
                    IllPosed);
}
