#include "gfmcert/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace gfmcert {

StateSpaceModel StateSpaceModel::gain(const Mat& k) {
    StateSpaceModel m;
    m.a = Mat::Zero(0, 0);
    m.b = Mat::Zero(0, k.cols());
    m.c = Mat::Zero(k.rows(), 0);
    m.d = k;
    return m;
}

StateSpaceModel StateSpaceModel::integrator() {
    StateSpaceModel m;
    m.a = Mat::Zero(1, 1);
    m.b = Mat::Ones(1, 1);
    m.c = Mat::Ones(1, 1);
    m.d = Mat::Zero(1, 1);
    return m;
}

StateSpaceModel StateSpaceModel::zero(Eigen::Index n_y, Eigen::Index n_u) {
    return gain(Mat::Zero(n_y, n_u));
}

void StateSpaceModel::check_dims() const {
    const bool ok = a.rows() == a.cols() && b.rows() == a.rows() && c.cols() == a.rows() &&
                    d.rows() == c.rows() && d.cols() == b.cols();
    if (!ok) throw IllPosed("StateSpaceModel: inconsistent dimensions");
}

CMat eval_s(const StateSpaceModel& m, Complex s, double pole_tol) {
    if (m.n_states() == 0) return m.d.cast<Complex>();
    Eigen::EigenSolver<Mat> es(m.a, /*computeEigenvectors=*/false);
    for (Eigen::Index i = 0; i < m.n_states(); ++i) {
        if (std::abs(es.eigenvalues()(i) - s) < pole_tol)
            throw PoleOnGrid("eval_s: evaluation point coincides with a pole");
    }
    CMat res = (s * CMat::Identity(m.n_states(), m.n_states()) - m.a.cast<Complex>())
                   .lu()
                   .solve(m.b.cast<Complex>());
    return m.c.cast<Complex>() * res + m.d.cast<Complex>();
}

CMat eval_freq(const StateSpaceModel& m, double omega, double pole_tol) {
    return eval_s(m, Complex(0.0, omega), pole_tol);
}

StateSpaceModel series(const StateSpaceModel& g, const StateSpaceModel& h) {
    if (g.n_inputs() != h.n_outputs()) throw IllPosed("series: dimension mismatch");
    const Eigen::Index ng = g.n_states(), nh = h.n_states();
    StateSpaceModel m;
    m.a = Mat::Zero(ng + nh, ng + nh);
    m.a.topLeftCorner(ng, ng) = g.a;
    m.a.topRightCorner(ng, nh) = g.b * h.c;
    m.a.bottomRightCorner(nh, nh) = h.a;
    m.b = Mat::Zero(ng + nh, h.n_inputs());
    m.b.topRows(ng) = g.b * h.d;
    m.b.bottomRows(nh) = h.b;
    m.c = Mat::Zero(g.n_outputs(), ng + nh);
    m.c.leftCols(ng) = g.c;
    m.c.rightCols(nh) = g.d * h.c;
    m.d = g.d * h.d;
    return m;
}

StateSpaceModel add(const StateSpaceModel& g, const StateSpaceModel& h) {
    if (g.n_inputs() != h.n_inputs() || g.n_outputs() != h.n_outputs())
        throw IllPosed("add: dimension mismatch");
    const Eigen::Index ng = g.n_states(), nh = h.n_states();
    StateSpaceModel m;
    m.a = Mat::Zero(ng + nh, ng + nh);
    m.a.topLeftCorner(ng, ng) = g.a;
    m.a.bottomRightCorner(nh, nh) = h.a;
    m.b = Mat::Zero(ng + nh, g.n_inputs());
    m.b.topRows(ng) = g.b;
    m.b.bottomRows(nh) = h.b;
    m.c = Mat::Zero(g.n_outputs(), ng + nh);
    m.c.leftCols(ng) = g.c;
    m.c.rightCols(nh) = h.c;
    m.d = g.d + h.d;
    return m;
}

StateSpaceModel premultiply_gain(const StateSpaceModel& m, const Mat& k) {
    if (k.rows() != m.n_inputs()) throw IllPosed("premultiply_gain: dimension mismatch");
    StateSpaceModel r = m;
    r.b = m.b * k;
    r.d = m.d * k;
    r.input_labels.clear();
    return r;
}

StateSpaceModel postmultiply_gain(const Mat& k, const StateSpaceModel& m) {
    if (k.cols() != m.n_outputs()) throw IllPosed("postmultiply_gain: dimension mismatch");
    StateSpaceModel r = m;
    r.c = k * m.c;
    r.d = k * m.d;
    r.output_labels.clear();
    return r;
}

StateSpaceModel blockdiag(const std::vector<StateSpaceModel>& blocks) {
    Eigen::Index nx = 0, nu = 0, ny = 0;
    for (const auto& blk : blocks) {
        nx += blk.n_states();
        nu += blk.n_inputs();
        ny += blk.n_outputs();
    }
    StateSpaceModel m;
    m.a = Mat::Zero(nx, nx);
    m.b = Mat::Zero(nx, nu);
    m.c = Mat::Zero(ny, nx);
    m.d = Mat::Zero(ny, nu);
    Eigen::Index ox = 0, ou = 0, oy = 0;
    for (const auto& blk : blocks) {
        m.a.block(ox, ox, blk.n_states(), blk.n_states()) = blk.a;
        m.b.block(ox, ou, blk.n_states(), blk.n_inputs()) = blk.b;
        m.c.block(oy, ox, blk.n_outputs(), blk.n_states()) = blk.c;
        m.d.block(oy, ou, blk.n_outputs(), blk.n_inputs()) = blk.d;
        ox += blk.n_states();
        ou += blk.n_inputs();
        oy += blk.n_outputs();
    }
    return m;
}

StateSpaceModel postmultiply_channel_dynamics(const StateSpaceModel& m,
                                              const std::vector<bool>& integrate,
                                              const std::vector<double>& gains) {
    const Eigen::Index nu = m.n_inputs();
    if (static_cast<Eigen::Index>(integrate.size()) != nu ||
        static_cast<Eigen::Index>(gains.size()) != nu)
        throw IllPosed("postmultiply_channel_dynamics: channel count mismatch");

    Eigen::Index nz = 0;
    for (bool f : integrate) nz += f ? 1 : 0;
    const Eigen::Index nx = m.n_states();

    // Selector matrices: u_m = S_z z + S_g w ; ż = S_u w.
    Mat s_z = Mat::Zero(nu, nz), s_g = Mat::Zero(nu, nu), s_u = Mat::Zero(nz, nu);
    Eigen::Index zi = 0;
    for (Eigen::Index k = 0; k < nu; ++k) {
        if (integrate[static_cast<size_t>(k)]) {
            s_z(k, zi) = 1.0;
            s_u(zi, k) = 1.0;
            ++zi;
        } else {
            s_g(k, k) = gains[static_cast<size_t>(k)];
        }
    }

    StateSpaceModel r;
    r.a = Mat::Zero(nx + nz, nx + nz);
    r.a.topLeftCorner(nx, nx) = m.a;
    r.a.topRightCorner(nx, nz) = m.b * s_z;
    r.b = Mat::Zero(nx + nz, nu);
    r.b.topRows(nx) = m.b * s_g;
    r.b.bottomRows(nz) = s_u;
    r.c = Mat::Zero(m.n_outputs(), nx + nz);
    r.c.leftCols(nx) = m.c;
    r.c.rightCols(nz) = m.d * s_z;
    r.d = m.d * s_g;
    return r;
}

GangOfFour interconnect_gang_of_four(const StateSpaceModel& h1, const StateSpaceModel& h2) {
    h1.check_dims();
    h2.check_dims();
    const Eigen::Index n = h1.n_outputs();
    if (h1.n_inputs() != n || h2.n_inputs() != n || h2.n_outputs() != n)
        throw IllPosed("interconnect_gang_of_four: both systems must be square n×n");

    const Mat loop = Mat::Identity(n, n) + h1.d * h2.d;
    Eigen::FullPivLU<Mat> lu(loop);
    if (!lu.isInvertible()) throw IllPosed("interconnect_gang_of_four: I + D1*D2 singular");

    const Eigen::Index n1 = h1.n_states(), n2 = h2.n_states();

    // y1 = F1x [x1;x2] + F1w [w1;w2], y2 = F2x [..] + F2w [..]
    Mat f1x(n, n1 + n2), f1w(n, 2 * n);
    f1x.leftCols(n1) = lu.solve(h1.c);
    f1x.rightCols(n2) = lu.solve(-h1.d * h2.c);
    f1w.leftCols(n) = lu.solve(h1.d);
    f1w.rightCols(n) = lu.solve(-h1.d * h2.d);

    Mat f2x(n, n1 + n2), f2w(n, 2 * n);
    f2x.leftCols(n1) = h2.d * f1x.leftCols(n1);
    f2x.rightCols(n2) = h2.c + h2.d * f1x.rightCols(n2);
    f2w.leftCols(n) = h2.d * f1w.leftCols(n);
    f2w.rightCols(n) = h2.d * (Mat::Identity(n, n) + f1w.rightCols(n));

    // u1 = w1 − y2, u2 = y1 + w2
    Mat u1x = -f2x, u2x = f1x;
    Mat u1w = -f2w, u2w = f1w;
    u1w.leftCols(n) += Mat::Identity(n, n);
    u2w.rightCols(n) += Mat::Identity(n, n);

    Mat a = Mat::Zero(n1 + n2, n1 + n2);
    a.topLeftCorner(n1, n1) = h1.a;
    a.bottomRightCorner(n2, n2) = h2.a;
    a.topRows(n1) += h1.b * u1x;
    a.bottomRows(n2) += h2.b * u2x;

    Mat bfull = Mat::Zero(n1 + n2, 2 * n);
    bfull.topRows(n1) = h1.b * u1w;
    bfull.bottomRows(n2) = h2.b * u2w;

    auto make = [&](const Mat& cx, const Mat& dw, Eigen::Index wcol) {
        StateSpaceModel m;
        m.a = a;
        m.b = bfull.middleCols(wcol, n);
        m.c = cx;
        m.d = dw.middleCols(wcol, n);
        return m;
    };

    GangOfFour g;
    g.sensitivity_h1 = make(f1x, f1w, 0);
    g.h1h2_complement = make(f1x, f1w, n);
    g.h2_sensitivity_h1 = make(f2x, f2w, 0);
    g.h2_sensitivity = make(f2x, f2w, n);
    return g;
}

std::vector<Complex> poles(const StateSpaceModel& m) {
    std::vector<Complex> out;
    if (m.n_states() == 0) return out;
    Eigen::EigenSolver<Mat> es(m.a, /*computeEigenvectors=*/false);
    out.resize(static_cast<size_t>(m.n_states()));
    for (Eigen::Index i = 0; i < m.n_states(); ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
    std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return out;
}

namespace {

double pbh_sigma_min(const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

std::vector<ModeClassification> classify_modes(const StateSpaceModel& m, double zero_tol) {
    std::vector<ModeClassification> out;
    const Eigen::Index nx = m.n_states();
    if (nx == 0) return out;

    const double scale =
        std::max({m.a.norm(), m.b.norm(), m.c.norm(), 1e-300});
    const double pbh_tol = 1e-8 * scale;

    const auto evs = poles(m);
    for (const Complex& lam : evs) {
        ModeClassification mc;
        mc.eigenvalue = lam;

        CMat ctrb(nx, nx + m.n_inputs());
        ctrb.leftCols(nx) = lam * CMat::Identity(nx, nx) - m.a.cast<Complex>();
        ctrb.rightCols(m.n_inputs()) = m.b.cast<Complex>();
        mc.controllable = pbh_sigma_min(ctrb) > pbh_tol;

        CMat obsv(nx + m.n_outputs(), nx);
        obsv.topRows(nx) = lam * CMat::Identity(nx, nx) - m.a.cast<Complex>();
        obsv.bottomRows(m.n_outputs()) = m.c.cast<Complex>();
        mc.observable = pbh_sigma_min(obsv) > pbh_tol;

        mc.structural = std::abs(lam) < zero_tol && !(mc.controllable && mc.observable);
        out.push_back(mc);
    }
    return out;
}

StabilityVerdict stability_verdict(const StateSpaceModel& m, double zero_tol, double margin_tol) {
    StabilityVerdict v;
    v.modes = classify_modes(m, zero_tol);
    v.margin = std::numeric_limits<double>::infinity();
    v.stable = true;
    for (const auto& mc : v.modes) {
        if (mc.structural) {
            ++v.n_structural;
            continue;
        }
        const bool minimal = mc.controllable && mc.observable;
        if (!minimal) continue;
        v.margin = std::min(v.margin, -mc.eigenvalue.real());
        if (mc.eigenvalue.real() >= -margin_tol) v.stable = false;
        if (std::abs(mc.eigenvalue.real()) <= margin_tol) v.inconclusive = true;
    }
    return v;
}

}  // namespace gfmcert
