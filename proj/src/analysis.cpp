#include "gfmcert/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace gfmcert {

double min_hermitian_eig(const CMat& m) {
    const CMat h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

bool is_hermitian_psd(const CMat& m, double tol) {
    const double nrm = m.norm();
    if ((m - m.adjoint()).norm() > tol * std::max(nrm, 1e-300)) return false;
    return min_hermitian_eig(m) >= -tol;
}

bool gershgorin_dominant(const CMat& m) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n) return false;
    const double nrm = m.norm();
    if ((m - m.adjoint()).norm() > 1e-10 * std::max(nrm, 1e-300)) return false;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex dii = m(i, i);
        if (std::abs(dii.imag()) > 1e-10 * std::max(nrm, 1e-300)) return false;
        if (dii.real() < -1e-12 * std::max(nrm, 1.0)) return false;
        double off = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) off += std::abs(m(i, j));
        // Slack absorbs rows where dominance holds with exact equality in
        // exact arithmetic but not in floating point.
        const double slack = 1e-12 * std::max({std::abs(dii), off, 1.0});
        if (std::abs(dii) + slack < off) return false;
    }
    return true;
}

std::vector<Complex> numerical_range_boundary(const CMat& a, int n_angles) {
    std::vector<Complex> pts;
    pts.reserve(static_cast<size_t>(n_angles));
    for (int k = 0; k < n_angles; ++k) {
        const double theta = 2.0 * M_PI * k / n_angles;
        const Complex rot = std::exp(Complex(0.0, -theta));
        const CMat h = 0.5 * (rot * a + std::conj(rot) * a.adjoint());
        Eigen::SelfAdjointEigenSolver<CMat> es(h);
        const Eigen::Index top = h.rows() - 1;
        const CVec x = es.eigenvectors().col(top);
        pts.push_back((x.adjoint() * a * x)(0, 0));
    }
    return pts;
}

PhaseInterval matrix_phases(const CMat& a, int n_angles) {
    PhaseInterval out;
    const double nrm = a.norm();
    const double tol = 1e-10 * std::max(nrm, 1e-300);
    const auto pts = numerical_range_boundary(a, n_angles);

    std::vector<double> angles;
    angles.reserve(pts.size());
    for (const Complex& p : pts) {
        if (std::abs(p) < tol) {
            out.near_origin = true;
            continue;
        }
        angles.push_back(std::arg(p));
    }
    if (angles.empty()) {
        // W(A) collapses to (numerically) zero: degenerate but sectorial with
        // phases pinned to 0.
        out.sectorial = true;
        return out;
    }
    std::sort(angles.begin(), angles.end());

    // 0 is outside the convex hull of the boundary points iff the points fit
    // in an open half-plane through the origin, i.e. the largest circular gap
    // between their arguments exceeds π.
    double gap_max = 2.0 * M_PI - (angles.back() - angles.front());
    double gap_start = angles.back();  // gap wraps from back to front
    for (size_t i = 1; i < angles.size(); ++i) {
        const double g = angles[i] - angles[i - 1];
        if (g > gap_max) {
            gap_max = g;
            gap_start = angles[i - 1];
        }
    }
    out.sectorial = gap_max > M_PI + 1e-12;
    if (!out.sectorial) return out;

    // Re-branch so the gap does not split the arc: measure angles relative to
    // the gap midpoint's antipode.
    const double gap_mid = gap_start + gap_max / 2.0;
    const double center = gap_mid + M_PI;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double ang : angles) {
        double rel = std::remainder(ang - center, 2.0 * M_PI);
        lo = std::min(lo, rel);
        hi = std::max(hi, rel);
    }
    out.phi_min = std::remainder(center + lo, 2.0 * M_PI);
    out.phi_max = out.phi_min + (hi - lo);
    // Keep the interval in a natural branch when it straddles ±π artifacts.
    if (out.phi_max > M_PI && out.phi_min > 0) {
        out.phi_max -= 2.0 * M_PI;
        out.phi_min -= 2.0 * M_PI;
        std::swap(out.phi_max, out.phi_min);
        out.phi_max += (hi - lo) - (out.phi_max - out.phi_min);
    }
    return out;
}

GainPhaseReport mixed_gain_phase_check(const StateSpaceModel& h1, const StateSpaceModel& h2,
                                       const FrequencyGrid& grid, double omega_c,
                                       double pole_exclusion) {
    GainPhaseReport rep;
    rep.worst_phase_margin = std::numeric_limits<double>::infinity();
    rep.worst_gain_margin = std::numeric_limits<double>::infinity();
    rep.all_pass = true;

    // Imaginary-axis poles of h2 to exclude from the sweep.
    std::vector<double> excluded;
    for (const Complex& p : poles(h2))
        if (std::abs(p.real()) < pole_exclusion) excluded.push_back(std::abs(p.imag()));

    const bool omega_c_inf = std::isinf(omega_c);
    const double omega_top = grid.omegas.empty() ? 0.0 : grid.omegas.back();

    for (double omega : grid.omegas) {
        bool skip = false;
        for (double wp : excluded)
            if (std::abs(omega - wp) < pole_exclusion) skip = true;
        if (skip) continue;

        GainPhasePoint pt;
        pt.omega = omega;
        // omega_c = ∞: phase condition everywhere, gain condition only at the
        // top grid point (appended below).
        pt.phase_test = omega_c_inf ? true : (omega < omega_c);

        const CMat g1 = eval_freq(h1, omega, pole_exclusion);
        const CMat g2 = eval_freq(h2, omega, pole_exclusion);

        if (pt.phase_test) {
            const PhaseInterval p1 = matrix_phases(g1);
            const PhaseInterval p2 = matrix_phases(g2);
            if (!p1.sectorial || !p2.sectorial) {
                pt.applicable = false;
                rep.points.push_back(pt);
                continue;
            }
            const double upper = M_PI - (p1.phi_max + p2.phi_max);
            const double lower = (p1.phi_min + p2.phi_min) + M_PI;
            pt.margin = std::min(upper, lower);
            pt.pass = pt.margin > 0.0;
            rep.worst_phase_margin = std::min(rep.worst_phase_margin, pt.margin);
        } else {
            const double prod = g1.operatorNorm() * g2.operatorNorm();
            pt.margin = 1.0 - prod;
            pt.pass = pt.margin > 0.0;
            rep.worst_gain_margin = std::min(rep.worst_gain_margin, pt.margin);
        }
        if (pt.applicable && !pt.pass) rep.all_pass = false;
        rep.points.push_back(pt);

        if (omega_c_inf && omega == omega_top) {
            GainPhasePoint gp;
            gp.omega = omega;
            gp.phase_test = false;
            const double prod = g1.operatorNorm() * g2.operatorNorm();
            gp.margin = 1.0 - prod;
            gp.pass = gp.margin > 0.0;
            rep.worst_gain_margin = std::min(rep.worst_gain_margin, gp.margin);
            if (!gp.pass) rep.all_pass = false;
            rep.points.push_back(gp);
        }
    }
    return rep;
}

}  // namespace gfmcert
