#include "gfmcert/netmodel.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "gfmcert/rational.hpp"

namespace gfmcert {

std::vector<std::string> NetworkSpec::validate() const {
    std::vector<std::string> out;
    if (n < 1) out.push_back("node count must be >= 1");
    if (b.rows() != n || b.cols() != n) out.push_back("susceptance matrix must be n x n");
    if (b.rows() == n && b.cols() == n) {
        if ((b - b.transpose()).norm() > 1e-12 * std::max(b.norm(), 1.0))
            out.push_back("susceptance matrix must be symmetric");
        for (int i = 0; i < n; ++i) {
            if (b(i, i) != 0.0) out.push_back("susceptance diagonal must be zero");
            for (int j = 0; j < n; ++j)
                if (b(i, j) < 0.0) out.push_back("susceptances must be nonnegative");
        }
    }
    if (rho < 0.0) out.push_back("rho must be nonnegative");
    if (!(omega0 > 0.0)) out.push_back("omega0 must be positive");
    if (v0.size() != n) out.push_back("v0 must have one entry per node");
    if (delta0.size() != 0 && delta0.size() != n)
        out.push_back("delta0 must be empty or have one entry per node");
    if (!(vmin <= vmax)) out.push_back("vmin must not exceed vmax");
    for (Eigen::Index i = 0; i < v0.size(); ++i) {
        if (v0(i) < vmin || v0(i) > vmax) {
            std::ostringstream os;
            os << "v0[" << i << "]=" << v0(i) << " outside [vmin, vmax]=[" << vmin << ", "
               << vmax << "]";
            out.push_back(os.str());
        }
    }
    return out;
}

void NetworkSpec::require_valid() const {
    auto v = validate();
    if (!v.empty()) throw ValidationError(std::move(v));
}

Mat build_laplacian(const NetworkSpec& spec) {
    spec.require_valid();
    Mat lap = -spec.b;
    for (int i = 0; i < spec.n; ++i) lap(i, i) = spec.sum_b(i);
    return lap;
}

namespace {

/// Shared monic denominator ω0² + (ρω0 + s)² = s² + 2ρω0 s + ω0²(1+ρ²).
Polynomial line_denominator(double rho, double omega0) {
    return Polynomial({omega0 * omega0 * (1.0 + rho * rho), 2.0 * rho * omega0, 1.0});
}

/// Realize a 2×2 transfer matrix with shared denominator den and entry
/// numerators n11..n22 (proper).  2 states per input column.
StateSpaceModel realize_tf2(const Polynomial& den, const Polynomial& n11, const Polynomial& n12,
                            const Polynomial& n21, const Polynomial& n22) {
    const SisoRealization col0 = realize_column(den, {n11, n21});
    const SisoRealization col1 = realize_column(den, {n12, n22});
    const Eigen::Index k0 = col0.a.rows(), k1 = col1.a.rows();
    StateSpaceModel m;
    m.a = Mat::Zero(k0 + k1, k0 + k1);
    m.a.topLeftCorner(k0, k0) = col0.a;
    m.a.bottomRightCorner(k1, k1) = col1.a;
    m.b = Mat::Zero(k0 + k1, 2);
    m.b.block(0, 0, k0, 1) = col0.b;
    m.b.block(k0, 1, k1, 1) = col1.b;
    m.c = Mat::Zero(2, k0 + k1);
    m.c.leftCols(k0) = col0.c;
    m.c.rightCols(k1) = col1.c;
    m.d = Mat::Zero(2, 2);
    m.d.col(0) = col0.d;
    m.d.col(1) = col1.d;
    return m;
}

/// Voltage-weighted Laplacian: L_ii = Σ_j b_ij |v|_i², L_ij = −b_ij |v|_i |v|_j.
Mat voltage_laplacian(const NetworkSpec& spec) {
    Mat lv = Mat::Zero(spec.n, spec.n);
    for (int i = 0; i < spec.n; ++i) {
        for (int j = 0; j < spec.n; ++j) {
            if (j == i) continue;
            lv(i, j) = -spec.b(i, j) * spec.v0(i) * spec.v0(j);
            lv(i, i) += spec.b(i, j) * spec.v0(i) * spec.v0(i);
        }
    }
    return lv;
}

Mat kron2(const Mat& m) {
    Mat out = Mat::Zero(2 * m.rows(), 2 * m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out.block(2 * i, 2 * j, 2, 2) = m(i, j) * Mat::Identity(2, 2);
    return out;
}

}  // namespace

StateSpaceModel line_dynamics_f_rho(double rho, double omega0) {
    if (!(omega0 > 0.0)) throw IllPosed("line_dynamics_f_rho: omega0 must be positive");
    const double w2 = omega0 * omega0;
    const Polynomial den = line_denominator(rho, omega0);
    const Polynomial diag({rho * w2, omega0});  // ω0(ρω0 + s)
    const Polynomial off({w2});
    return realize_tf2(den, diag, off, off * -1.0, diag);
}

StateSpaceModel build_Y(const NetworkSpec& spec) {
    spec.require_valid();
    std::vector<StateSpaceModel> blocks;
    blocks.reserve(static_cast<size_t>(spec.n));
    for (int i = 0; i < spec.n; ++i) {
        // Isolated nodes contribute no states (their Laplacian row is zero).
        if (spec.sum_b(i) == 0.0)
            blocks.push_back(StateSpaceModel::zero(2, 2));
        else
            blocks.push_back(line_dynamics_f_rho(spec.rho, spec.omega0));
    }
    return postmultiply_gain(kron2(build_laplacian(spec)), blockdiag(blocks));
}

StateSpaceModel build_N(const NetworkSpec& spec, NetworkLevel level) {
    spec.require_valid();
    const int n = spec.n;
    const double rho = spec.rho;
    const double w0 = spec.omega0;
    const double w2 = w0 * w0;
    const double denom0 = 1.0 + rho * rho;

    if (level == NetworkLevel::Level2) {
        const double vref = spec.v0(0);
        for (int i = 1; i < n; ++i)
            if (std::abs(spec.v0(i) - vref) > 1e-9)
                throw Level2Mismatch("Level2 network model requires a uniform voltage profile");
        return StateSpaceModel::gain(vref * vref / denom0 * kron2(build_laplacian(spec)));
    }

    if (level == NetworkLevel::Level1) {
        Mat d = Mat::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double bij = spec.b(i, j);
                const double vij = spec.v0(i) * spec.v0(j);
                d(2 * i, 2 * i) += bij * vij / denom0;
                d(2 * i + 1, 2 * i + 1) +=
                    bij * (2.0 * spec.v0(i) * spec.v0(i) - vij) / denom0;
                d(2 * i, 2 * j) = -bij * vij / denom0;
                d(2 * i + 1, 2 * j + 1) = -bij * vij / denom0;
            }
        }
        return StateSpaceModel::gain(d);
    }

    // Full / Dynamic: N = (L_v ⊗ I₂)·blockdiag(m(s)) + static correction.
    const Polynomial den = line_denominator(rho, w0);
    const Polynomial n_diag({w2});
    const Polynomial n_off = (level == NetworkLevel::Full)
                                 ? Polynomial({rho * w2, w0})  // ω0(ρω0+s)
                                 : Polynomial({0.0, w0});      // ω0 s
    std::vector<StateSpaceModel> blocks;
    blocks.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (spec.sum_b(i) == 0.0)
            blocks.push_back(StateSpaceModel::zero(2, 2));
        else
            blocks.push_back(realize_tf2(den, n_diag, n_off, n_off * -1.0, n_diag));
    }
    StateSpaceModel dyn = postmultiply_gain(kron2(voltage_laplacian(spec)), blockdiag(blocks));

    Mat stat = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        double k = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i)
                k += spec.b(i, j) * (spec.v0(i) * spec.v0(i) - spec.v0(i) * spec.v0(j)) / denom0;
        stat(2 * i, 2 * i) = -k;
        stat(2 * i + 1, 2 * i + 1) = k;
        if (level == NetworkLevel::Full) {
            stat(2 * i, 2 * i + 1) = rho * k;
            stat(2 * i + 1, 2 * i) = rho * k;
        }
    }
    dyn.d += stat;
    return dyn;
}

double approximation_error_ratio(double rho, double omega, double omega0) {
    if (rho < 0.0) throw IllPosed("approximation_error_ratio: rho must be nonnegative");
    // Both approximations coincide with M at rho = 0; the ratio is the 0/0
    // limit, returned as 1 by convention.
    if (rho == 0.0) return 1.0;

    const Complex s(0.0, omega);
    const Complex w = s / omega0;
    auto block = [](Complex offdiag, Complex den) {
        CMat m(2, 2);
        m << 1.0 / den, offdiag / den, -offdiag / den, 1.0 / den;
        return m;
    };
    const Complex den_lossy = 1.0 + (rho + w) * (rho + w);
    const Complex den_lossless = 1.0 + w * w;
    const CMat m = block(rho + w, den_lossy);
    const CMat m2 = block(w, den_lossy);
    const double dist2 = (m - m2).norm();
    // M1 has poles at ±jω0: its distance diverges there and the ratio tends
    // to zero.
    if (std::abs(den_lossless) == 0.0) return 0.0;
    const CMat m1 = block(w, den_lossless);
    const double dist1 = (m - m1).norm();
    if (dist1 < 1e-14 && dist2 < 1e-14) return 1.0;
    return dist2 / dist1;
}

StateSpaceModel build_N0(const NetworkSpec& spec, NetworkLevel level) {
    const StateSpaceModel n = build_N(spec, level);
    std::vector<bool> integrate(static_cast<size_t>(2 * spec.n));
    std::vector<double> gains(static_cast<size_t>(2 * spec.n));
    for (int i = 0; i < spec.n; ++i) {
        integrate[static_cast<size_t>(2 * i)] = true;  // angle channel: 1/s
        gains[static_cast<size_t>(2 * i)] = 0.0;
        integrate[static_cast<size_t>(2 * i + 1)] = false;
        gains[static_cast<size_t>(2 * i + 1)] = 1.0 / spec.v0(i);  // Δ|v| → Δ|v|_n
    }
    return postmultiply_channel_dynamics(n, integrate, gains);
}

StateSpaceModel build_N_transformed(const NetworkSpec& spec) {
    const StateSpaceModel n = build_N(spec, NetworkLevel::Dynamic);
    const std::vector<bool> integrate(static_cast<size_t>(2 * spec.n), true);
    const std::vector<double> gains(static_cast<size_t>(2 * spec.n), 0.0);
    return postmultiply_channel_dynamics(n, integrate, gains);
}

Mat kron_reduce(const Mat& b_full, const std::vector<int>& boundary) {
    const Eigen::Index m = b_full.rows();
    if (b_full.cols() != m) throw IllPosed("kron_reduce: susceptance matrix must be square");

    std::vector<int> interior;
    std::vector<bool> is_boundary(static_cast<size_t>(m), false);
    for (int i : boundary) {
        if (i < 0 || i >= m) throw IllPosed("kron_reduce: boundary index out of range");
        is_boundary[static_cast<size_t>(i)] = true;
    }
    for (int i = 0; i < m; ++i)
        if (!is_boundary[static_cast<size_t>(i)]) interior.push_back(i);

    Mat lap = -b_full;
    for (Eigen::Index i = 0; i < m; ++i) {
        lap(i, i) = 0.0;
        lap(i, i) = b_full.row(i).sum() - b_full(i, i);
    }

    const auto nb = static_cast<Eigen::Index>(boundary.size());
    const auto ni = static_cast<Eigen::Index>(interior.size());
    if (ni == 0) {
        Mat out(nb, nb);
        for (Eigen::Index i = 0; i < nb; ++i)
            for (Eigen::Index j = 0; j < nb; ++j)
                out(i, j) = b_full(boundary[static_cast<size_t>(i)], boundary[static_cast<size_t>(j)]);
        return out;
    }

    Mat lbb(nb, nb), lbi(nb, ni), lib(ni, nb), lii(ni, ni);
    for (Eigen::Index i = 0; i < nb; ++i)
        for (Eigen::Index j = 0; j < nb; ++j)
            lbb(i, j) = lap(boundary[static_cast<size_t>(i)], boundary[static_cast<size_t>(j)]);
    for (Eigen::Index i = 0; i < nb; ++i)
        for (Eigen::Index j = 0; j < ni; ++j)
            lbi(i, j) = lap(boundary[static_cast<size_t>(i)], interior[static_cast<size_t>(j)]);
    for (Eigen::Index i = 0; i < ni; ++i)
        for (Eigen::Index j = 0; j < nb; ++j)
            lib(i, j) = lap(interior[static_cast<size_t>(i)], boundary[static_cast<size_t>(j)]);
    for (Eigen::Index i = 0; i < ni; ++i)
        for (Eigen::Index j = 0; j < ni; ++j)
            lii(i, j) = lap(interior[static_cast<size_t>(i)], interior[static_cast<size_t>(j)]);

    Eigen::FullPivLU<Mat> lu(lii);
    if (!lu.isInvertible()) throw SingularInterior("kron_reduce: interior sub-Laplacian singular");
    const Mat reduced = lbb - lbi * lu.solve(lib);

    Mat out = -reduced;
    for (Eigen::Index i = 0; i < nb; ++i) out(i, i) = 0.0;
    // Symmetrize away rounding noise.
    out = 0.5 * (out + out.transpose()).eval();
    return out;
}

CMat linearize_dq_oracle(const NetworkSpec& spec, double omega) {
    spec.require_valid();
    const int n = spec.n;
    const double denom0 = 1.0 + spec.rho * spec.rho;

    Vec vd0(n), vq0(n);
    for (int i = 0; i < n; ++i) {
        const double d0 = spec.delta0.size() == n ? spec.delta0(i) : 0.0;
        vd0(i) = spec.v0(i) * std::cos(d0);
        vq0(i) = spec.v0(i) * std::sin(d0);
    }

    Vec id0 = Vec::Zero(n), iq0 = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double bij = spec.b(i, j) / denom0;
            id0(i) += bij * (spec.rho * (vd0(i) - vd0(j)) + (vq0(i) - vq0(j)));
            iq0(i) += bij * (-(vd0(i) - vd0(j)) + spec.rho * (vq0(i) - vq0(j)));
        }
    }

    // Δ(p,q) = V0·Δi + I0·Δv with Δi = Y(jω)Δv and Δv = T⁻¹(Δδ, Δ|v|_n).
    CMat v0blk = CMat::Zero(2 * n, 2 * n), i0blk = CMat::Zero(2 * n, 2 * n),
         tblk = CMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        v0blk.block(2 * i, 2 * i, 2, 2) << vd0(i), vq0(i), vq0(i), -vd0(i);
        i0blk.block(2 * i, 2 * i, 2, 2) << id0(i), iq0(i), -iq0(i), id0(i);
        const double v2 = spec.v0(i) * spec.v0(i);
        // rows: Δδ_i, Δ|v|_n,i = Δ|v|_i/|v|_0,i as functions of Δv_dq,i
        tblk.block(2 * i, 2 * i, 2, 2) << -vq0(i) / v2, vd0(i) / v2, vd0(i) / v2, vq0(i) / v2;
    }

    const CMat y = eval_freq(build_Y(spec), omega);
    return (v0blk * y + i0blk) * tblk.inverse();
}

}  // namespace gfmcert
