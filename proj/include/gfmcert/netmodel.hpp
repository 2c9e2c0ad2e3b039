#pragma once

/**
 * Small-signal models of the dominantly inductive transmission network, in
 * rectangular dq coordinates (admittance form) and in polar power/angle
 * coordinates at four fidelity levels, plus the first-principles linearization
 * oracle and Kron reduction.
 */

#include <vector>

#include "gfmcert/state_space.hpp"
#include "gfmcert/types.hpp"

namespace gfmcert {

struct NetworkSpec {
    int n = 0;          ///< node count
    Mat b;              ///< n×n symmetric susceptances (pu), zero diagonal
    double rho = 0.0;   ///< uniform resistance-inductance ratio
    double omega0 = 0;  ///< nominal angular frequency (rad/s)
    Vec v0;             ///< steady-state voltage magnitudes (pu)
    Vec delta0;         ///< steady-state angles (rad)
    double vmax = 1.1;  ///< voltage upper bound used by the certificates (pu)
    double vmin = 0.9;

    /// Σ_{j≠i} b_ij for node i.
    double sum_b(int i) const { return b.row(i).sum(); }

    /// Returns the list of violated invariants (empty when valid).
    std::vector<std::string> validate() const;
    void require_valid() const;
};

/// Fidelity level of the polar-coordinate network model.
enum class NetworkLevel { Full, Dynamic, Level1, Level2 };

/// Graph Laplacian of the line susceptances.
Mat build_laplacian(const NetworkSpec& spec);

/// 2×2 line-dynamics transfer matrix with poles at −ρω0 ± jω0:
/// [[ρ+s/ω0, 1], [−1, ρ+s/ω0]] / (1+(ρ+s/ω0)²).
StateSpaceModel line_dynamics_f_rho(double rho, double omega0);

/// Rectangular-coordinate network admittance Y(s) = B ⊗ f_ρ(s), 2n×2n.
/// Isolated nodes (zero susceptance row) contribute no states.
StateSpaceModel build_Y(const NetworkSpec& spec);

/// Polar-coordinate network model N(s) mapping (Δδ_i, Δ|v|_n,i) to
/// (Δp_i, Δq_i), at the requested fidelity level.  Level1/Level2 are static.
StateSpaceModel build_N(const NetworkSpec& spec, NetworkLevel level);

/**
 * Frobenius-distance ratio ‖M−M₂‖_F / ‖M−M₁‖_F at s = jω comparing the
 * lossy-pole approximation M₂ against the lossless M₁; strictly below 1 for
 * ρ > 0.  Returns 1 at ρ = 0 by convention (both approximations coincide with
 * M, 0/0), and 1 when both distances are below 1e−14.
 */
double approximation_error_ratio(double rho, double omega, double omega0);

/// Network side of the closed-loop interconnection:
/// 𝒩₀(s) = N(s)·per-node diag(1/s, 1/|v|_{0,i}).  Adds n integrator states.
StateSpaceModel build_N0(const NetworkSpec& spec, NetworkLevel level);

/// Proof-pipeline variant: 𝒩(s) = N(s)·diag(1/s, …) with all 2n channels
/// integrated (Dynamic level).
StateSpaceModel build_N_transformed(const NetworkSpec& spec);

/**
 * Kron reduction: Schur complement of the susceptance Laplacian onto the
 * boundary nodes, returned as equivalent pairwise susceptances.  Throws
 * SingularInterior when the interior sub-Laplacian is singular.
 */
Mat kron_reduce(const Mat& b_full, const std::vector<int>& boundary);

/**
 * Independent first-principles oracle for N(jω): steady-state currents from
 * the admittance balance, rectangular voltages from (|v|₀, δ₀), the power and
 * polar-coordinate linearization Jacobians, and Y(jω).
 */
CMat linearize_dq_oracle(const NetworkSpec& spec, double omega);

}  // namespace gfmcert
