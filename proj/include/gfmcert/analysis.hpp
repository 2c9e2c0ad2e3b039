#pragma once

/**
 * Complex-matrix analysis primitives: positive semidefiniteness, Gershgorin
 * diagonal dominance, numerical-range boundary sampling, matrix phases, and
 * the mixed gain-phase frequency-domain check.
 */

#include <vector>

#include "gfmcert/state_space.hpp"
#include "gfmcert/types.hpp"

namespace gfmcert {

/// True iff m is (numerically) Hermitian and its Hermitian part has
/// min eigenvalue ≥ −tol.
bool is_hermitian_psd(const CMat& m, double tol);

/// Smallest eigenvalue of the Hermitian part (m + m*)/2.
double min_hermitian_eig(const CMat& m);

/// Hermitian, real nonnegative diagonal, and |m_ii| ≥ Σ_{j≠i} |m_ij| per row.
/// A small relative slack absorbs rows where dominance holds with equality.
bool gershgorin_dominant(const CMat& m);

/// Boundary points of the numerical range W(a), sampled at n_angles support
/// directions.
std::vector<Complex> numerical_range_boundary(const CMat& a, int n_angles);

struct PhaseInterval {
    double phi_max = 0.0;  ///< rad
    double phi_min = 0.0;  ///< rad
    bool sectorial = false;
    bool near_origin = false;  ///< boundary of W(A) passes close to 0 (semi-sectorial)
};

/// Phases of a sectorial matrix from its numerical-range boundary.  When 0
/// lies inside W(A), returns sectorial=false with phi fields unset.
PhaseInterval matrix_phases(const CMat& a, int n_angles = 720);

struct GainPhasePoint {
    double omega = 0.0;
    bool phase_test = false;  ///< true: phase condition evaluated, else gain condition
    bool applicable = true;   ///< false when a matrix is non-sectorial at this ω
    bool pass = false;
    double margin = 0.0;  ///< distance to the condition boundary (positive = pass)
};

struct GainPhaseReport {
    std::vector<GainPhasePoint> points;
    bool all_pass = false;          ///< over applicable points
    double worst_phase_margin = 0;  ///< min over phase points (rad)
    double worst_gain_margin = 0;   ///< min over gain points (1 − σ̄σ̄)
};

/**
 * Frequency-wise mixed gain-phase check on the pair (h1, h2): below omega_c
 * the phase sums must lie strictly inside (−π, π); at and above omega_c the
 * gain product σ̄(H1)σ̄(H2) must be < 1.  omega_c = +inf evaluates the phase
 * condition at every grid point and the gain condition at the top grid point
 * only.  Grid points within the exclusion radius of an imaginary-axis pole of
 * h2 are skipped.
 */
GainPhaseReport mixed_gain_phase_check(const StateSpaceModel& h1, const StateSpaceModel& h2,
                                       const FrequencyGrid& grid, double omega_c,
                                       double pole_exclusion = 1e-6 * 100 * M_PI);

}  // namespace gfmcert
