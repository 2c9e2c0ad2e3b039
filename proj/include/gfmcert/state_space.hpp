#pragma once

/**
 * State-space LTI models and interconnection algebra.
 *
 * Every transfer matrix in the toolkit is represented as a real state-space
 * realization (a, b, c, d).  Degenerate 0-state systems represent pure gains.
 * All operations are pure functions on immutable value types.
 */

#include <optional>
#include <string>
#include <vector>

#include "gfmcert/types.hpp"

namespace gfmcert {

struct StateSpaceModel {
    Mat a;  ///< n_x × n_x state map (1/s)
    Mat b;  ///< n_x × n_u
    Mat c;  ///< n_y × n_x
    Mat d;  ///< n_y × n_u
    std::vector<std::string> input_labels;   ///< optional, empty or size n_u
    std::vector<std::string> output_labels;  ///< optional, empty or size n_y

    Eigen::Index n_states() const { return a.rows(); }
    Eigen::Index n_inputs() const { return b.cols(); }
    Eigen::Index n_outputs() const { return c.rows(); }

    /// Pure gain (0 states).
    static StateSpaceModel gain(const Mat& k);
    /// Scalar integrator 1/s.
    static StateSpaceModel integrator();
    /// Zero system of the given shape (0 states).
    static StateSpaceModel zero(Eigen::Index n_y, Eigen::Index n_u);

    /// Throws IllPosed on any dimension inconsistency.
    void check_dims() const;
};

/// Frequency response c (sI − a)^{-1} b + d at an arbitrary complex point.
/// Throws PoleOnGrid if s is within pole_tol of an eigenvalue of a.
CMat eval_s(const StateSpaceModel& m, Complex s, double pole_tol = 1e-9 * 100 * M_PI);

/// Frequency response at s = jω.
CMat eval_freq(const StateSpaceModel& m, double omega, double pole_tol = 1e-9 * 100 * M_PI);

/// Series composition: (g ∘ h)(s) = g(s)·h(s), i.e. output of h feeds g.
StateSpaceModel series(const StateSpaceModel& g, const StateSpaceModel& h);

/// Parallel sum: g(s) + h(s).
StateSpaceModel add(const StateSpaceModel& g, const StateSpaceModel& h);

/// Constant pre-gain: m(s)·k (k acts on the inputs).
StateSpaceModel premultiply_gain(const StateSpaceModel& m, const Mat& k);

/// Constant post-gain: k·m(s) (k acts on the outputs).
StateSpaceModel postmultiply_gain(const Mat& k, const StateSpaceModel& m);

/// Block-diagonal (direct-sum) composition.
StateSpaceModel blockdiag(const std::vector<StateSpaceModel>& blocks);

/**
 * Post-multiply m(s) by a diagonal channel map: channel k becomes 1/s when
 * integrate[k] is true, else the static gain gains[k].  Adds one state per
 * integrated channel.
 */
StateSpaceModel postmultiply_channel_dynamics(const StateSpaceModel& m,
                                              const std::vector<bool>& integrate,
                                              const std::vector<double>& gains);

/**
 * Negative-feedback closure of h around the static loop: returns a realization
 * of h(s)(I − g(s)h(s))^{-1} ... not provided generically; see loop_shift.
 */

/// The four closed-loop maps of the standard negative-feedback pair.
struct GangOfFour {
    /// w1 → y1: (I+H1H2)^{-1} H1
    StateSpaceModel sensitivity_h1;
    /// w2 → y1: −(I+H1H2)^{-1} H1 H2
    StateSpaceModel h1h2_complement;
    /// w1 → y2: H2 (I+H1H2)^{-1} H1
    StateSpaceModel h2_sensitivity_h1;
    /// w2 → y2: H2 (I+H1H2)^{-1}
    StateSpaceModel h2_sensitivity;
};

/**
 * Build the four closed-loop transfer matrices of the feedback pair
 *   y1 = H1 (w1 − y2),   y2 = H2 (y1 + w2).
 * All four share a single state matrix.  Throws IllPosed when I + D1·D2 is
 * singular (ill-posed loop).
 */
GangOfFour interconnect_gang_of_four(const StateSpaceModel& h1, const StateSpaceModel& h2);

/// Eigenvalues of the state map, sorted by real part descending (ties by imag).
std::vector<Complex> poles(const StateSpaceModel& m);

struct ModeClassification {
    Complex eigenvalue;  ///< rad/s
    bool controllable = false;
    bool observable = false;
    bool structural = false;  ///< |eigenvalue| below zero-tolerance and non-minimal
};

struct StabilityVerdict {
    std::vector<ModeClassification> modes;
    bool stable = false;
    bool inconclusive = false;  ///< some minimal eigenvalue within ±margin_tol of jR
    double margin = 0.0;        ///< −max Re over minimal eigenvalues (+inf if none)
    int n_structural = 0;
};

/// PBH-test classification of every eigenvalue of m.a.
std::vector<ModeClassification> classify_modes(const StateSpaceModel& m, double zero_tol);

/**
 * Pole-based internal-stability verdict on the minimal part of the
 * realization.  Structural modes (non-minimal, |λ| < zero_tol) are excluded
 * from the verdict and counted separately.
 */
StabilityVerdict stability_verdict(const StateSpaceModel& m, double zero_tol, double margin_tol);

}  // namespace gfmcert
