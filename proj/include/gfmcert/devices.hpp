#pragma once

/**
 * Converter-side models: the filtered droop control law, the block-diagonal
 * multi-converter map, the detailed VSC model with inner current/voltage
 * control loops, and the consistency check between the detailed and reduced
 * models.
 */

#include <cmath>
#include <vector>

#include "gfmcert/state_space.hpp"
#include "gfmcert/types.hpp"

namespace gfmcert {

struct ConverterSpec {
    double d_p = 0.0;    ///< active droop gain (pu frequency / pu power)
    double d_q = 0.0;    ///< reactive droop gain (pu voltage / pu power)
    double tau_p = 0.0;  ///< active power low-pass time constant (s)
    double tau_q = 0.0;  ///< reactive power low-pass time constant (s)
    double s_local = 1.0;   ///< local MVA base
    double s_global = 1.0;  ///< global MVA base

    std::vector<std::string> validate() const;
    void require_valid() const;
};

/// Proportional-integral regulator gains k_p + k_i/s.
struct PiGains {
    double k_p = 0.0;
    double k_i = 0.0;
};

struct DetailedVscSpec {
    ConverterSpec conv;
    double l_f = 0.0;  ///< filter inductance (pu)
    double c_f = 0.0;  ///< filter capacitance (pu)
    double r_f = 0.0;  ///< filter resistance (pu); accepted but not used by the
                       ///< printed closed-form model (documented ambiguity)
    PiGains pi_cc;     ///< current control loop
    PiGains pi_vc;     ///< voltage control loop
    double v_d0 = 1.0;  ///< operating point (pu), local d-axis voltage
    double i_d0 = 0.0;
    double i_q0 = 0.0;
    double omega0 = 100.0 * M_PI;  ///< nominal angular frequency (rad/s)
};

/// Convert droop gains from the local to the global per-unit base:
/// gains scale by s_global/s_local; time constants are unchanged.
ConverterSpec rebase_gains(const ConverterSpec& spec);

/// Diagonal 2×2 droop law diag(d_p/(τ_p s+1), d_q/(τ_q s+1)).
/// Channels with τ = 0 are static (no state).
StateSpaceModel droop_model(const ConverterSpec& spec);

/// Block-diagonal multi-converter map (2n×2n).
StateSpaceModel build_D(const std::vector<ConverterSpec>& specs);

/**
 * Detailed VSC model with inner current and voltage loops, realized directly
 * from its closed-form rational entries (D_12 = 0; D_11 the droop block).
 * Throws DegenerateOperatingPoint when a denominator vanishes identically.
 */
StateSpaceModel full_vsc_model(const DetailedVscSpec& spec);

/// Max over the grid of ‖full_vsc(jω) − droop(jω)‖_F / ‖droop(jω)‖_F.
double reduction_consistency(const DetailedVscSpec& detailed, const FrequencyGrid& grid);

}  // namespace gfmcert
