#pragma once

/**
 * Decentralized parametric stability certificates: ρ-dependent coefficient
 * table, per-converter coupling strengths, the four active-power and four
 * reactive-power conditions, the relaxed quasi-stationary conditions, and
 * stability-region sampling.
 */

#include <vector>

#include "gfmcert/devices.hpp"
#include "gfmcert/netmodel.hpp"
#include "gfmcert/types.hpp"

namespace gfmcert {

struct RhoCoefficients {
    double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0, c7 = 0, c8 = 0, c9 = 0;
    double rho = 0;
    double vmax = 0;
    /// ρ = 0 makes c2, c7 diverge and c3, c4 vanish: the dynamic certificate
    /// is infeasible for any positive coupling, and the record is marked.
    bool degenerate = false;
};

struct CouplingStrengths {
    double alpha_p = 0;      ///< d_p·|v|²max·Σ_{j≠i} b_ij (dimensionless)
    double alpha_q = 0;      ///< (d_q/|v|_{0,i})·Σ_{j≠i} b_ij
    double tau_p_tilde = 0;  ///< τ_p·ω0 (rad)
    double tau_q_tilde = 0;  ///< τ_q·ω0 (rad)
};

struct ConditionResult {
    bool pass = false;
    double margin = 0;  ///< RHS − LHS (strict inequality, pass ⇔ margin > 0)
    bool near_boundary = false;
};

struct ConverterCertificate {
    CouplingStrengths coupling;
    std::array<ConditionResult, 4> active;    ///< conditions (a)–(d), α_p
    std::array<ConditionResult, 4> reactive;  ///< conditions (a)–(d), α_q
    bool corollary_alpha_q = false;           ///< α_q < c5
    bool corollary_tau_p = false;             ///< τ_p > 0
    bool dynamic_pass = false;                ///< all eight margins positive
    bool level1_pass = false;                 ///< both relaxed conditions
    bool level2_pass = false;                 ///< always true for positive gains
};

struct CertificateReport {
    RhoCoefficients coeffs;
    std::vector<ConverterCertificate> converters;
    bool dynamic_pass = false;  ///< AND over converters
    bool level1_pass = false;
    bool level2_pass = false;
};

/// Evaluate the nine ρ-dependent coefficients.  For ρ = 0 a degenerate record
/// is returned (no throw), since the dynamic certificate is vacuous there.
RhoCoefficients table1_coeffs(double rho, double vmax);

/// Per-converter coupling strengths; `conv` must already be in global pu.
CouplingStrengths coupling_strengths(const NetworkSpec& net, const ConverterSpec& conv, int i);

/// The four active-power conditions (a)–(d).  Throws RhoZero on a degenerate
/// coefficient record.
std::array<ConditionResult, 4> check_active(const CouplingStrengths& cs,
                                            const RhoCoefficients& c);

/// The four reactive-power conditions (a)–(d).
std::array<ConditionResult, 4> check_reactive(const CouplingStrengths& cs,
                                              const RhoCoefficients& c);

/// Relaxed quasi-stationary conditions: (α_q < 5(1+ρ²)/4, τ_p > 0).
std::pair<bool, bool> check_corollary(const CouplingStrengths& cs, double rho,
                                      const ConverterSpec& conv);

/// Full per-network certificate evaluation (converters in global pu).
CertificateReport evaluate_certificates(const NetworkSpec& net,
                                        const std::vector<ConverterSpec>& convs);

enum class RegionKind { Active, Reactive };

struct RegionGrid {
    std::vector<double> alphas;   ///< axis values
    std::vector<double> taus;     ///< axis values (τ̃, rad)
    std::vector<std::vector<bool>> feasible;  ///< [tau index][alpha index]
};

/// Sample the (α, τ̃) feasibility region of the chosen condition family.
RegionGrid sample_region(double rho, double vmax, double alpha_min, double alpha_max,
                         double tau_min, double tau_max, int resolution, RegionKind kind);

}  // namespace gfmcert
