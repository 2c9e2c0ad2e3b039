#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gfmcert {

using Mat  = Eigen::MatrixXd;
using Vec  = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Ordered set of evaluation frequencies (rad/s), strictly increasing.
struct FrequencyGrid {
    std::vector<double> omegas;

    static FrequencyGrid log_spaced(double omega_min, double omega_max, int n);

    /// Merge another set of frequencies into this grid, keeping it sorted
    /// and deduplicated.
    void merge(const std::vector<double>& extra);

    bool valid() const;
};

// ---------------------------------------------------------------------------
// Error types.  Each maps to one documented failure mode of an operation.
// ---------------------------------------------------------------------------

struct PoleOnGrid : std::runtime_error {
    explicit PoleOnGrid(const std::string& msg) : std::runtime_error(msg) {}
};

struct IllPosed : std::runtime_error {
    explicit IllPosed(const std::string& msg) : std::runtime_error(msg) {}
};

struct Level2Mismatch : std::runtime_error {
    explicit Level2Mismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct RhoZero : std::runtime_error {
    explicit RhoZero(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularInterior : std::runtime_error {
    explicit SingularInterior(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotSimplePole : std::runtime_error {
    explicit NotSimplePole(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateOperatingPoint : std::runtime_error {
    explicit DegenerateOperatingPoint(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Collects every violated invariant of a scenario, not just the first one.
struct ValidationError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ValidationError(std::vector<std::string> v);
};

}  // namespace gfmcert
