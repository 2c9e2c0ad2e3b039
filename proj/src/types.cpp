#include "gfmcert/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gfmcert {

FrequencyGrid FrequencyGrid::log_spaced(double omega_min, double omega_max, int n) {
    FrequencyGrid g;
    if (n <= 0 || omega_min <= 0 || omega_max <= omega_min)
        throw IllPosed("FrequencyGrid::log_spaced: invalid parameters");
    g.omegas.reserve(static_cast<size_t>(n));
    const double l0 = std::log10(omega_min), l1 = std::log10(omega_max);
    for (int i = 0; i < n; ++i)
        g.omegas.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (n - 1)));
    return g;
}

void FrequencyGrid::merge(const std::vector<double>& extra) {
    omegas.insert(omegas.end(), extra.begin(), extra.end());
    std::sort(omegas.begin(), omegas.end());
    omegas.erase(std::unique(omegas.begin(), omegas.end()), omegas.end());
}

bool FrequencyGrid::valid() const {
    for (size_t i = 0; i < omegas.size(); ++i) {
        if (!std::isfinite(omegas[i]) || omegas[i] < 0) return false;
        if (i > 0 && omegas[i] <= omegas[i - 1]) return false;
    }
    return true;
}

namespace {
std::string join_violations(const std::vector<std::string>& v) {
    std::ostringstream os;
    os << "scenario validation failed (" << v.size() << " violation(s)):";
    for (const auto& s : v) os << "\n  - " << s;
    return os.str();
}
}  // namespace

ValidationError::ValidationError(std::vector<std::string> v)
    : std::runtime_error(join_violations(v)), violations(std::move(v)) {}

}  // namespace gfmcert
