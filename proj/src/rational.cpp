#include "gfmcert/rational.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace gfmcert {

Polynomial::Polynomial(std::vector<double> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) coeffs.push_back(0.0);
}

int Polynomial::degree() const {
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
        if (coeffs[static_cast<size_t>(i)] != 0.0) return i;
    return -1;
}

bool Polynomial::is_zero() const { return degree() < 0; }

double Polynomial::leading() const {
    const int d = degree();
    return d < 0 ? 0.0 : coeffs[static_cast<size_t>(d)];
}

Complex Polynomial::eval(Complex z) const {
    Complex acc(0.0, 0.0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

void Polynomial::trim(double tol) {
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    const double cutoff = tol * scale;
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= cutoff) coeffs.pop_back();
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<double> c(std::max(coeffs.size(), o.coeffs.size()), 0.0);
    for (size_t i = 0; i < coeffs.size(); ++i) c[i] += coeffs[i];
    for (size_t i = 0; i < o.coeffs.size(); ++i) c[i] += o.coeffs[i];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    std::vector<double> c(std::max(coeffs.size(), o.coeffs.size()), 0.0);
    for (size_t i = 0; i < coeffs.size(); ++i) c[i] += coeffs[i];
    for (size_t i = 0; i < o.coeffs.size(); ++i) c[i] -= o.coeffs[i];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    std::vector<double> c(coeffs.size() + o.coeffs.size() - 1, 0.0);
    for (size_t i = 0; i < coeffs.size(); ++i)
        for (size_t j = 0; j < o.coeffs.size(); ++j) c[i + j] += coeffs[i] * o.coeffs[j];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(double k) const {
    std::vector<double> c(coeffs);
    for (double& x : c) x *= k;
    return Polynomial(std::move(c));
}

namespace {

/// Characteristic frequency scale of a polynomial: geometric mean of the root
/// magnitudes, used to normalize companion matrices whose coefficients span
/// many orders of magnitude.
double poly_scale(const std::vector<double>& coeffs, int deg) {
    const double a0 = std::abs(coeffs[0]);
    const double an = std::abs(coeffs[static_cast<size_t>(deg)]);
    if (a0 == 0.0 || an == 0.0) return 1.0;
    const double ws = std::pow(a0 / an, 1.0 / deg);
    return (std::isfinite(ws) && ws > 0.0) ? ws : 1.0;
}

}  // namespace

std::vector<Complex> Polynomial::roots() const {
    const int d = degree();
    if (d <= 0) return {};
    // Normalize the variable as s = ws·z to keep the companion matrix
    // well conditioned, then rescale the eigenvalues.
    const double ws = poly_scale(coeffs, d);
    std::vector<double> cz(static_cast<size_t>(d) + 1);
    double wsi = 1.0;
    for (int i = 0; i <= d; ++i) {
        cz[static_cast<size_t>(i)] = coeffs[static_cast<size_t>(i)] * wsi;
        wsi *= ws;
    }
    Mat comp = Mat::Zero(d, d);
    const double lead = cz[static_cast<size_t>(d)];
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -cz[static_cast<size_t>(i)] / lead;
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Mat> es(comp, /*computeEigenvectors=*/false);
    std::vector<Complex> out(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) out[static_cast<size_t>(i)] = ws * es.eigenvalues()(i);
    return out;
}

Polynomial Polynomial::deflate_origin(double tol) const {
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    if (std::abs(coeffs[0]) > tol * std::max(1.0, scale))
        throw IllPosed("deflate_origin: constant term is not (numerically) zero");
    if (coeffs.size() == 1) return Polynomial::constant(0.0);
    return Polynomial(std::vector<double>(coeffs.begin() + 1, coeffs.end()));
}

Complex Rational::eval(Complex z) const { return num.eval(z) / den.eval(z); }

Rational Rational::operator+(const Rational& o) const {
    return {num * o.den + o.num * den, den * o.den};
}
Rational Rational::operator-(const Rational& o) const {
    return {num * o.den - o.num * den, den * o.den};
}
Rational Rational::operator*(const Rational& o) const { return {num * o.num, den * o.den}; }
Rational Rational::operator/(const Rational& o) const { return {num * o.den, den * o.num}; }

SisoRealization realize_column(const Polynomial& den, const std::vector<Polynomial>& nums) {
    const int n = den.degree();
    if (n < 0) throw IllPosed("realize_column: zero denominator");
    const double lead = den.leading();

    const size_t p = nums.size();
    SisoRealization r;
    r.d = Mat::Zero(static_cast<Eigen::Index>(p), 1);

    if (n == 0) {  // static column
        r.a = Mat::Zero(0, 0);
        r.b = Mat::Zero(0, 1);
        r.c = Mat::Zero(static_cast<Eigen::Index>(p), 0);
        for (size_t k = 0; k < p; ++k) {
            if (nums[k].degree() > 0) throw IllPosed("realize_column: improper entry");
            r.d(static_cast<Eigen::Index>(k), 0) = nums[k].coeffs[0] / lead;
        }
        return r;
    }

    // Realize in the normalized variable z = s/ws (controllable canonical
    // form), then rescale: A = ws·A_z, b = ws·b_z.  This keeps the companion
    // matrix well conditioned when the coefficients span many decades.
    const double ws = poly_scale(den.coeffs, n);
    std::vector<double> dz(static_cast<size_t>(n) + 1, 0.0);
    {
        double wsi = 1.0;
        for (int i = 0; i <= n; ++i) {
            dz[static_cast<size_t>(i)] =
                i < static_cast<int>(den.coeffs.size()) ? den.coeffs[static_cast<size_t>(i)] * wsi
                                                        : 0.0;
            wsi *= ws;
        }
    }
    const double lead_z = dz[static_cast<size_t>(n)];

    r.a = Mat::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) r.a(i, i + 1) = 1.0;
    for (int i = 0; i < n; ++i) r.a(n - 1, i) = -dz[static_cast<size_t>(i)] / lead_z;
    r.a *= ws;
    r.b = Mat::Zero(n, 1);
    r.b(n - 1, 0) = ws;
    r.c = Mat::Zero(static_cast<Eigen::Index>(p), n);

    for (size_t k = 0; k < p; ++k) {
        if (nums[k].degree() > n) throw IllPosed("realize_column: improper entry");
        std::vector<double> nz(static_cast<size_t>(n) + 1, 0.0);
        double wsi = 1.0;
        for (int i = 0; i <= n; ++i) {
            if (i < static_cast<int>(nums[k].coeffs.size()))
                nz[static_cast<size_t>(i)] = nums[k].coeffs[static_cast<size_t>(i)] * wsi;
            wsi *= ws;
        }
        // Split num = q·den + rem with q constant (num has degree <= n).
        const double q = nz[static_cast<size_t>(n)] / lead_z;
        r.d(static_cast<Eigen::Index>(k), 0) = q;
        for (int i = 0; i < n; ++i)
            r.c(static_cast<Eigen::Index>(k), i) =
                (nz[static_cast<size_t>(i)] - q * dz[static_cast<size_t>(i)]) / lead_z;
    }
    return r;
}

SisoRealization realize_siso(const Rational& r) {
    if (!r.proper()) throw IllPosed("realize_siso: improper transfer function");
    return realize_column(r.den, {r.num});
}

}  // namespace gfmcert
