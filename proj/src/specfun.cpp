#include "lvwigner/specfun.hpp"

#include "lvwigner/error.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace lvw::specfun {

namespace {

void require_positive(double x, const char* name)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("x>0", std::string(name) + ": argument must be positive and finite, got "
                                     + std::to_string(x));
}

// erf(x + iy) for x >= 0, y >= 0 from the Abramowitz-Stegun 7.1.29 series.
// All terms of the n-sum carry the same cos(2xy), sin(2xy) factors so there is
// no cancellation beyond the leading erf(x) correction.
Complex erf_first_quadrant(double x, double y)
{
    constexpr double pi = std::numbers::pi;
    const double ex2 = std::exp(-x * x);
    const double c2 = std::cos(2.0 * x * y);
    const double s2 = std::sin(2.0 * x * y);

    double re = std::erf(x);
    double im = 0.0;
    if (x == 0.0) {
        im += y / pi;
    } else {
        const double s = std::sin(x * y);
        re += ex2 * s * s / (pi * x);
        im += ex2 * s2 / (2.0 * pi * x);
    }

    double sr = 0.0, si = 0.0;
    const int n_min = static_cast<int>(2.0 * y) + 1;
    for (int n = 1; n < 400; ++n) {
        const double e = std::exp(-0.25 * n * n);
        const double ch = std::cosh(n * y);
        const double sh = std::sinh(n * y);
        const double f = 2.0 * x - 2.0 * x * ch * c2 + n * sh * s2;
        const double g = 2.0 * x * ch * s2 + n * sh * c2;
        const double d = n * n + 4.0 * x * x;
        const double tr = e * f / d;
        const double ti = e * g / d;
        sr += tr;
        si += ti;
        if (n > n_min && std::abs(tr) + std::abs(ti) <= 1e-17 * (std::abs(sr) + std::abs(si) + 1e-300))
            break;
    }
    re += 2.0 / pi * ex2 * sr;
    im += 2.0 / pi * ex2 * si;
    return {re, im};
}

} // namespace

double log_gamma(double x)
{
    require_positive(x, "log_gamma");
    return boost::math::lgamma(x);
}

double digamma(double x)
{
    require_positive(x, "digamma");
    return boost::math::digamma(x);
}

double trigamma(double x)
{
    require_positive(x, "trigamma");
    return boost::math::trigamma(x);
}

Complex erf_complex(Complex z)
{
    double x = z.real();
    double y = z.imag();
    if (!std::isfinite(x) || !std::isfinite(y))
        throw DomainError("finite", "erf_complex: non-finite argument");
    if (std::abs(y) > 10.0)
        throw AccuracyLoss("erf_complex: |Im z| > 10 is outside the supported strip");

    // Reduce to the first quadrant with erf(-z) = -erf(z), erf(conj z) = conj erf(z).
    const bool negate = x < 0.0;
    if (negate) {
        x = -x;
        y = -y;
    }
    const bool conjugate = y < 0.0;
    if (conjugate)
        y = -y;

    Complex w = erf_first_quadrant(x, y);
    if (conjugate)
        w = std::conj(w);
    return negate ? -w : w;
}

double erfi(double x)
{
    if (!std::isfinite(x) || std::abs(x) > 10.0)
        throw OverflowError("erfi: |x| > 10");
    // (2/sqrt(pi)) sum x^(2n+1) / (n! (2n+1)); every term is positive for x > 0.
    const double x2 = x * x;
    double power = x; // x^(2n+1)/n!
    double sum = x;
    for (int n = 1; n < 1000; ++n) {
        power *= x2 / n;
        const double term = power / (2 * n + 1);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum))
            break;
    }
    return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

double hermite(int n, double u)
{
    if (n < 0 || n > 200)
        throw DomainError("0<=n<=200", "hermite: order out of range");
    if (n == 0)
        return 1.0;
    double hm = 1.0;
    double h = 2.0 * u;
    for (int m = 1; m < n; ++m) {
        const double hp = 2.0 * u * h - 2.0 * m * hm;
        hm = h;
        h = hp;
    }
    return h;
}

} // namespace lvw::specfun
