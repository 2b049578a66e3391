#include "degensim/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degensim/quadrature.hpp"

namespace degensim {
namespace {

constexpr double kEndpointMargin = 1e-14;
constexpr int kInverseBudget = 200;

bool is_small_integer(double x) {
    if (x < 1.0 || x > 12.0) return false;
    return std::abs(x - std::round(x)) < 1e-12;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Antiderivative of z^b / (1-z)^a for integer a >= 1, b >= 1, normalized so
// the value at z = 0 vanishes. Substituting u = 1 - z expands the numerator
// binomially; each term integrates to a power of u or to log(u).
double singular_power_phi_closed(int a, int b, double z) {
    const double u = 1.0 - z;
    double total = 0.0;
    for (int j = 0; j <= b; ++j) {
        const double coeff = binomial(b, j) * ((j % 2 == 0) ? 1.0 : -1.0);
        double term;
        if (j == a - 1) {
            term = std::log1p(-z);  // log(1-z), exact near z = 0
        } else {
            const double p = static_cast<double>(j - a + 1);
            term = (std::pow(u, p) - 1.0) / p;
        }
        total -= coeff * term;
    }
    return total;
}

} // namespace

PhiSpec PhiSpec::singular_power(double a, double b) {
    if (!(a >= 1.0)) throw DomainError("singular_power requires a >= 1");
    if (!(b > 0.0)) throw DomainError("singular_power requires b > 0");
    PhiSpec s;
    s.kind = Kind::SingularPower;
    s.a = a;
    s.b = b;
    s.lo = -1.0;
    s.hi = 1.0;
    return s;
}

PhiSpec PhiSpec::porous_medium(double m) {
    if (!(m > 1.0)) throw DomainError("porous_medium requires m > 1");
    PhiSpec s;
    s.kind = Kind::PorousMedium;
    s.m = m;
    return s;
}

PhiSpec PhiSpec::linear(double slope) {
    if (!(slope > 0.0)) throw DomainError("linear phi requires slope > 0");
    PhiSpec s;
    s.kind = Kind::Linear;
    s.slope = slope;
    return s;
}

std::string PhiSpec::name() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::SingularPower:
            os << "singular_power(a=" << a << ",b=" << b << ")";
            break;
        case Kind::PorousMedium:
            os << "porous_medium(m=" << m << ")";
            break;
        case Kind::Linear:
            os << "linear(slope=" << slope << ")";
            break;
    }
    return os.str();
}

PhiEvaluator::PhiEvaluator(PhiSpec spec, double quad_rel_tol, double inverse_tol)
    : spec_(spec), quad_tol_(quad_rel_tol), inverse_tol_(inverse_tol) {
    if (spec_.kind == PhiSpec::Kind::SingularPower)
        closed_form_ = is_small_integer(spec_.a) && is_small_integer(spec_.b);
}

double PhiEvaluator::clamp_to_domain(double z) const {
    if (std::isnan(z)) throw DomainError("phi argument is NaN");
    if (std::isfinite(spec_.lo) && z <= spec_.lo)
        throw DomainError("argument at or below the left endpoint of I");
    if (std::isfinite(spec_.hi) && z >= spec_.hi)
        throw DomainError("argument at or above the right endpoint of I");
    double zc = z;
    if (std::isfinite(spec_.hi)) {
        const double guard = spec_.hi - kEndpointMargin * std::max(1.0, std::abs(spec_.hi));
        zc = std::min(zc, guard);
    }
    if (std::isfinite(spec_.lo)) {
        const double guard = spec_.lo + kEndpointMargin * std::max(1.0, std::abs(spec_.lo));
        zc = std::max(zc, guard);
    }
    return zc;
}

double PhiEvaluator::phi_nonneg(double z) const {
    // z in [0, hi) after clamping; singular_power only.
    if (closed_form_) {
        return singular_power_phi_closed(static_cast<int>(std::round(spec_.a)),
                                         static_cast<int>(std::round(spec_.b)), z);
    }
    const double a = spec_.a;
    const double b = spec_.b;
    return integrate_adaptive(
        [a, b](double t) { return std::pow(t, b) / std::pow(1.0 - t, a); }, 0.0, z,
        quad_tol_);
}

double PhiEvaluator::phi(double z) const {
    const double zc = clamp_to_domain(z);
    switch (spec_.kind) {
        case PhiSpec::Kind::Linear:
            return spec_.slope * zc;
        case PhiSpec::Kind::PorousMedium:
            return std::copysign(std::pow(std::abs(zc), spec_.m), zc);
        case PhiSpec::Kind::SingularPower:
            return zc >= 0.0 ? phi_nonneg(zc) : -phi_nonneg(-zc);
    }
    return 0.0;
}

double PhiEvaluator::phi_prime(double z) const {
    const double zc = clamp_to_domain(z);
    switch (spec_.kind) {
        case PhiSpec::Kind::Linear:
            return spec_.slope;
        case PhiSpec::Kind::PorousMedium:
            return spec_.m * std::pow(std::abs(zc), spec_.m - 1.0);
        case PhiSpec::Kind::SingularPower: {
            const double az = std::abs(zc);
            return std::pow(az, spec_.b) / std::pow(1.0 - az, spec_.a);
        }
    }
    return 0.0;
}

double PhiEvaluator::phi_inverse(double w) const {
    if (std::isnan(w)) throw DomainError("phi_inverse argument is NaN");
    switch (spec_.kind) {
        case PhiSpec::Kind::Linear:
            return w / spec_.slope;
        case PhiSpec::Kind::PorousMedium:
            return std::copysign(std::pow(std::abs(w), 1.0 / spec_.m), w);
        case PhiSpec::Kind::SingularPower:
            break;
    }
    if (w == 0.0) return 0.0;
    const double target = std::abs(w);
    const double tol_w = inverse_tol_ * (1.0 + target);

    // a = b = 1 solves phi(z) = -z - log(1-z) = w by plain Newton: phi is
    // convex on (0,1), the seed 1 - e^{-w-1} sits above the root and the
    // sqrt(2w) expansion covers small w. This case is every biofilm preset's
    // hot path; the bracketed search below handles the general exponents.
    if (closed_form_ && spec_.a == 1.0 && spec_.b == 1.0) {
        const double guard = 1.0 - kEndpointMargin;
        if (target >= -guard - std::log1p(-guard))
            return std::copysign(guard, w);
        double z = target < 0.01 ? std::sqrt(2.0 * target)
                                 : 1.0 - std::exp(-target - 1.0);
        z = std::min(z, guard);
        for (int it = 0; it < 60; ++it) {
            const double f = -z - std::log1p(-z) - target;
            const double d = z / (1.0 - z);
            if (!(d > 0.0)) break;
            double zn = z - f / d;
            if (zn <= 0.0) zn = 0.5 * z;
            if (zn > guard) zn = guard;
            const bool converged =
                std::abs(f) <= tol_w &&
                std::abs(zn - z) <= inverse_tol_ * (1.0 + std::abs(z));
            z = zn;
            if (converged) return std::copysign(z, w);
        }
        // fall through to the bracketed search on the rare stall
    }

    // Bracket [zlo, zhi] with phi(zhi) >= target, growing geometrically
    // toward the singular endpoint. When the bracket collides with the
    // endpoint guard the inverse saturates there: beta stays total and the
    // returned value is the closest admissible point in double precision.
    const double guard = 1.0 - kEndpointMargin;
    double zlo = 0.0;
    double zhi = 0.5;
    int budget = kInverseBudget;
    while (phi_nonneg(zhi) < target) {
        zlo = zhi;
        zhi = 1.0 - 0.5 * (1.0 - zhi);
        if (zhi >= guard) {
            if (phi_nonneg(guard) < target) return std::copysign(guard, w);
            zhi = guard;
            break;
        }
        if (--budget <= 0)
            throw ConvergenceError("phi_inverse bracketing budget exhausted",
                                   phi_nonneg(zhi) - target);
    }

    // Bisection with Newton refinement inside the bracket. Newton alone is
    // unsafe where phi' vanishes, so every Newton proposal must stay inside
    // the current bracket or the step falls back to bisection. Both the
    // w-residual and the bracket width must shrink below tolerance, the
    // latter keeping the round trip beta(phi(z)) ~ z tight where phi' ~ 0.
    double z = 0.5 * (zlo + zhi);
    for (; budget > 0; --budget) {
        const double fz = phi_nonneg(z) - target;
        if (std::abs(fz) <= tol_w &&
            zhi - zlo <= inverse_tol_ * (1.0 + std::abs(z)))
            return std::copysign(z, w);
        if (fz > 0.0)
            zhi = z;
        else
            zlo = z;
        const double width = zhi - zlo;
        const double dphi = std::pow(z, spec_.b) / std::pow(1.0 - z, spec_.a);
        double znext = (dphi > 0.0) ? z - fz / dphi : z;
        // Newton proposals that leave the bracket or barely move it stall the
        // width criterion near degenerate roots; fall back to bisection then.
        if (!(znext > zlo && znext < zhi) || std::abs(znext - z) < 0.25 * width)
            znext = 0.5 * (zlo + zhi);
        z = znext;
    }
    throw ConvergenceError("phi_inverse iteration budget exhausted",
                           phi_nonneg(z) - target);
}

double PhiEvaluator::primitive_nonneg(double z) const {
    // Phi(z) = z phi(z) - int_0^z t^{b+1}/(1-t)^a dt  (integration by parts).
    if (closed_form_) {
        const int a = static_cast<int>(std::round(spec_.a));
        const int b = static_cast<int>(std::round(spec_.b));
        return z * singular_power_phi_closed(a, b, z) -
               singular_power_phi_closed(a, b + 1, z);
    }
    const double a = spec_.a;
    const double b = spec_.b;
    const double tail = integrate_adaptive(
        [a, b](double t) { return std::pow(t, b + 1.0) / std::pow(1.0 - t, a); }, 0.0,
        z, quad_tol_);
    return z * phi_nonneg(z) - tail;
}

double PhiEvaluator::primitive(double z) const {
    const double zc = clamp_to_domain(z);
    switch (spec_.kind) {
        case PhiSpec::Kind::Linear:
            return 0.5 * spec_.slope * zc * zc;
        case PhiSpec::Kind::PorousMedium:
            return std::pow(std::abs(zc), spec_.m + 1.0) / (spec_.m + 1.0);
        case PhiSpec::Kind::SingularPower:
            return primitive_nonneg(std::abs(zc));  // Phi is even for odd phi
    }
    return 0.0;
}

double PhiEvaluator::energy_primitive(double z, double zbar) const {
    const double zc = clamp_to_domain(z);
    const double zbc = clamp_to_domain(zbar);
    // Phi(z;zbar) = Phi(z) - Phi(zbar) - phi(zbar) (z - zbar), nonnegative by
    // convexity of Phi; tiny negative round-off is truncated.
    const double rel =
        primitive(zc) - primitive(zbc) - phi(zbc) * (zc - zbc);
    return std::max(rel, 0.0);
}

double PhiEvaluator::transform_psi_star(const std::function<double(double)>& psi,
                                        double z, double zbar) const {
    const double zc = clamp_to_domain(z);
    const double zbc = clamp_to_domain(zbar);
    const double zeta_bar = phi(zbc);
    return integrate_adaptive(
        [&](double t) { return psi(phi(t) - zeta_bar); }, zbc, zc,
        std::max(quad_tol_, 1e-10));
}

void validate_hypotheses(const PhiEvaluator& eval, int samples) {
    const PhiSpec& s = eval.spec();
    const double lo = std::isfinite(s.lo) ? s.lo : -8.0;
    const double hi = std::isfinite(s.hi) ? s.hi : 8.0;
    const double pad = 1e-6 * (hi - lo);

    double prev_z = lo + pad;
    double prev_phi = eval.phi(prev_z);
    for (int i = 1; i < samples; ++i) {
        const double z = lo + pad + (hi - lo - 2 * pad) * i / (samples - 1.0);
        const double p = eval.phi(z);
        if (!(p > prev_phi))
            throw DomainError("(H1) violated: phi not strictly increasing");
        // (H3): convex right of z0, concave left of z0, checked via phi'.
        if (prev_z >= s.z0 || z <= s.z0) {
            const double dp = eval.phi_prime(z) - eval.phi_prime(prev_z);
            if (z > s.z0 && dp < -1e-9)
                throw DomainError("(H3) violated: phi' decreasing right of z0");
            if (z <= s.z0 && dp > 1e-9)
                throw DomainError("(H3) violated: phi' increasing left of z0");
        }
        prev_z = z;
        prev_phi = p;
    }
    if (std::abs(eval.phi(0.0)) > 1e-12)
        throw DomainError("normalization violated: phi(0) != 0");
    // (H2): surjectivity. For a bounded interval phi must diverge toward the
    // endpoint; approaching it by decades must keep growing the value (also
    // catches the slow logarithmic blow-up at a = 1). Unbounded intervals
    // are onto by monotone growth.
    if (s.bounded()) {
        const double v1 = eval.phi(s.hi - 1e-6 * (s.hi - s.lo));
        const double v2 = eval.phi(s.hi - 1e-12 * (s.hi - s.lo));
        if (!(v2 > 1.5 * std::max(v1, 0.0) && v2 > 1.0))
            throw DomainError("(H2) violated: phi does not blow up at the endpoint");
    }
}

} // namespace degensim
