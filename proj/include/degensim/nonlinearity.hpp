#ifndef DEGENSIM_NONLINEARITY_HPP
#define DEGENSIM_NONLINEARITY_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "degensim/errors.hpp"

namespace degensim {

/// Structural nonlinearity phi of the diffusion term.
///
/// Supported families:
///   singular_power(a,b) : phi'(z) = |z|^b / (1-|z|)^a on I = (-1,1),
///                         extended anti-symmetrically, phi(+-1) = +-inf;
///   porous_medium(m)    : phi(z) = sign(z) |z|^m on I = R;
///   linear(slope)       : phi(z) = slope * z on I = R.
/// All presets are strictly increasing, onto R, with phi(0) = 0 and
/// inflection at z0 = 0 (convex right of it, concave left of it).
struct PhiSpec {
    enum class Kind { SingularPower, PorousMedium, Linear };

    Kind kind = Kind::Linear;
    double a = 1.0;      // singular exponent, a >= 1
    double b = 1.0;      // degeneracy exponent, b > 0
    double m = 2.0;      // porous-medium exponent, m > 1
    double slope = 1.0;  // linear slope, > 0
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double z0 = 0.0;     // inflection point

    static PhiSpec singular_power(double a, double b);
    static PhiSpec porous_medium(double m);
    static PhiSpec linear(double slope);

    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool degenerate() const { return kind != Kind::Linear; }
    std::string name() const;
};

/// Evaluates phi, phi', the primitive Phi, the inverse beta = phi^{-1} and
/// the transform Psi*(z;zbar). Immutable after construction; safe to share
/// across threads.
class PhiEvaluator {
public:
    explicit PhiEvaluator(PhiSpec spec,
                          double quad_rel_tol = 1e-12,
                          double inverse_tol = 1e-10);

    const PhiSpec& spec() const { return spec_; }
    double quad_tol() const { return quad_tol_; }
    double inverse_tol() const { return inverse_tol_; }

    /// phi(z). DomainError for z outside I or at a finite endpoint.
    double phi(double z) const;

    /// phi'(z) >= 0.
    double phi_prime(double z) const;

    /// beta(w) = phi^{-1}(w), total on R, values strictly inside I.
    /// ConvergenceError if the bracketing iteration exhausts its budget.
    double phi_inverse(double w) const;

    /// Absolute energy density Phi(z) = int_0^z phi.
    double primitive(double z) const;

    /// Relative energy density Phi(z;zbar) = int_zbar^z (phi - phi(zbar)) >= 0.
    double energy_primitive(double z, double zbar) const;

    /// Psi*(z;zbar) = int_zbar^z psi(phi(t) - phi(zbar)) dt by quadrature.
    double transform_psi_star(const std::function<double(double)>& psi,
                              double z, double zbar) const;

    /// Clamps z into I shrunk by the endpoint guard margin; DomainError if z
    /// lies outside the closed interval.
    double clamp_to_domain(double z) const;

private:
    double phi_nonneg(double z) const;       // z in [0, hi), closed form or quadrature
    double primitive_nonneg(double z) const;

    PhiSpec spec_;
    double quad_tol_;
    double inverse_tol_;
    bool closed_form_ = false;  // integer singular exponents
};

/// Qualitative validation of the structural hypotheses: monotone sampling for
/// (H1), endpoint blow-up of the primitive family for (H2), convexity split at
/// z0 for (H3). Throws DomainError with the violated hypothesis name.
void validate_hypotheses(const PhiEvaluator& eval, int samples = 256);

} // namespace degensim

#endif
