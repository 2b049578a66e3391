#ifndef DEGENSIM_REACTIONS_HPP
#define DEGENSIM_REACTIONS_HPP

#include <functional>
#include <string>
#include <utility>

#include "degensim/errors.hpp"

namespace degensim {

/// Reaction-term presets and hypothesis validation.
///
/// Presets:
///   none           : f = 0
///   porous_fischer : f(u) = u (1 - u)
///   biofilm        : f(u,v) = -K2 u + K3 u v / (K4 + v),
///                    g(u,v) = -K1 u v / (K4 + v)
///                    (scalar use freezes v at `frozen_v`)
///   custom         : user closures with a sampling box
///
/// Biofilm evaluation clamps u into [0, 1-1e-14] and v into [0, 1], the
/// constant extension used to make the Lipschitz bound global; Picard
/// iterates may transiently exit the box on coarse grids.
struct ReactionSpec {
    enum class Kind { None, PorousFischer, Biofilm, Custom };

    Kind kind = Kind::None;
    double K1 = 1.0, K2 = 1.0, K3 = 1.0, K4 = 1.0;
    bool coupled = false;    // biofilm only: coupled (f,g) vs scalar frozen-v
    double frozen_v = 1.0;   // scalar biofilm freeze value
    double L_override = -1.0;  // declared Lipschitz constant; <0 means derive

    // Custom closures and their sampling box (u in [u_lo,u_hi], v likewise).
    std::function<double(double u, double v)> custom_f;
    std::function<double(double u, double v)> custom_g;
    double box_u_lo = 0.0, box_u_hi = 1.0;
    double box_v_lo = 0.0, box_v_hi = 1.0;

    static ReactionSpec none();
    static ReactionSpec porous_fischer();
    static ReactionSpec biofilm(double K1, double K2, double K3, double K4,
                                bool coupled = true);
    static ReactionSpec biofilm_scalar(double K1, double K2, double K3, double K4,
                                       double frozen_v = 1.0);

    std::string name() const;
};

/// Scalar reaction value f(x, t, u); presets are autonomous.
double eval_scalar(const ReactionSpec& spec, double x, double t, double u);

/// Coupled reaction pair (f, g)(x, t, u, v).
std::pair<double, double> eval_coupled(const ReactionSpec& spec, double x,
                                       double t, double u, double v);

/// Partial derivatives used by the Newton linearization; analytic for
/// presets, central differences (step 1e-6) for custom closures.
double scalar_df_du(const ReactionSpec& spec, double x, double t, double u);
double coupled_df_du(const ReactionSpec& spec, double u, double v);
double coupled_dg_dv(const ReactionSpec& spec, double u, double v);

/// Uniform Lipschitz constant over the declared box: suprema of partial
/// derivatives for presets, sampled max difference quotient * 1.1 for custom.
double lipschitz_bound(const ReactionSpec& spec);

/// Supremum of |f| over the declared box (the barrier constant c1).
double sup_abs_scalar(const ReactionSpec& spec);

/// Sign-condition report for coupled reactions on a 101x101 (u,v) lattice:
/// f(.,0,v) >= 0, g(.,u,0) >= 0 and g(.,u,1) <= 1.  `g_nonpositive_at_v1`
/// additionally records whether the stronger condition g(.,u,1) <= 0 holds;
/// the pass/fail verdict uses only the three literal conditions.
struct SignReport {
    bool pass = true;
    double worst_margin = 0.0;       // max violation over the lattice
    double min_f_at_u0 = 0.0;
    double min_g_at_v0 = 0.0;
    double max_g_at_v1 = 0.0;
    bool g_nonpositive_at_v1 = true;
};

SignReport check_sign_hypotheses(const ReactionSpec& spec);

} // namespace degensim

#endif
