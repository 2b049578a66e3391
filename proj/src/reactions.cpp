#include "degensim/reactions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace degensim {
namespace {

constexpr double kBoxGuard = 1e-14;
constexpr double kFdStep = 1e-6;

double clamp_u(double u) { return std::clamp(u, 0.0, 1.0 - kBoxGuard); }
double clamp_v(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

ReactionSpec ReactionSpec::none() { return ReactionSpec{}; }

ReactionSpec ReactionSpec::porous_fischer() {
    ReactionSpec s;
    s.kind = Kind::PorousFischer;
    return s;
}

ReactionSpec ReactionSpec::biofilm(double K1, double K2, double K3, double K4,
                                   bool coupled) {
    if (!(K4 > 0.0)) throw DomainError("biofilm requires K4 > 0");
    if (K1 < 0.0 || K2 < 0.0 || K3 < 0.0)
        throw DomainError("biofilm requires K1..K3 >= 0");
    ReactionSpec s;
    s.kind = Kind::Biofilm;
    s.K1 = K1;
    s.K2 = K2;
    s.K3 = K3;
    s.K4 = K4;
    s.coupled = coupled;
    return s;
}

ReactionSpec ReactionSpec::biofilm_scalar(double K1, double K2, double K3,
                                          double K4, double frozen_v) {
    ReactionSpec s = biofilm(K1, K2, K3, K4, false);
    s.frozen_v = frozen_v;
    return s;
}

std::string ReactionSpec::name() const {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::PorousFischer: return "porous_fischer";
        case Kind::Biofilm: {
            std::ostringstream os;
            os << (coupled ? "biofilm" : "biofilm_scalar") << "(K1=" << K1
               << ",K2=" << K2 << ",K3=" << K3 << ",K4=" << K4 << ")";
            return os.str();
        }
        case Kind::Custom: return "custom";
    }
    return "?";
}

double eval_scalar(const ReactionSpec& spec, double x, double t, double u) {
    (void)x;
    (void)t;
    if (std::isnan(u)) throw DomainError("reaction argument is NaN");
    switch (spec.kind) {
        case ReactionSpec::Kind::None:
            return 0.0;
        case ReactionSpec::Kind::PorousFischer: {
            const double uc = std::clamp(u, 0.0, 1.0);
            return uc * (1.0 - uc);
        }
        case ReactionSpec::Kind::Biofilm: {
            const double uc = clamp_u(u);
            const double vc = clamp_v(spec.frozen_v);
            return -spec.K2 * uc + spec.K3 * uc * vc / (spec.K4 + vc);
        }
        case ReactionSpec::Kind::Custom: {
            const double uc = std::clamp(u, spec.box_u_lo, spec.box_u_hi);
            return spec.custom_f(uc, spec.frozen_v);
        }
    }
    return 0.0;
}

std::pair<double, double> eval_coupled(const ReactionSpec& spec, double x,
                                       double t, double u, double v) {
    (void)x;
    (void)t;
    if (std::isnan(u) || std::isnan(v))
        throw DomainError("reaction argument is NaN");
    switch (spec.kind) {
        case ReactionSpec::Kind::Biofilm: {
            const double uc = clamp_u(u);
            const double vc = clamp_v(v);
            const double monod = vc / (spec.K4 + vc);
            return {-spec.K2 * uc + spec.K3 * uc * monod, -spec.K1 * uc * monod};
        }
        case ReactionSpec::Kind::Custom: {
            const double uc = std::clamp(u, spec.box_u_lo, spec.box_u_hi);
            const double vc = std::clamp(v, spec.box_v_lo, spec.box_v_hi);
            return {spec.custom_f ? spec.custom_f(uc, vc) : 0.0,
                    spec.custom_g ? spec.custom_g(uc, vc) : 0.0};
        }
        case ReactionSpec::Kind::None:
            return {0.0, 0.0};
        case ReactionSpec::Kind::PorousFischer:
            return {eval_scalar(spec, x, t, u), 0.0};
    }
    return {0.0, 0.0};
}

double scalar_df_du(const ReactionSpec& spec, double x, double t, double u) {
    switch (spec.kind) {
        case ReactionSpec::Kind::None:
            return 0.0;
        case ReactionSpec::Kind::PorousFischer:
            return 1.0 - 2.0 * std::clamp(u, 0.0, 1.0);
        case ReactionSpec::Kind::Biofilm: {
            const double vc = clamp_v(spec.frozen_v);
            return -spec.K2 + spec.K3 * vc / (spec.K4 + vc);
        }
        case ReactionSpec::Kind::Custom:
            return (eval_scalar(spec, x, t, u + kFdStep) -
                    eval_scalar(spec, x, t, u - kFdStep)) /
                   (2.0 * kFdStep);
    }
    return 0.0;
}

double coupled_df_du(const ReactionSpec& spec, double u, double v) {
    if (spec.kind == ReactionSpec::Kind::Biofilm) {
        const double vc = clamp_v(v);
        return -spec.K2 + spec.K3 * vc / (spec.K4 + vc);
    }
    return (eval_coupled(spec, 0, 0, u + kFdStep, v).first -
            eval_coupled(spec, 0, 0, u - kFdStep, v).first) /
           (2.0 * kFdStep);
}

double coupled_dg_dv(const ReactionSpec& spec, double u, double v) {
    if (spec.kind == ReactionSpec::Kind::Biofilm) {
        const double uc = clamp_u(u);
        const double vc = clamp_v(v);
        const double d = spec.K4 + vc;
        return -spec.K1 * uc * spec.K4 / (d * d);
    }
    return (eval_coupled(spec, 0, 0, u, v + kFdStep).second -
            eval_coupled(spec, 0, 0, u, v - kFdStep).second) /
           (2.0 * kFdStep);
}

double lipschitz_bound(const ReactionSpec& spec) {
    if (spec.L_override >= 0.0) return spec.L_override;
    switch (spec.kind) {
        case ReactionSpec::Kind::None:
            return 0.0;
        case ReactionSpec::Kind::PorousFischer:
            return 1.0;  // sup |1 - 2u| on [0,1]
        case ReactionSpec::Kind::Biofilm: {
            const double monod1 = spec.K3 / (spec.K4 + 1.0);
            if (!spec.coupled) {
                const double vc = clamp_v(spec.frozen_v);
                return std::abs(-spec.K2 + spec.K3 * vc / (spec.K4 + vc));
            }
            // |df/du| peaks at v in {0,1}; |df/dv| and |dg/dv| at v=0, u=1;
            // |dg/du| at v=1. The bound couples (u,v) columns of the pair.
            const double df_du = std::max(spec.K2, std::abs(monod1 - spec.K2));
            const double df_dv = spec.K3 / spec.K4;
            const double dg_du = spec.K1 / (spec.K4 + 1.0);
            const double dg_dv = spec.K1 / spec.K4;
            return std::max(df_du + dg_du, df_dv + dg_dv);
        }
        case ReactionSpec::Kind::Custom: {
            // Sampled max difference quotient with a 10% safety factor.
            std::mt19937_64 rng(0x5eedbull);
            std::uniform_real_distribution<double> du(spec.box_u_lo, spec.box_u_hi);
            std::uniform_real_distribution<double> dv(spec.box_v_lo, spec.box_v_hi);
            double worst = 0.0;
            for (int i = 0; i < 20000; ++i) {
                const double u1 = du(rng), u2 = du(rng);
                const double v1 = dv(rng), v2 = dv(rng);
                const double den = std::abs(u1 - u2) + std::abs(v1 - v2);
                if (den < 1e-12) continue;
                const auto [f1, g1] = eval_coupled(spec, 0, 0, u1, v1);
                const auto [f2, g2] = eval_coupled(spec, 0, 0, u2, v2);
                worst = std::max(worst,
                                 (std::abs(f1 - f2) + std::abs(g1 - g2)) / den);
            }
            return worst * 1.1;
        }
    }
    return 0.0;
}

double sup_abs_scalar(const ReactionSpec& spec) {
    switch (spec.kind) {
        case ReactionSpec::Kind::None:
            return 0.0;
        case ReactionSpec::Kind::PorousFischer:
            return 0.25;  // max of u(1-u) on [0,1]
        case ReactionSpec::Kind::Biofilm: {
            if (!spec.coupled) {
                // f is linear in u on [0,1): extremes at the interval ends.
                const double vc = clamp_v(spec.frozen_v);
                return std::abs(-spec.K2 + spec.K3 * vc / (spec.K4 + vc));
            }
            const double monod1 = spec.K3 / (spec.K4 + 1.0);
            return std::max(spec.K2, monod1);
        }
        case ReactionSpec::Kind::Custom: {
            double worst = 0.0;
            for (int i = 0; i <= 200; ++i)
                for (int j = 0; j <= 200; ++j) {
                    const double u = spec.box_u_lo +
                                     (spec.box_u_hi - spec.box_u_lo) * i / 200.0;
                    const double v = spec.box_v_lo +
                                     (spec.box_v_hi - spec.box_v_lo) * j / 200.0;
                    worst = std::max(worst,
                                     std::abs(eval_coupled(spec, 0, 0, u, v).first));
                }
            return worst;
        }
    }
    return 0.0;
}

SignReport check_sign_hypotheses(const ReactionSpec& spec) {
    SignReport rep;
    rep.min_f_at_u0 = std::numeric_limits<double>::infinity();
    rep.min_g_at_v0 = std::numeric_limits<double>::infinity();
    rep.max_g_at_v1 = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
        const double s = i / 100.0;
        const double u = std::min(s, 1.0 - kBoxGuard);
        rep.min_f_at_u0 = std::min(rep.min_f_at_u0,
                                   eval_coupled(spec, 0, 0, 0.0, s).first);
        rep.min_g_at_v0 = std::min(rep.min_g_at_v0,
                                   eval_coupled(spec, 0, 0, u, 0.0).second);
        rep.max_g_at_v1 = std::max(rep.max_g_at_v1,
                                   eval_coupled(spec, 0, 0, u, 1.0).second);
    }
    double violation = 0.0;
    violation = std::max(violation, -rep.min_f_at_u0);
    violation = std::max(violation, -rep.min_g_at_v0);
    violation = std::max(violation, rep.max_g_at_v1 - 1.0);
    rep.worst_margin = violation;
    rep.pass = violation <= 0.0;
    rep.g_nonpositive_at_v1 = rep.max_g_at_v1 <= 0.0;
    return rep;
}

} // namespace degensim
