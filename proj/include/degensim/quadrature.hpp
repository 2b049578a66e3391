#ifndef DEGENSIM_QUADRATURE_HPP
#define DEGENSIM_QUADRATURE_HPP

#include <functional>

namespace degensim {

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a,b].
///
/// Subintervals are bisected until the local error estimate fits within the
/// width-proportional share of the requested tolerance. Integrands may be
/// steep near an endpoint (the singular-power nonlinearity evaluated close
/// to the blow-up point); the recursion depth cap is generous for that case.
double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 1e-300);

} // namespace degensim

#endif
