#include "degensim/quadrature.hpp"

#include <array>
#include <cmath>
#include <stack>

namespace degensim {
namespace {

// Kronrod-15 abscissae on [-1,1] (nonnegative half) and weights,
// with the embedded Gauss-7 weights on the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult gauss_kronrod_15(const std::function<double(double)>& f,
                             double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(center);
    double gauss = kWg[3] * fc;
    double kronrod = kWgk[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    gauss *= half;
    kronrod *= half;
    return {kronrod, std::abs(kronrod - gauss)};
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b,
                          double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    struct Panel {
        double a, b;
        double value, err;
        int depth;
    };

    PanelResult whole = gauss_kronrod_15(f, a, b);
    const double scale = std::max(std::abs(whole.kronrod), 1e-30);

    std::stack<Panel> work;
    work.push({a, b, whole.kronrod, whole.err, 0});
    double total = 0.0;
    constexpr int kMaxDepth = 60;

    while (!work.empty()) {
        Panel p = work.top();
        work.pop();
        const double local_tol =
            std::max(abs_tol, rel_tol * scale) * (p.b - p.a) / (b - a);
        if (p.err <= local_tol || p.depth >= kMaxDepth) {
            total += p.value;
            continue;
        }
        const double mid = 0.5 * (p.a + p.b);
        PanelResult left = gauss_kronrod_15(f, p.a, mid);
        PanelResult right = gauss_kronrod_15(f, mid, p.b);
        work.push({p.a, mid, left.kronrod, left.err, p.depth + 1});
        work.push({mid, p.b, right.kronrod, right.err, p.depth + 1});
    }
    return sign * total;
}

} // namespace degensim
