#pragma once

// Finite-difference residual checks: applies the infinitesimal generator by
// central differences and evaluates the residual of candidate functions in
// the Levy-area PDE and in the general characteristic-function PDE of the
// lifted process.

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sigcf/diffusion.hpp"
#include "sigcf/matrix.hpp"
#include "sigcf/tensor.hpp"

namespace sigcf {

using cplx = std::complex<double>;

struct Stencil {
    double h_t = 1e-3;
    double h_x = 1e-3;

    void validate() const {
        if (!(h_t > 0.0) || !(h_x > 0.0)) throw std::invalid_argument("Stencil: steps must be positive");
    }
};

using ScalarField = std::function<cplx(const Vec&)>;          // x -> f(x)
using SpaceTimeField = std::function<cplx(double, const Vec&)>;  // (t, x) -> f(t, x)

namespace fd {

inline cplx d1(const ScalarField& f, Vec x, std::size_t i, double h) {
    const double xi = x[i];
    x[i] = xi + h;
    const cplx fp = f(x);
    x[i] = xi - h;
    const cplx fm = f(x);
    return (fp - fm) / (2.0 * h);
}

inline cplx d2(const ScalarField& f, Vec x, std::size_t i, double h, cplx f0) {
    const double xi = x[i];
    x[i] = xi + h;
    const cplx fp = f(x);
    x[i] = xi - h;
    const cplx fm = f(x);
    return (fp - 2.0 * f0 + fm) / (h * h);
}

// four-point stencil for the mixed partial d^2 f / dx_i dx_j, i != j
inline cplx d2_mixed(const ScalarField& f, Vec x, std::size_t i, std::size_t j, double h) {
    const double xi = x[i], xj = x[j];
    x[i] = xi + h; x[j] = xj + h;
    const cplx fpp = f(x);
    x[i] = xi + h; x[j] = xj - h;
    const cplx fpm = f(x);
    x[i] = xi - h; x[j] = xj + h;
    const cplx fmp = f(x);
    x[i] = xi - h; x[j] = xj - h;
    const cplx fmm = f(x);
    return (fpp - fpm - fmp + fmm) / (4.0 * h * h);
}

inline cplx dt(const SpaceTimeField& f, double t, const Vec& x, double h) {
    return (f(t + h, x) - f(t - h, x)) / (2.0 * h);
}

}  // namespace fd

// A f = sum_i mu_i df/dx_i + 1/2 sum_{j1 j2} b_{j1 j2} d2f/dx_{j1} dx_{j2}
inline cplx generator_apply(const ScalarField& f, const Vec& mu, const Mat& b, const Vec& x, const Stencil& st) {
    st.validate();
    const std::size_t m = x.size();
    if (mu.size() != m || b.rows != static_cast<int>(m) || b.cols != static_cast<int>(m))
        throw std::invalid_argument("generator_apply: shape mismatch");
    const cplx f0 = f(x);
    cplx acc{};
    for (std::size_t i = 0; i < m; ++i)
        if (mu[i] != 0.0) acc += mu[i] * fd::d1(f, x, i, st.h_x);
    for (std::size_t j1 = 0; j1 < m; ++j1)
        for (std::size_t j2 = 0; j2 < m; ++j2) {
            const double bij = b(static_cast<int>(j1), static_cast<int>(j2));
            if (bij == 0.0) continue;
            const cplx der = (j1 == j2) ? fd::d2(f, x, j1, st.h_x, f0) : fd::d2_mixed(f, x, j1, j2, st.h_x);
            acc += 0.5 * bij * der;
        }
    return acc;
}

// residual split used by both PDE checks; the total is the plain sum
struct ResidualTerms {
    cplx time_term{};
    cplx generator_term{};
    cplx first_order_term{};
    cplx zeroth_order_term{};

    cplx total() const { return time_term + generator_term + first_order_term + zeroth_order_term; }
};

// (-d/dt + 1/2 Laplacian) f + (i/2) sum_j (w^T Lambda)_j df/dw_j
//   - (1/8) w^T Lambda Lambda^T w f
inline ResidualTerms residual_levy_pde_terms(double t, const Vec& w, const Mat& Lambda, const SpaceTimeField& f,
                                             const Stencil& st) {
    st.validate();
    const int d = Lambda.rows;
    if (static_cast<int>(w.size()) != d) throw std::invalid_argument("residual_levy_pde: w dimension mismatch");
    ResidualTerms r;
    r.time_term = -fd::dt(f, t, w, st.h_t);

    ScalarField fx = [&](const Vec& x) { return f(t, x); };
    const cplx f0 = fx(w);
    cplx lap{};
    for (std::size_t i = 0; i < w.size(); ++i) lap += fd::d2(fx, w, i, st.h_x, f0);
    r.generator_term = 0.5 * lap;

    Vec wl(static_cast<std::size_t>(d), 0.0);  // (w^T Lambda)_j
    for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += w[static_cast<std::size_t>(i)] * Lambda(i, j);
        wl[static_cast<std::size_t>(j)] = s;
    }
    cplx fo{};
    for (std::size_t j = 0; j < w.size(); ++j)
        if (wl[j] != 0.0) fo += wl[j] * fd::d1(fx, w, j, st.h_x);
    r.first_order_term = cplx(0.0, 0.5) * fo;

    const double q = dot(wl, wl);  // w^T Lambda Lambda^T w
    r.zeroth_order_term = -0.125 * q * f0;
    return r;
}

inline cplx residual_levy_pde(double t, const Vec& w, const Mat& Lambda, const SpaceTimeField& f, const Stencil& st) {
    return residual_levy_pde_terms(t, w, Lambda, f, st).total();
}

// Coefficients of the general PDE at a point of T^{n-1}(E): the candidate f
// is a function of (t, flat T^{n-1} coordinates). The lifted drift and the
// sigma columns are evaluated exactly; only f is differenced.
inline ResidualTerms residual_general_pde_terms(const LiftedDiffusion& L, const TruncatedTensor<double>& lambda,
                                                const SpaceTimeField& f, double t, const Vec& xcoords,
                                                const Stencil& st) {
    st.validate();
    const int d = L.base().d;
    const int n = L.truncation_degree();
    const std::size_t dim_low = dim_truncated(d, n - 1);
    if (xcoords.size() != dim_low) throw std::invalid_argument("residual_general_pde: expected T^{n-1} coordinates");
    if (lambda.dim_d() != d || lambda.degree_n() != n)
        throw std::invalid_argument("residual_general_pde: lambda shape mismatch");

    // embed the T^{n-1} point into T^n with zero top degree (the PDE domain
    // reflects top-degree independence)
    TruncatedTensor<double> xt(d, n);
    for (std::size_t i = 0; i < dim_low; ++i) xt[i] = xcoords[i];

    const TruncatedTensor<double> mu_n = L.drift(xt);
    const int dp = L.base().d_prime;
    std::vector<TruncatedTensor<double>> cols;
    cols.reserve(static_cast<std::size_t>(dp));
    for (int k = 0; k < dp; ++k) cols.push_back(L.sigma_col(xt, k));

    // M_lambda compositions
    const double c1 = pair(lambda, mu_n);
    std::vector<double> s(static_cast<std::size_t>(dp));
    for (int k = 0; k < dp; ++k) s[static_cast<std::size_t>(k)] = pair(lambda, cols[static_cast<std::size_t>(k)]);
    double c2 = 0.0;
    for (double sk : s) c2 += sk * sk;
    Vec beta(dim_low, 0.0);  // (M_lambda o b_n^{(.,j)})(x) over the T^{n-1} coordinates
    for (int k = 0; k < dp; ++k)
        for (std::size_t j = 0; j < dim_low; ++j) beta[j] += s[static_cast<std::size_t>(k)] * cols[static_cast<std::size_t>(k)][j];

    // generator coefficients over the T^{n-1} coordinates
    Vec mu_low(dim_low, 0.0);
    for (std::size_t j = 0; j < dim_low; ++j) mu_low[j] = mu_n[j];
    Mat b_low(static_cast<int>(dim_low), static_cast<int>(dim_low));
    for (int k = 0; k < dp; ++k)
        for (std::size_t j1 = 0; j1 < dim_low; ++j1) {
            const double v1 = cols[static_cast<std::size_t>(k)][j1];
            if (v1 == 0.0) continue;
            for (std::size_t j2 = 0; j2 < dim_low; ++j2)
                b_low(static_cast<int>(j1), static_cast<int>(j2)) += v1 * cols[static_cast<std::size_t>(k)][j2];
        }

    ScalarField fx = [&](const Vec& x) { return f(t, x); };
    const cplx f0 = fx(xcoords);

    ResidualTerms r;
    r.time_term = -fd::dt(f, t, xcoords, st.h_t);
    r.generator_term = generator_apply(fx, mu_low, b_low, xcoords, st);
    cplx fo = c1 * f0;
    for (std::size_t j = 0; j < dim_low; ++j)
        if (beta[j] != 0.0) fo += beta[j] * fd::d1(fx, xcoords, j, st.h_x);
    r.first_order_term = cplx(0.0, 1.0) * fo;
    r.zeroth_order_term = -0.5 * c2 * f0;
    return r;
}

inline cplx residual_general_pde(const LiftedDiffusion& L, const TruncatedTensor<double>& lambda,
                                 const SpaceTimeField& f, double t, const Vec& xcoords, const Stencil& st) {
    return residual_general_pde_terms(L, lambda, f, t, xcoords, st).total();
}

struct GridPointResidual {
    double t = 0.0;
    Vec x;
    ResidualTerms terms;
};

struct ResidualReport {
    std::vector<GridPointResidual> points;
    double max_abs = 0.0;
    double mean_abs = 0.0;

    void finalize() {
        max_abs = 0.0;
        mean_abs = 0.0;
        for (const auto& p : points) {
            const double a = std::abs(p.terms.total());
            max_abs = std::max(max_abs, a);
            mean_abs += a;
        }
        if (!points.empty()) mean_abs /= static_cast<double>(points.size());
    }
};

// tensor grid t in t_values, w per-coordinate in coord_values
inline ResidualReport residual_report_levy(const Mat& Lambda, const SpaceTimeField& f,
                                           const std::vector<double>& t_values, const std::vector<double>& coord_values,
                                           const Stencil& st) {
    const int d = Lambda.rows;
    ResidualReport rep;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    const std::size_t nv = coord_values.size();
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= nv;
    for (double t : t_values) {
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            Vec w(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) {
                w[static_cast<std::size_t>(i)] = coord_values[rem % nv];
                rem /= nv;
            }
            GridPointResidual g;
            g.t = t;
            g.x = w;
            g.terms = residual_levy_pde_terms(t, w, Lambda, f, st);
            rep.points.push_back(std::move(g));
        }
    }
    rep.finalize();
    return rep;
}

}  // namespace sigcf
