#pragma once

// Expected signatures of constant-coefficient diffusions as closed-form
// polynomials in t, and Taylor reconstruction of the characteristic function
// of the lifted process from the recursive PDE. The recursion is solved
// exactly: every iterate is a polynomial in the T^{n-1} coordinates with
// polynomial-in-t coefficients, and the generator strictly reduces the
// graded weight, so Duhamel iteration terminates.

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "sigcf/matrix.hpp"
#include "sigcf/tensor.hpp"

namespace sigcf {

// Phi_m(t) as a polynomial of degree <= m in t with degree-m tensor blocks
// as coefficients; Phi_0 = 1 and Phi_m(0) = 0 for m >= 1.
struct ExpectedSignatureSeries {
    int d = 1;
    int n = 0;
    // phi[m][k] = t^k coefficient block of the degree-m part, length d^m
    std::vector<std::vector<std::vector<double>>> phi;

    TruncatedTensor<double> eval(double t) const {
        TruncatedTensor<double> out(d, n);
        for (int m = 0; m <= n; ++m) {
            const std::size_t off = degree_offset(d, m);
            double tk = 1.0;
            for (std::size_t k = 0; k < phi[static_cast<std::size_t>(m)].size(); ++k) {
                const auto& blk = phi[static_cast<std::size_t>(m)][k];
                for (std::size_t i = 0; i < blk.size(); ++i) out[off + i] += tk * blk[i];
                tk *= t;
            }
        }
        return out;
    }
};

// d Phi_m / dt = mu_hat ox Phi_{m-1} + 1/2 b_hat ox Phi_{m-2}, integrated
// termwise; equals pi^n(exp(t (mu_hat + 1/2 b_hat))).
inline ExpectedSignatureSeries expected_signature_const_coeff(const Vec& mu, const Mat& b, int n) {
    if (n < 0) throw std::invalid_argument("expected_signature_const_coeff: n must be >= 0");
    const int d = static_cast<int>(mu.size());
    if (b.rows != d || b.cols != d) throw std::invalid_argument("expected_signature_const_coeff: b must be d x d");

    ExpectedSignatureSeries s;
    s.d = d;
    s.n = n;
    s.phi.resize(static_cast<std::size_t>(n) + 1);
    s.phi[0] = {{1.0}};

    std::size_t blk = 1;
    for (int m = 1; m <= n; ++m) {
        blk *= static_cast<std::size_t>(d);
        const std::size_t blk1 = blk / static_cast<std::size_t>(d);  // d^{m-1}
        const std::size_t blk2 = (m >= 2) ? blk1 / static_cast<std::size_t>(d) : 0;
        std::size_t kmax = s.phi[static_cast<std::size_t>(m - 1)].size();
        if (m >= 2) kmax = std::max(kmax, s.phi[static_cast<std::size_t>(m - 2)].size());
        std::vector<std::vector<double>> out(kmax + 1, std::vector<double>(blk, 0.0));
        for (std::size_t k = 0; k < kmax; ++k) {
            auto& dst = out[k + 1];
            const double inv = 1.0 / static_cast<double>(k + 1);
            if (k < s.phi[static_cast<std::size_t>(m - 1)].size()) {
                const auto& a = s.phi[static_cast<std::size_t>(m - 1)][k];
                for (int j = 0; j < d; ++j) {
                    const double mj = mu[static_cast<std::size_t>(j)] * inv;
                    if (mj == 0.0) continue;
                    for (std::size_t i = 0; i < blk1; ++i) dst[static_cast<std::size_t>(j) * blk1 + i] += mj * a[i];
                }
            }
            if (m >= 2 && k < s.phi[static_cast<std::size_t>(m - 2)].size()) {
                const auto& a = s.phi[static_cast<std::size_t>(m - 2)][k];
                for (int j1 = 0; j1 < d; ++j1)
                    for (int j2 = 0; j2 < d; ++j2) {
                        const double bj = 0.5 * b(j1, j2) * inv;
                        if (bj == 0.0) continue;
                        const std::size_t base = static_cast<std::size_t>(j1 * d + j2) * blk2;
                        for (std::size_t i = 0; i < blk2; ++i) dst[base + i] += bj * a[i];
                    }
            }
        }
        // drop trailing all-zero t-powers
        while (out.size() > 1) {
            bool zero = true;
            for (double v : out.back())
                if (v != 0.0) { zero = false; break; }
            if (!zero) break;
            out.pop_back();
        }
        s.phi[static_cast<std::size_t>(m)] = std::move(out);
    }
    return s;
}

namespace taylor_detail {

using TPoly = std::vector<double>;  // coefficients in t, ascending powers

inline void tpoly_axpy(TPoly& dst, double a, const TPoly& src) {
    if (dst.size() < src.size()) dst.resize(src.size(), 0.0);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += a * src[i];
}

inline TPoly tpoly_integrate(const TPoly& p) {
    TPoly out(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) out[k + 1] = p[k] / static_cast<double>(k + 1);
    return out;
}

inline double tpoly_eval(const TPoly& p, double t) {
    double v = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) v = v * t + p[k];
    return v;
}

// polynomial over the non-scalar T^{n-1} coordinates, t-polynomial coefficients
struct XPoly {
    std::map<std::vector<int>, TPoly> terms;

    bool empty() const { return terms.empty(); }
};

// dst += c * x^add * src
inline void xpoly_axpy_mono(XPoly& dst, const std::vector<int>& add, double c, const XPoly& src) {
    if (c == 0.0) return;
    for (const auto& [e, tp] : src.terms) {
        std::vector<int> key = e;
        for (std::size_t i = 0; i < add.size(); ++i) key[i] += add[i];
        tpoly_axpy(dst.terms[key], c, tp);
    }
}

struct SimpleMono {
    std::vector<int> exps;
    double coeff;
};
using SimplePoly = std::vector<SimpleMono>;

inline void xpoly_axpy_simple(XPoly& dst, const SimplePoly& p, const XPoly& src) {
    for (const auto& mono : p) xpoly_axpy_mono(dst, mono.exps, mono.coeff, src);
}

inline XPoly xpoly_dx(const XPoly& u, std::size_t var) {
    XPoly out;
    for (const auto& [e, tp] : u.terms) {
        if (e[var] == 0) continue;
        std::vector<int> key = e;
        const double c = static_cast<double>(key[var]);
        key[var] -= 1;
        tpoly_axpy(out.terms[key], c, tp);
    }
    return out;
}

inline XPoly xpoly_integrate_t(const XPoly& u) {
    XPoly out;
    for (const auto& [e, tp] : u.terms) out.terms[e] = tpoly_integrate(tp);
    return out;
}

inline double xpoly_eval(const XPoly& u, double t, const Vec& xvals) {
    double acc = 0.0;
    for (const auto& [e, tp] : u.terms) {
        double mono = 1.0;
        for (std::size_t v = 0; v < e.size(); ++v)
            for (int k = 0; k < e[v]; ++k) mono *= xvals[v];
        if (mono != 0.0) acc += mono * tpoly_eval(tp, t);
    }
    return acc;
}

inline void xpoly_prune(XPoly& u) {
    for (auto it = u.terms.begin(); it != u.terms.end();) {
        auto& tp = it->second;
        while (!tp.empty() && tp.back() == 0.0) tp.pop_back();
        if (tp.empty())
            it = u.terms.erase(it);
        else
            ++it;
    }
}

inline int xpoly_max_weight(const XPoly& u, const std::vector<int>& var_weight) {
    int w = 0;
    for (const auto& [e, tp] : u.terms) {
        int mw = 0;
        for (std::size_t v = 0; v < e.size(); ++v) mw += e[v] * var_weight[v];
        w = std::max(w, mw);
    }
    return w;
}

}  // namespace taylor_detail

struct TaylorDiagnostics {
    std::vector<double> term_magnitudes;            // |M_lambda^{ox m}(Phi_m)|
    std::vector<std::complex<double>> partial_sums;  // sum_{m <= M} i^m terms
    bool converged = false;
    bool diverging = false;
    double roc_estimate = 0.0;  // reciprocal of limsup |term_m|^{1/m}; diagnostic only

    std::complex<double> value() const { return partial_sums.back(); }
};

// Taylor reconstruction of E[exp(i <lambda, X^n_t - X^n_0>)] for the lift of
// a constant-coefficient base model, started at the T^{n-1} point given by
// xcoords (empty means the unit start, all non-scalar coordinates zero).
// Terms are the moment functionals u_m = E[<lambda, X^n_t - X^n_0>^m] / m!,
// built by the recursive PDE
//   du_m/dt = A_n u_m + (M o mu_n) u_{m-1}
//             + sum_j (M o b_n^{(.,j)}) d u_{m-1}/dx_j + 1/2 (M^{ox2} o b_n) u_{m-2}.
inline TaylorDiagnostics taylor_cf_const_coeff(const Vec& mu, const Mat& b, const TruncatedTensor<double>& lambda,
                                               double t, int m_max, const Vec& xcoords = {}) {
    using namespace taylor_detail;
    if (m_max < 1) throw std::invalid_argument("taylor_cf: m_max must be >= 1");
    const int d = lambda.dim_d();
    const int n = lambda.degree_n();
    if (n < 1) throw std::invalid_argument("taylor_cf: lambda must have degree >= 1");
    if (static_cast<int>(mu.size()) != d || b.rows != d || b.cols != d)
        throw std::invalid_argument("taylor_cf: model dimension mismatch");

    const std::size_t dim_low = dim_truncated(d, n - 1);
    const std::size_t nvars = dim_low - 1;  // the scalar coordinate is frozen at 1
    std::vector<int> var_weight(nvars, 0);
    std::vector<int> flat_degree(dim_truncated(d, n), 0);
    for (int m = 0; m <= n; ++m)
        for (std::size_t i = degree_offset(d, m); i < degree_offset(d, m + 1) && i < flat_degree.size(); ++i)
            flat_degree[i] = m;
    for (std::size_t v = 0; v < nvars; ++v) var_weight[v] = flat_degree[v + 1];

    // monomial for the coordinate with flat index f (f == 0 is the constant 1)
    auto coord_mono = [&](std::size_t f) {
        std::vector<int> e(nvars, 0);
        if (f > 0) e[f - 1] = 1;
        return e;
    };

    // mu_n^{(I)} as a polynomial in the coordinates, for any word I (flat f)
    auto lifted_drift_poly = [&](std::size_t f) {
        SimplePoly p;
        const int m = flat_degree[f];
        std::size_t blockidx = f - degree_offset(d, m);
        // split off the last letter: I = K . (j)
        const std::size_t j = blockidx % static_cast<std::size_t>(d);
        const std::size_t kblock = blockidx / static_cast<std::size_t>(d);
        const double mj = mu[j];
        if (mj != 0.0) p.push_back({coord_mono(degree_offset(d, m - 1) + kblock), mj});
        if (m >= 2) {
            const std::size_t j2 = j;
            const std::size_t j1 = kblock % static_cast<std::size_t>(d);
            const std::size_t k2block = kblock / static_cast<std::size_t>(d);
            const double bj = 0.5 * b(static_cast<int>(j1), static_cast<int>(j2));
            if (bj != 0.0) p.push_back({coord_mono(degree_offset(d, m - 2) + k2block), bj});
        }
        return p;
    };

    // b_n^{(I,J)} = x^{(I')} x^{(J')} b(last(I), last(J)) as a single monomial
    auto lifted_b_pair = [&](std::size_t fI, std::size_t fJ, std::vector<int>& exps_out) -> double {
        const int mi = flat_degree[fI], mj = flat_degree[fJ];
        const std::size_t bi = fI - degree_offset(d, mi), bj = fJ - degree_offset(d, mj);
        const int li = static_cast<int>(bi % static_cast<std::size_t>(d));
        const int lj = static_cast<int>(bj % static_cast<std::size_t>(d));
        const std::size_t pi = degree_offset(d, mi - 1) + bi / static_cast<std::size_t>(d);
        const std::size_t pj = degree_offset(d, mj - 1) + bj / static_cast<std::size_t>(d);
        exps_out.assign(nvars, 0);
        if (pi > 0) exps_out[pi - 1] += 1;
        if (pj > 0) exps_out[pj - 1] += 1;
        return b(li, lj);
    };

    // operator coefficients
    std::vector<SimplePoly> drift_poly(dim_low);  // generator drift per variable word
    for (std::size_t f = 1; f < dim_low; ++f) drift_poly[f] = lifted_drift_poly(f);

    SimplePoly c1;  // M_lambda o mu_n
    for (std::size_t f = 1; f < dim_truncated(d, n); ++f) {
        const double lf = lambda[f];
        if (lf == 0.0) continue;
        for (auto mono : lifted_drift_poly(f)) {
            mono.coeff *= lf;
            c1.push_back(mono);
        }
    }

    std::vector<SimplePoly> beta(dim_low);  // M_lambda o b_n^{(., j)} per variable word j
    SimplePoly c2;                          // M_lambda^{ox 2} o b_n
    std::vector<int> exps;
    for (std::size_t fI = 1; fI < dim_truncated(d, n); ++fI) {
        const double lI = lambda[fI];
        if (lI == 0.0) continue;
        for (std::size_t fJ = 1; fJ < dim_truncated(d, n); ++fJ) {
            const double v = lifted_b_pair(fI, fJ, exps);
            if (v == 0.0) continue;
            if (fJ < dim_low) beta[fJ].push_back({exps, lI * v});
            const double lJ = lambda[fJ];
            if (lJ != 0.0) c2.push_back({exps, lI * lJ * v});
        }
    }

    // apply the generator A_n to a polynomial
    auto apply_A = [&](const XPoly& u) {
        XPoly out;
        for (std::size_t f = 1; f < dim_low; ++f) {
            if (drift_poly[f].empty()) continue;
            const XPoly du = xpoly_dx(u, f - 1);
            if (!du.empty()) xpoly_axpy_simple(out, drift_poly[f], du);
        }
        for (std::size_t fI = 1; fI < dim_low; ++fI) {
            const XPoly dI = xpoly_dx(u, fI - 1);
            if (dI.empty()) continue;
            for (std::size_t fJ = 1; fJ < dim_low; ++fJ) {
                const XPoly dIJ = xpoly_dx(dI, fJ - 1);
                if (dIJ.empty()) continue;
                const double v = lifted_b_pair(fI, fJ, exps);
                if (v != 0.0) xpoly_axpy_mono(out, exps, 0.5 * v, dIJ);
            }
        }
        xpoly_prune(out);
        return out;
    };

    // solve du/dt = A u + src with u(0) = 0: Duhamel iteration, finite since
    // A strictly reduces the graded weight
    auto solve_step = [&](const XPoly& src) {
        XPoly v0 = xpoly_integrate_t(src);
        xpoly_prune(v0);
        const int sweeps = xpoly_max_weight(v0, var_weight) + 1;
        XPoly u = v0;
        for (int it = 0; it < sweeps; ++it) {
            XPoly next = v0;
            const XPoly au = apply_A(u);
            if (au.empty()) break;
            XPoly iau = xpoly_integrate_t(au);
            for (const auto& [e, tp] : iau.terms) tpoly_axpy(next.terms[e], 1.0, tp);
            xpoly_prune(next);
            u = std::move(next);
        }
        return u;
    };

    std::vector<XPoly> u(static_cast<std::size_t>(m_max) + 1);
    u[0].terms[std::vector<int>(nvars, 0)] = TPoly{1.0};
    for (int m = 1; m <= m_max; ++m) {
        XPoly src;
        xpoly_axpy_simple(src, c1, u[static_cast<std::size_t>(m - 1)]);
        for (std::size_t fJ = 1; fJ < dim_low; ++fJ) {
            if (beta[fJ].empty()) continue;
            const XPoly du = xpoly_dx(u[static_cast<std::size_t>(m - 1)], fJ - 1);
            if (!du.empty()) xpoly_axpy_simple(src, beta[fJ], du);
        }
        if (m >= 2) {
            XPoly tail;
            xpoly_axpy_simple(tail, c2, u[static_cast<std::size_t>(m - 2)]);
            for (const auto& [e, tp] : tail.terms) tpoly_axpy(src.terms[e], 0.5, tp);
        }
        xpoly_prune(src);
        u[static_cast<std::size_t>(m)] = solve_step(src);
    }

    Vec xv(nvars, 0.0);
    if (!xcoords.empty()) {
        if (xcoords.size() != dim_low) throw std::invalid_argument("taylor_cf: xcoords must have T^{n-1} layout");
        for (std::size_t v = 0; v < nvars; ++v) xv[v] = xcoords[v + 1];
    }

    TaylorDiagnostics diag;
    std::complex<double> sum{0.0, 0.0};
    std::complex<double> ipow{1.0, 0.0};
    const std::complex<double> iunit{0.0, 1.0};
    for (int m = 0; m <= m_max; ++m) {
        const double um = xpoly_eval(u[static_cast<std::size_t>(m)], t, xv);
        sum += ipow * um;
        ipow *= iunit;
        if (m >= 1) diag.term_magnitudes.push_back(std::abs(um));
        diag.partial_sums.push_back(sum);
    }

    const std::size_t nt = diag.term_magnitudes.size();
    if (nt >= 5) {
        double tail = 0.0;
        for (std::size_t i = nt - 5; i < nt; ++i) tail = std::max(tail, diag.term_magnitudes[i]);
        diag.converged = tail < 1e-9;
        if (nt >= 10) {
            double prev = 0.0;
            for (std::size_t i = nt - 10; i < nt - 5; ++i) prev = std::max(prev, diag.term_magnitudes[i]);
            diag.diverging = tail > prev && tail > 1.0;
        }
    }
    double limsup = 0.0;
    for (std::size_t m = nt / 2; m < nt; ++m)
        if (diag.term_magnitudes[m] > 0.0)
            limsup = std::max(limsup, std::pow(diag.term_magnitudes[m], 1.0 / static_cast<double>(m + 1)));
    diag.roc_estimate = (limsup > 0.0) ? 1.0 / limsup : std::numeric_limits<double>::infinity();
    return diag;
}

// Series-driven entry point: the base model is recovered from the series
// (mu_hat is the t-linear block of Phi_1, b_hat twice the t-linear block of
// Phi_2), which requires degree >= 2.
inline TaylorDiagnostics taylor_cf(const ExpectedSignatureSeries& series, const TruncatedTensor<double>& lambda,
                                   double t, int m_max) {
    if (series.n < 2) throw std::invalid_argument("taylor_cf: series must carry degrees up to 2");
    if (series.d != lambda.dim_d()) throw std::invalid_argument("taylor_cf: dimension mismatch");
    const int d = series.d;
    Vec mu(static_cast<std::size_t>(d), 0.0);
    if (series.phi[1].size() >= 2)
        for (int i = 0; i < d; ++i) mu[static_cast<std::size_t>(i)] = series.phi[1][1][static_cast<std::size_t>(i)];
    Mat b(d, d);
    if (series.phi[2].size() >= 2)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) b(i, j) = 2.0 * series.phi[2][1][static_cast<std::size_t>(i * d + j)];
    return taylor_cf_const_coeff(mu, b, lambda, t, m_max);
}

}  // namespace sigcf
