#pragma once

// Canonical form of skew-symmetric matrices and the closed-form
// characteristic functions of Brownian motion coupled with its Levy area:
// the conditional law given the starting point and the joint law with the
// Brownian endpoint, degenerate frequencies included.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sigcf/matrix.hpp"

namespace sigcf {

// Lambda = O^T Sigma O with O orthogonal, Sigma block diagonal with 2x2
// blocks [[0, -eta_i], [eta_i, 0]] followed by a zero block of size d0.
struct SkewCanonicalForm {
    Mat O;
    std::vector<double> eta;  // positive, descending
    int d0 = 0;               // zero-eigenvalue multiplicity
    int d1 = 0;               // number of planes, d = 2 d1 + d0

    Mat block_form() const {
        const int d = 2 * d1 + d0;
        Mat s(d, d);
        for (int i = 0; i < d1; ++i) {
            s(2 * i, 2 * i + 1) = -eta[static_cast<std::size_t>(i)];
            s(2 * i + 1, 2 * i) = eta[static_cast<std::size_t>(i)];
        }
        return s;
    }
};

namespace detail {

// remove the components of v along previously accepted rows
inline void project_out(Vec& v, const std::vector<Vec>& rows) {
    for (const auto& r : rows) {
        const double c = dot(v, r);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * r[i];
    }
}

}  // namespace detail

inline SkewCanonicalForm skew_canonical_decomposition(const Mat& Lambda, double zero_tol = 1e-10) {
    if (Lambda.rows != Lambda.cols) throw std::invalid_argument("skew_canonical_decomposition: square matrix required");
    if (!is_skew(Lambda)) throw std::invalid_argument("skew_canonical_decomposition: matrix is not skew-symmetric");
    const int d = Lambda.rows;
    const double scale = frob_norm(Lambda);

    SkewCanonicalForm out;
    out.O = Mat::identity(d);
    if (scale == 0.0) {
        out.d0 = d;
        out.d1 = 0;
        return out;
    }

    // -Lambda^2 = Lambda^T Lambda is symmetric PSD; its nonzero eigenvalues
    // are the eta_i^2, each with multiplicity two.
    const Mat M = transpose(Lambda) * Lambda;
    Vec evals;
    Mat evecs;
    jacobi_symmetric_eig(M, evals, evecs);

    std::vector<int> order(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return evals[static_cast<std::size_t>(a)] > evals[static_cast<std::size_t>(b)]; });

    std::vector<Vec> rows;        // accepted orthonormal rows of O (planes first)
    std::vector<double> etas;
    std::vector<Vec> kernel_rows;

    for (int oi = 0; oi < d; ++oi) {
        const int col = order[static_cast<std::size_t>(oi)];
        Vec v(static_cast<std::size_t>(d));
        for (int r = 0; r < d; ++r) v[static_cast<std::size_t>(r)] = evecs(r, col);

        detail::project_out(v, rows);
        detail::project_out(v, kernel_rows);
        const double nv = norm2(v);
        if (nv < 1e-6) continue;  // already spanned by an accepted plane
        for (auto& x : v) x /= nv;

        // classify by |Lambda v| rather than by the eigenvalue of -Lambda^2:
        // the eigenvalue carries roundoff of order eps |Lambda|^2, which
        // square-roots to eps^(1/2) |Lambda| and would misfile kernel vectors
        Vec lv(static_cast<std::size_t>(d), 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) lv[static_cast<std::size_t>(i)] += Lambda(i, j) * v[static_cast<std::size_t>(j)];
        const double eta = norm2(lv);
        if (eta <= zero_tol * scale) {
            kernel_rows.push_back(std::move(v));
            continue;
        }

        // partner vector Lambda v / eta; it is orthogonal to every accepted
        // row up to roundoff because accepted planes are Lambda-invariant
        for (auto& x : lv) x /= eta;
        detail::project_out(lv, rows);
        detail::project_out(lv, kernel_rows);
        const double nl = norm2(lv);
        if (nl < 0.5) throw std::runtime_error("skew_canonical_decomposition: plane pairing failed");
        for (auto& x : lv) x /= nl;

        rows.push_back(std::move(v));
        rows.push_back(std::move(lv));
        etas.push_back(eta);
    }

    // sort planes by eta descending
    std::vector<int> porder(etas.size());
    for (std::size_t i = 0; i < etas.size(); ++i) porder[i] = static_cast<int>(i);
    std::sort(porder.begin(), porder.end(), [&](int a, int b) { return etas[static_cast<std::size_t>(a)] > etas[static_cast<std::size_t>(b)]; });

    out.d1 = static_cast<int>(etas.size());
    out.d0 = d - 2 * out.d1;
    out.eta.resize(etas.size());
    out.O = Mat(d, d);
    int row = 0;
    for (std::size_t pi = 0; pi < porder.size(); ++pi) {
        const int p = porder[pi];
        out.eta[pi] = etas[static_cast<std::size_t>(p)];
        for (int half = 0; half < 2; ++half, ++row)
            for (int j = 0; j < d; ++j) out.O(row, j) = rows[static_cast<std::size_t>(2 * p + half)][static_cast<std::size_t>(j)];
    }
    for (const auto& k : kernel_rows) {
        for (int j = 0; j < d; ++j) out.O(row, j) = k[static_cast<std::size_t>(j)];
        ++row;
    }
    if (row != d || out.d0 != static_cast<int>(kernel_rows.size()))
        throw std::runtime_error("skew_canonical_decomposition: basis extraction failed");

    // contract checks: orthogonality and reconstruction
    if (frob_norm(out.O * transpose(out.O) - Mat::identity(d)) > 1e-12)
        throw std::runtime_error("skew_canonical_decomposition: O is not orthogonal to tolerance");
    const Mat rec = transpose(out.O) * out.block_form() * out.O;
    if (frob_norm(rec - Lambda) > 1e-10 * std::max(1.0, scale))
        throw std::runtime_error("skew_canonical_decomposition: reconstruction tolerance exceeded");
    return out;
}

// Per-plane factors of the closed forms: the amplitude 1/cosh(eta t/2) and
// the Riccati solution h(t) = -(eta/4) tanh(eta t/2), plus the Gaussian
// exponent of the kernel directions.
struct ClosedFormFactors {
    std::vector<double> amplitude;  // 1/cosh(eta_i t / 2)
    std::vector<double> h;          // -(eta_i/4) tanh(eta_i t / 2)
    double gauss_exponent = 0.0;    // -(t/2) sum of squared kernel components of O mu
};

inline ClosedFormFactors closed_form_factors(const SkewCanonicalForm& c, double t, const Vec& mu) {
    ClosedFormFactors f;
    f.amplitude.reserve(c.eta.size());
    f.h.reserve(c.eta.size());
    for (double eta : c.eta) {
        f.amplitude.push_back(1.0 / std::cosh(0.5 * eta * t));
        f.h.push_back(-0.25 * eta * std::tanh(0.5 * eta * t));
    }
    const Vec om = matvec(c.O, mu);
    double s = 0.0;
    for (int i = 0; i < c.d0; ++i) {
        const double x = om[static_cast<std::size_t>(2 * c.d1 + i)];
        s += x * x;
    }
    f.gauss_exponent = -0.5 * t * s;
    return f;
}

// Psi_W(t, mu, Lambda) = E[exp(i <mu, W_t> + i L^Lambda_t) | W_0 = 0]
//   = prod_i sech(eta_i t/2)
//     * exp( sum_i -(1/eta_i)((O mu)_{2i-1}^2 + (O mu)_{2i}^2) tanh(eta_i t/2)
//            - (t/2) sum_j (O mu)_{2 d1 + j}^2 )
inline std::complex<double> joint_cf_bm_levy_closed(double t, const Vec& mu, const Mat& Lambda,
                                                    double zero_tol = 1e-10) {
    const SkewCanonicalForm c = skew_canonical_decomposition(Lambda, zero_tol);
    if (mu.size() != static_cast<std::size_t>(Lambda.rows))
        throw std::invalid_argument("joint_cf_bm_levy_closed: mu dimension mismatch");
    const ClosedFormFactors f = closed_form_factors(c, t, mu);
    const Vec om = matvec(c.O, mu);
    double amp = 1.0, expo = f.gauss_exponent;
    for (int i = 0; i < c.d1; ++i) {
        const double eta = c.eta[static_cast<std::size_t>(i)];
        const double a = om[static_cast<std::size_t>(2 * i)];
        const double b = om[static_cast<std::size_t>(2 * i + 1)];
        amp *= f.amplitude[static_cast<std::size_t>(i)];
        expo += -(a * a + b * b) / eta * std::tanh(0.5 * eta * t);
    }
    return {amp * std::exp(expo), 0.0};
}

// L(t, w; Lambda) = E[exp(i L^Lambda_t) | W_0 = w]
//   = prod_i sech(eta_i t/2)
//     * exp( sum_i -(eta_i/4)((O w)_{2i-1}^2 + (O w)_{2i}^2) tanh(eta_i t/2) );
// kernel components of w do not contribute, which matches the link
// L(t, w; Lambda) = Psi_W(t, (1/2) w^T Lambda, Lambda).
inline std::complex<double> levy_cf_conditional_closed(double t, const Vec& w, const Mat& Lambda,
                                                       double zero_tol = 1e-10) {
    const SkewCanonicalForm c = skew_canonical_decomposition(Lambda, zero_tol);
    if (w.size() != static_cast<std::size_t>(Lambda.rows))
        throw std::invalid_argument("levy_cf_conditional_closed: w dimension mismatch");
    const Vec ow = matvec(c.O, w);
    double amp = 1.0, expo = 0.0;
    for (int i = 0; i < c.d1; ++i) {
        const double eta = c.eta[static_cast<std::size_t>(i)];
        const double a = ow[static_cast<std::size_t>(2 * i)];
        const double b = ow[static_cast<std::size_t>(2 * i + 1)];
        amp /= std::cosh(0.5 * eta * t);
        expo += -0.25 * eta * (a * a + b * b) * std::tanh(0.5 * eta * t);
    }
    return {amp * std::exp(expo), 0.0};
}

// half w^T Lambda as a vector, the joint-law frequency matched to start w
inline Vec levy_link_mu(const Vec& w, const Mat& Lambda) {
    const int d = Lambda.rows;
    Vec mu(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += w[static_cast<std::size_t>(i)] * Lambda(i, j);
        mu[static_cast<std::size_t>(j)] = 0.5 * s;
    }
    return mu;
}

inline std::pair<Vec, Mat> rotate_parameters(const Vec& mu, const Mat& Lambda, const Mat& M) {
    if (!is_orthogonal(M, 1e-10)) throw std::invalid_argument("rotate_parameters: M is not orthogonal");
    return {matvec(M, mu), M * Lambda * transpose(M)};
}

}  // namespace sigcf
