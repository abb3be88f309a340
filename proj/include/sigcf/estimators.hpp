#pragma once

// Monte Carlo estimation of signature characteristic functions, the
// generalized-signature characteristic function, and the joint law of
// Brownian motion with its Levy area. All estimators store per-path values
// and reduce them with a fixed pairwise tree, so a given seed yields the
// same estimate for every thread count.

#include <complex>
#include <cstdint>
#include <vector>

#include "sigcf/diffusion.hpp"
#include "sigcf/matrix.hpp"
#include "sigcf/parallel.hpp"
#include "sigcf/rng.hpp"
#include "sigcf/tensor.hpp"

namespace sigcf {

struct ComplexEstimate {
    std::complex<double> mean{0.0, 0.0};
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    long n_samples = 0;

    double stderr_combined() const { return std::sqrt(stderr_re * stderr_re + stderr_im * stderr_im); }
};

// z-score of the difference against an exact complex value
inline double z_score(const ComplexEstimate& e, std::complex<double> exact) {
    const double se = e.stderr_combined();
    return std::abs(e.mean - exact) / (se > 0.0 ? se : 1.0);
}

// z-score of the difference between two estimates
inline double z_score(const ComplexEstimate& a, const ComplexEstimate& b) {
    const double se = std::sqrt(a.stderr_combined() * a.stderr_combined() + b.stderr_combined() * b.stderr_combined());
    return std::abs(a.mean - b.mean) / (se > 0.0 ? se : 1.0);
}

inline ComplexEstimate summarize(const std::vector<std::complex<double>>& vals) {
    ComplexEstimate e;
    e.n_samples = static_cast<long>(vals.size());
    if (vals.empty()) return e;
    const double n = static_cast<double>(vals.size());
    e.mean = pairwise_sum(vals) / n;
    if (vals.size() < 2) return e;
    std::vector<std::complex<double>> dev(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double dr = vals[i].real() - e.mean.real();
        const double di = vals[i].imag() - e.mean.imag();
        dev[i] = {dr * dr, di * di};
    }
    const std::complex<double> ss = pairwise_sum(dev);
    e.stderr_re = std::sqrt(ss.real() / (n * (n - 1.0)));
    e.stderr_im = std::sqrt(ss.imag() / (n * (n - 1.0)));
    return e;
}

// lambda_tilde: the dual tensor with M_lambda(S^n_t) = M_lambda_tilde(X^n_t)
// pathwise when the generalized-signature process starts at (1, x, 0, ...).
// Backward recursion from the top degree,
//   lt_I = l_I                                  for |I| = n,
//   lt_I = l_I - sum_j x_j lt_{(j) I}           for 0 <= |I| < n,
// where the |I| = 0 step makes the identity exact including the constant
// term.
inline TruncatedTensor<double> lambda_tilde(const TruncatedTensor<double>& lambda, const Vec& x, int n) {
    if (lambda.degree_n() != n) throw std::invalid_argument("lambda_tilde: n does not match lambda");
    const int d = lambda.dim_d();
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("lambda_tilde: x dimension mismatch");
    TruncatedTensor<double> lt = lambda;
    for (int m = n - 1; m >= 0; --m) {
        const std::size_t off_m = degree_offset(d, m);
        const std::size_t off_up = degree_offset(d, m + 1);
        std::size_t block = 1;
        for (int i = 0; i < m; ++i) block *= static_cast<std::size_t>(d);
        for (std::size_t idx = 0; idx < block; ++idx) {
            double corr = 0.0;
            for (int j = 0; j < d; ++j)
                corr += x[static_cast<std::size_t>(j)] * lt[off_up + static_cast<std::size_t>(j) * block + idx];
            lt[off_m + idx] = lambda[off_m + idx] - corr;
        }
    }
    return lt;
}

namespace detail {

// estimators at t = 0 are deterministic; report the exact value
inline ComplexEstimate exact_estimate(std::complex<double> v, long n) {
    ComplexEstimate e;
    e.mean = v;
    e.n_samples = n;
    return e;
}

}  // namespace detail

// E[exp(i <lambda, S^n(X_[0,t])>) | X_0 = x] over chord-signature paths.
inline ComplexEstimate estimate_cf_signature(const DiffusionModel& m, const Vec& x,
                                             const TruncatedTensor<double>& lambda, double t, SimConfig cfg,
                                             int threads = 1) {
    const int n = lambda.degree_n();
    if (lambda.dim_d() != m.d) throw std::invalid_argument("estimate_cf_signature: lambda dimension mismatch");
    if (t == 0.0)  // S^n is the unit element, only the empty word contributes
        return detail::exact_estimate(std::exp(std::complex<double>(0.0, lambda[0])), cfg.n_paths);
    cfg.t_end = t;
    cfg.validate();
    std::vector<std::complex<double>> vals(static_cast<std::size_t>(cfg.n_paths));
    parallel_for(vals.size(), threads, [&](std::size_t p) {
        const auto sig = chord_signature_path(m, x, n, cfg, static_cast<long>(p));
        vals[p] = std::exp(std::complex<double>(0.0, pair(lambda, sig)));
    });
    return summarize(vals);
}

// E[exp(i <lambda, X^n_t - X^n_0>) | X^n_0 = x0]
inline ComplexEstimate estimate_cf_generalized(const LiftedDiffusion& L, const TruncatedTensor<double>& x0,
                                               const TruncatedTensor<double>& lambda, double t, SimConfig cfg,
                                               int threads = 1) {
    if (x0.coeffs()[0] != 1.0)
        throw std::invalid_argument("estimate_cf_generalized: degree-0 component of x0 must be 1");
    lambda.require_same_shape(x0, "estimate_cf_generalized");
    if (t == 0.0) return detail::exact_estimate({1.0, 0.0}, cfg.n_paths);  // X_t - X_0 = 0
    cfg.t_end = t;
    cfg.validate();
    std::vector<std::complex<double>> vals(static_cast<std::size_t>(cfg.n_paths));
    parallel_for(vals.size(), threads, [&](std::size_t p) {
        TruncatedTensor<double> xt;
        if (cfg.scheme == Scheme::chord_signature) {
            const auto sig = chord_signature_path(L.base(), x0.degree1(), L.truncation_degree(), cfg, static_cast<long>(p));
            xt = tensor_mul(x0, sig);
        } else {
            xt = lifted_em_path(L, x0, cfg, static_cast<long>(p));
        }
        vals[p] = std::exp(std::complex<double>(0.0, pair(lambda, xt) - pair(lambda, x0)));
    });
    return summarize(vals);
}

struct LevyParams {
    Mat Lambda;     // skew-symmetric d x d
    Vec mu_vec;     // frequency of the Brownian factor
    double t = 1.0;
    Vec w;          // starting point of W

    void validate() const {
        if (Lambda.rows != Lambda.cols) throw std::invalid_argument("LevyParams: Lambda must be square");
        if (!is_skew(Lambda)) throw std::invalid_argument("LevyParams: Lambda must be skew-symmetric");
        const std::size_t d = static_cast<std::size_t>(Lambda.rows);
        if (mu_vec.size() != d || w.size() != d) throw std::invalid_argument("LevyParams: dimension mismatch");
    }
};

// E[exp(i <mu, W_t> + i L^Lambda_t) | W_0 = w], with
// L^Lambda_t = (1/2) int_0^t W^T Lambda dW accumulated by the midpoint rule
// (the exact area of the chord interpolation).
inline ComplexEstimate estimate_joint_bm_levy(const LevyParams& p, SimConfig cfg, int threads = 1) {
    p.validate();
    if (p.t == 0.0) return detail::exact_estimate(std::exp(std::complex<double>(0.0, dot(p.mu_vec, p.w))), cfg.n_paths);
    cfg.t_end = p.t;
    cfg.validate();
    const int d = p.Lambda.rows;
    const double dt = p.t / cfg.steps;
    const double sdt = std::sqrt(dt);
    std::vector<std::complex<double>> vals(static_cast<std::size_t>(cfg.n_paths));
    parallel_for(vals.size(), threads, [&](std::size_t path) {
        Vec wst = p.w;
        Vec dw(static_cast<std::size_t>(d));
        double area = 0.0;
        for (int k = 0; k < cfg.steps; ++k) {
            for (int c = 0; c < d; ++c)
                dw[static_cast<std::size_t>(c)] = sdt * normal_at(cfg.seed, static_cast<std::uint64_t>(path),
                                                                  static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(c));
            // 1/2 (W_k + dW/2)^T Lambda dW
            for (int i = 0; i < d; ++i) {
                double li = 0.0;
                for (int j = 0; j < d; ++j) li += p.Lambda(i, j) * dw[static_cast<std::size_t>(j)];
                area += 0.5 * (wst[static_cast<std::size_t>(i)] + 0.5 * dw[static_cast<std::size_t>(i)]) * li;
            }
            for (int i = 0; i < d; ++i) wst[static_cast<std::size_t>(i)] += dw[static_cast<std::size_t>(i)];
        }
        double phase = area;
        for (int i = 0; i < d; ++i) phase += p.mu_vec[static_cast<std::size_t>(i)] * wst[static_cast<std::size_t>(i)];
        vals[path] = std::exp(std::complex<double>(0.0, phase));
    });
    return summarize(vals);
}

}  // namespace sigcf
