#pragma once

// Time-homogeneous Ito diffusions, the generalized-signature lift of a model
// to the truncated tensor algebra, and Euler-Maruyama / chord-signature
// Monte Carlo simulation with counter-based randomness.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigcf/matrix.hpp"
#include "sigcf/parallel.hpp"
#include "sigcf/path.hpp"
#include "sigcf/rng.hpp"
#include "sigcf/tensor.hpp"

namespace sigcf {

struct DiffusionModel {
    int d = 1;        // state dimension
    int d_prime = 1;  // driving-noise dimension
    bool is_constant_coefficient = false;
    std::function<Vec(const Vec&)> drift;   // mu: R^d -> R^d
    std::function<Mat(const Vec&)> sigma;   // sigma: R^d -> R^{d x d'}

    // diffusion matrix b(x) = sigma(x) sigma(x)^T
    Mat diffusion_matrix(const Vec& x) const {
        const Mat s = sigma(x);
        return s * transpose(s);
    }

    static DiffusionModel brownian(int d) {
        DiffusionModel m;
        m.d = d;
        m.d_prime = d;
        m.is_constant_coefficient = true;
        m.drift = [d](const Vec&) { return Vec(static_cast<std::size_t>(d), 0.0); };
        m.sigma = [d](const Vec&) { return Mat::identity(d); };
        return m;
    }

    static DiffusionModel brownian_with_drift(const Vec& c) {
        DiffusionModel m = brownian(static_cast<int>(c.size()));
        m.drift = [c](const Vec&) { return c; };
        return m;
    }

    // mu(x) = a x, sigma(x) = b x in one dimension
    static DiffusionModel scalar_linear(double a, double b) {
        DiffusionModel m;
        m.d = 1;
        m.d_prime = 1;
        m.is_constant_coefficient = false;
        m.drift = [a](const Vec& x) { return Vec{a * x[0]}; };
        m.sigma = [b](const Vec& x) {
            Mat s(1, 1);
            s(0, 0) = b * x[0];
            return s;
        };
        return m;
    }

    static DiffusionModel constant(const Vec& mu, const Mat& sigma_mat) {
        DiffusionModel m;
        m.d = static_cast<int>(mu.size());
        m.d_prime = sigma_mat.cols;
        if (sigma_mat.rows != m.d) throw std::invalid_argument("DiffusionModel::constant: sigma rows != d");
        m.is_constant_coefficient = true;
        m.drift = [mu](const Vec&) { return mu; };
        m.sigma = [sigma_mat](const Vec&) { return sigma_mat; };
        return m;
    }
};

enum class Scheme { euler_maruyama_lifted, chord_signature };

struct SimConfig {
    double t_end = 1.0;
    int steps = 1000;
    long n_paths = 1;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::chord_signature;

    void validate() const {
        if (!(t_end > 0.0)) throw std::invalid_argument("SimConfig: t_end must be > 0");
        if (steps < 1) throw std::invalid_argument("SimConfig: steps must be >= 1");
        if (n_paths < 1) throw std::invalid_argument("SimConfig: n_paths must be >= 1");
    }
};

struct TrajectoryBundle {
    double t_end = 0.0;
    int steps = 0;
    std::uint64_t seed = 0;
    std::vector<Vec> terminal_x;
    std::vector<TruncatedTensor<double>> terminal_tensor;
};

namespace detail {

inline void check_finite(const Vec& x, long path, int step, const char* who) {
    for (double v : x)
        if (!std::isfinite(v))
            throw std::runtime_error(std::string(who) + ": non-finite state at path " + std::to_string(path) +
                                     ", step " + std::to_string(step));
}

}  // namespace detail

// Generalized-signature lift: drift and diffusion of the tensor-valued
// process X^n. Both follow from left multiplication by the driver increment,
// with the Ito-Stratonovich correction (1/2) x ox (sigma sigma^T) in the
// drift. Degree-0 outputs are identically zero.
class LiftedDiffusion {
  public:
    LiftedDiffusion() = default;
    LiftedDiffusion(DiffusionModel base, int n) : base_(std::move(base)), n_(n) {
        if (n < 1) throw std::invalid_argument("LiftedDiffusion: n must be >= 1");
    }

    const DiffusionModel& base() const { return base_; }
    int truncation_degree() const { return n_; }
    std::size_t state_dim() const { return dim_truncated(base_.d, n_); }

    // mu_n(x) = x ox (mu_hat + 1/2 b_hat), evaluated at x1 = rho^1(x)
    TruncatedTensor<double> drift(const TruncatedTensor<double>& x) const {
        check_shape(x, "LiftedDiffusion::drift");
        const Vec x1 = x.degree1();
        return tensor_mul(x, generator_tensor(base_.drift(x1), base_.diffusion_matrix(x1)));
    }

    // sigma_n(x) w = x ox (sigma(x1) w) as a degree-1 element
    TruncatedTensor<double> sigma_apply(const TruncatedTensor<double>& x, const Vec& w) const {
        check_shape(x, "LiftedDiffusion::sigma_apply");
        if (static_cast<int>(w.size()) != base_.d_prime)
            throw std::invalid_argument("LiftedDiffusion::sigma_apply: noise dimension mismatch");
        const Vec x1 = x.degree1();
        const Vec v = matvec(base_.sigma(x1), w);
        return tensor_mul(x, TruncatedTensor<double>::from_degree1(n_, v));
    }

    // column k (0-based) of sigma_n at x, as a tensor
    TruncatedTensor<double> sigma_col(const TruncatedTensor<double>& x, int k) const {
        Vec w(static_cast<std::size_t>(base_.d_prime), 0.0);
        w[static_cast<std::size_t>(k)] = 1.0;
        return sigma_apply(x, w);
    }

    // mu_hat + (1/2) b_hat packed as a degree-(1,2) tensor
    TruncatedTensor<double> generator_tensor(const Vec& mu, const Mat& b) const {
        const int d = base_.d;
        TruncatedTensor<double> g(d, n_);
        if (n_ >= 1)
            for (int i = 0; i < d; ++i) g[degree_offset(d, 1) + static_cast<std::size_t>(i)] = mu[static_cast<std::size_t>(i)];
        if (n_ >= 2) {
            const std::size_t off2 = degree_offset(d, 2);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    g[off2 + static_cast<std::size_t>(i * d + j)] = 0.5 * b(i, j);
        }
        return g;
    }

  private:
    void check_shape(const TruncatedTensor<double>& x, const char* who) const {
        if (x.dim_d() != base_.d || x.degree_n() != n_)
            throw std::invalid_argument(std::string(who) + ": tensor shape does not match the lift");
    }

    DiffusionModel base_;
    int n_ = 1;
};

inline LiftedDiffusion lift_generalized_signature(const DiffusionModel& m, int n) {
    return LiftedDiffusion(m, n);
}

namespace detail {

// One Euler-Maruyama path of the base model; calls visit(step, x_old, dx)
// before the state update so chord consumers see each increment.
template <class Visit>
Vec em_path(const DiffusionModel& m, const Vec& x0, const SimConfig& cfg, long path, Visit&& visit) {
    const double dt = cfg.t_end / cfg.steps;
    const double sdt = std::sqrt(dt);
    Vec x = x0;
    Vec dx(static_cast<std::size_t>(m.d));
    for (int k = 0; k < cfg.steps; ++k) {
        const Vec mu = m.drift(x);
        const Mat sg = m.sigma(x);
        for (int i = 0; i < m.d; ++i) dx[static_cast<std::size_t>(i)] = mu[static_cast<std::size_t>(i)] * dt;
        for (int c = 0; c < m.d_prime; ++c) {
            const double dw = sdt * normal_at(cfg.seed, static_cast<std::uint64_t>(path), static_cast<std::uint64_t>(k),
                                              static_cast<std::uint64_t>(c));
            for (int i = 0; i < m.d; ++i) dx[static_cast<std::size_t>(i)] += sg(i, c) * dw;
        }
        visit(k, x, dx);
        for (int i = 0; i < m.d; ++i) x[static_cast<std::size_t>(i)] += dx[static_cast<std::size_t>(i)];
        check_finite(x, path, k, "simulate_ito");
    }
    return x;
}

}  // namespace detail

inline TrajectoryBundle simulate_ito(const DiffusionModel& m, const Vec& x0, const SimConfig& cfg, int threads = 1) {
    cfg.validate();
    if (static_cast<int>(x0.size()) != m.d) throw std::invalid_argument("simulate_ito: x0 dimension mismatch");
    TrajectoryBundle out;
    out.t_end = cfg.t_end;
    out.steps = cfg.steps;
    out.seed = cfg.seed;
    out.terminal_x.assign(static_cast<std::size_t>(cfg.n_paths), Vec{});
    parallel_for(static_cast<std::size_t>(cfg.n_paths), threads, [&](std::size_t p) {
        out.terminal_x[p] = detail::em_path(m, x0, cfg, static_cast<long>(p), [](int, const Vec&, const Vec&) {});
    });
    return out;
}

// Terminal signature of the chord (piecewise-linear) interpolation of one
// simulated path of the base model.
inline TruncatedTensor<double> chord_signature_path(const DiffusionModel& m, const Vec& x0, int n,
                                                    const SimConfig& cfg, long path) {
    TruncatedTensor<double> sig = TruncatedTensor<double>::unit(m.d, n);
    detail::em_path(m, x0, cfg, path, [&](int, const Vec&, const Vec& dx) {
        sig = tensor_mul(sig, segment_signature(dx, n));
    });
    return sig;
}

// Terminal state of one path of the lifted Ito SDE under explicit
// Euler-Maruyama.
inline TruncatedTensor<double> lifted_em_path(const LiftedDiffusion& L, const TruncatedTensor<double>& x0,
                                              const SimConfig& cfg, long path) {
    const DiffusionModel& m = L.base();
    const int n = L.truncation_degree();
    const double dt = cfg.t_end / cfg.steps;
    const double sdt = std::sqrt(dt);
    TruncatedTensor<double> x = x0;
    Vec dw(static_cast<std::size_t>(m.d_prime));
    for (int k = 0; k < cfg.steps; ++k) {
        const Vec x1 = x.degree1();
        for (int c = 0; c < m.d_prime; ++c)
            dw[static_cast<std::size_t>(c)] = sdt * normal_at(cfg.seed, static_cast<std::uint64_t>(path),
                                                              static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(c));
        // g = mu_hat dt + (1/2) b_hat dt + sigma dW as a degree-(1,2) element
        TruncatedTensor<double> g = L.generator_tensor(m.drift(x1), m.diffusion_matrix(x1));
        g *= dt;
        const Vec sw = matvec(m.sigma(x1), dw);
        for (int i = 0; i < m.d; ++i) g[degree_offset(m.d, 1) + static_cast<std::size_t>(i)] += sw[static_cast<std::size_t>(i)];
        x += tensor_mul(x, g);
        detail::check_finite(x.coeffs(), path, k, "simulate_generalized_signature");
    }
    return x;
}

inline TrajectoryBundle simulate_generalized_signature(const LiftedDiffusion& L, const TruncatedTensor<double>& x0,
                                                       const SimConfig& cfg, int threads = 1) {
    cfg.validate();
    if (x0.coeffs()[0] != 1.0)
        throw std::invalid_argument("simulate_generalized_signature: degree-0 component of x0 must be 1");
    if (x0.dim_d() != L.base().d || x0.degree_n() != L.truncation_degree())
        throw std::invalid_argument("simulate_generalized_signature: x0 shape does not match the lift");

    TrajectoryBundle out;
    out.t_end = cfg.t_end;
    out.steps = cfg.steps;
    out.seed = cfg.seed;
    out.terminal_tensor.assign(static_cast<std::size_t>(cfg.n_paths), TruncatedTensor<double>());
    parallel_for(static_cast<std::size_t>(cfg.n_paths), threads, [&](std::size_t p) {
        if (cfg.scheme == Scheme::chord_signature) {
            const auto sig = chord_signature_path(L.base(), x0.degree1(), L.truncation_degree(), cfg, static_cast<long>(p));
            out.terminal_tensor[p] = tensor_mul(x0, sig);
        } else {
            out.terminal_tensor[p] = lifted_em_path(L, x0, cfg, static_cast<long>(p));
        }
    });
    return out;
}

}  // namespace sigcf
