#pragma once

// shared test helpers: reproducible random inputs and independent oracles

#include <cstdint>
#include <random>
#include <vector>

#include "sigcf/matrix.hpp"
#include "sigcf/path.hpp"
#include "sigcf/tensor.hpp"

namespace testutil {

using sigcf::Mat;
using sigcf::TruncatedTensor;
using sigcf::Vec;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double runif(std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline TruncatedTensor<double> random_tensor(int d, int n, std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
    TruncatedTensor<double> t(d, n);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = runif(g, lo, hi);
    return t;
}

inline Vec random_vec(int d, std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
    Vec v(static_cast<std::size_t>(d));
    for (auto& x : v) x = runif(g, lo, hi);
    return v;
}

inline Mat random_skew(int d, std::mt19937_64& g, double lo = -2.0, double hi = 2.0) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double v = runif(g, lo, hi);
            m(i, j) = v;
            m(j, i) = -v;
        }
    return m;
}

// random orthogonal matrix via Gram-Schmidt on a Gaussian matrix
inline Mat random_orthogonal(int d, std::mt19937_64& g) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Vec> rows;
    while (static_cast<int>(rows.size()) < d) {
        Vec v(static_cast<std::size_t>(d));
        for (auto& x : v) x = nd(g);
        for (const auto& r : rows) {
            const double c = sigcf::dot(v, r);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * r[i];
        }
        const double nv = sigcf::norm2(v);
        if (nv < 1e-3) continue;
        for (auto& x : v) x /= nv;
        rows.push_back(std::move(v));
    }
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

inline sigcf::PiecewiseLinearPath random_path(int d, int n_segments, std::mt19937_64& g) {
    std::vector<Vec> verts;
    verts.push_back(random_vec(d, g));
    for (int s = 0; s < n_segments; ++s) {
        Vec v = verts.back();
        for (auto& x : v) x += runif(g, -0.5, 0.5);
        verts.push_back(std::move(v));
    }
    return sigcf::PiecewiseLinearPath(d, std::move(verts));
}

// brute-force graded product: loop over every pair of words and concatenate
inline TruncatedTensor<double> tensor_mul_bruteforce(const TruncatedTensor<double>& a,
                                                     const TruncatedTensor<double>& b) {
    const int d = a.dim_d(), n = a.degree_n();
    TruncatedTensor<double> out(d, n);
    for (int la = 0; la <= n; ++la)
        for (int lb = 0; la + lb <= n; ++lb) {
            std::size_t ba = 1, bb = 1;
            for (int i = 0; i < la; ++i) ba *= static_cast<std::size_t>(d);
            for (int i = 0; i < lb; ++i) bb *= static_cast<std::size_t>(d);
            for (std::size_t ia = 0; ia < ba; ++ia)
                for (std::size_t ib = 0; ib < bb; ++ib) {
                    const auto wa = sigcf::word_from_block_index(d, la, ia);
                    const auto wb = sigcf::word_from_block_index(d, lb, ib);
                    std::vector<int> letters = wa.letters;
                    letters.insert(letters.end(), wb.letters.begin(), wb.letters.end());
                    const sigcf::Word w{letters};
                    out[sigcf::word_flat_index(d, w)] += a.coordinate(wa) * b.coordinate(wb);
                }
        }
    return out;
}

inline double max_abs_diff(const TruncatedTensor<double>& a, const TruncatedTensor<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testutil
