#pragma once

// Piecewise-linear paths and their exact truncated signatures via Chen's
// identity. These are both the chord lift of simulated diffusions and the
// algebraic oracle for the identity test suites.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "sigcf/tensor.hpp"

namespace sigcf {

struct PiecewiseLinearPath {
    int d = 0;
    std::vector<std::vector<double>> vertices;  // at least one vertex

    PiecewiseLinearPath() = default;
    PiecewiseLinearPath(int dim, std::vector<std::vector<double>> verts)
        : d(dim), vertices(std::move(verts)) {
        if (vertices.empty()) throw std::invalid_argument("PiecewiseLinearPath: needs at least one vertex");
        for (const auto& v : vertices)
            if (static_cast<int>(v.size()) != d)
                throw std::invalid_argument("PiecewiseLinearPath: vertex dimension mismatch");
    }

    int segments() const { return static_cast<int>(vertices.size()) - 1; }
};

// Signature of a straight segment with the given increment: exp of the
// degree-1 tensor, i.e. the iterated integrals Delta^{ox k}/k!.
inline TruncatedTensor<double> segment_signature(const std::vector<double>& increment, int n) {
    return tensor_exp(TruncatedTensor<double>::from_degree1(n, increment));
}

inline TruncatedTensor<double> path_signature(const PiecewiseLinearPath& p, int n) {
    TruncatedTensor<double> sig = TruncatedTensor<double>::unit(p.d, n);
    std::vector<double> inc(static_cast<std::size_t>(p.d));
    for (int s = 0; s < p.segments(); ++s) {
        for (int i = 0; i < p.d; ++i)
            inc[static_cast<std::size_t>(i)] = p.vertices[static_cast<std::size_t>(s) + 1][static_cast<std::size_t>(i)] -
                                               p.vertices[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
        sig = tensor_mul(sig, segment_signature(inc, n));
    }
    return sig;
}

inline PiecewiseLinearPath reverse_path(const PiecewiseLinearPath& p) {
    PiecewiseLinearPath r = p;
    std::reverse(r.vertices.begin(), r.vertices.end());
    return r;
}

// Concatenation: q is translated so that it starts where p ends.
inline PiecewiseLinearPath concat_paths(const PiecewiseLinearPath& p, const PiecewiseLinearPath& q) {
    if (p.d != q.d) throw std::invalid_argument("concat_paths: dimension mismatch");
    PiecewiseLinearPath r = p;
    const auto& join = p.vertices.back();
    const auto& q0 = q.vertices.front();
    for (std::size_t k = 1; k < q.vertices.size(); ++k) {
        std::vector<double> v(static_cast<std::size_t>(p.d));
        for (int i = 0; i < p.d; ++i)
            v[static_cast<std::size_t>(i)] = join[static_cast<std::size_t>(i)] +
                                             (q.vertices[k][static_cast<std::size_t>(i)] - q0[static_cast<std::size_t>(i)]);
        r.vertices.push_back(std::move(v));
    }
    return r;
}

}  // namespace sigcf
