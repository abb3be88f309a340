#pragma once

// Truncated free tensor algebra T^n(R^d): dense coefficient storage over
// words, graded product, exponential, inverse, projections and dual pairing.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigcf {

// dim T^n(R^d) = sum_{i=0}^n d^i
inline std::size_t dim_truncated(int d, int n) {
    if (d < 1) throw std::invalid_argument("dim_truncated: d must be >= 1");
    if (n < 0) throw std::invalid_argument("dim_truncated: n must be >= 0");
    std::size_t dim = 0, pw = 1;
    for (int i = 0; i <= n; ++i) {
        dim += pw;
        if (dim > (std::size_t{1} << 40))
            throw std::length_error("dim_truncated: dimension too large");
        pw *= static_cast<std::size_t>(d);
    }
    return dim;
}

// Word over the alphabet {1..d}; the empty word has length 0.
struct Word {
    std::vector<int> letters;

    Word() = default;
    explicit Word(std::vector<int> ls) : letters(std::move(ls)) {}

    int length() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }

    bool valid(int d) const {
        for (int l : letters)
            if (l < 1 || l > d) return false;
        return true;
    }

    bool operator==(const Word&) const = default;
};

// Offset of the degree-m block in the flat layout (= dim of T^{m-1}).
inline std::size_t degree_offset(int d, int m) {
    std::size_t off = 0, pw = 1;
    for (int i = 0; i < m; ++i) {
        off += pw;
        pw *= static_cast<std::size_t>(d);
    }
    return off;
}

// Index of a word inside its degree block: big-endian base-d digits.
inline std::size_t word_block_index(int d, const Word& w) {
    std::size_t idx = 0;
    for (int l : w.letters) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(l - 1);
    return idx;
}

inline std::size_t word_flat_index(int d, const Word& w) {
    return degree_offset(d, w.length()) + word_block_index(d, w);
}

inline Word word_from_block_index(int d, int degree, std::size_t idx) {
    Word w;
    w.letters.assign(static_cast<std::size_t>(degree), 1);
    for (int pos = degree - 1; pos >= 0; --pos) {
        w.letters[static_cast<std::size_t>(pos)] = static_cast<int>(idx % static_cast<std::size_t>(d)) + 1;
        idx /= static_cast<std::size_t>(d);
    }
    return w;
}

template <class S = double>
class TruncatedTensor {
  public:
    using scalar_type = S;

    TruncatedTensor() : d_(1), n_(0), c_(1, S{}) {}

    TruncatedTensor(int d, int n) : d_(d), n_(n), c_(dim_truncated(d, n), S{}) {}

    static TruncatedTensor unit(int d, int n) {
        TruncatedTensor t(d, n);
        t.c_[0] = S{1};
        return t;
    }

    // basis letter e_i as a degree-1 element, i in {1..d}; the degree-1
    // block sits right after the scalar slot
    static TruncatedTensor basis(int d, int n, int i) {
        if (i < 1 || i > d) throw std::invalid_argument("basis: letter out of range");
        TruncatedTensor t(d, n);
        if (n >= 1) t.c_[static_cast<std::size_t>(i)] = S{1};
        return t;
    }

    static TruncatedTensor from_degree1(int n, const std::vector<S>& v) {
        const int d = static_cast<int>(v.size());
        TruncatedTensor t(d, n);
        if (n >= 1)
            for (std::size_t i = 0; i < v.size(); ++i) t.c_[1 + i] = v[i];
        return t;
    }

    int dim_d() const { return d_; }
    int degree_n() const { return n_; }
    std::size_t size() const { return c_.size(); }

    const std::vector<S>& coeffs() const { return c_; }
    std::vector<S>& coeffs() { return c_; }

    S operator[](std::size_t i) const { return c_[i]; }
    S& operator[](std::size_t i) { return c_[i]; }

    // pi^I coordinate projection
    S coordinate(const Word& w) const {
        if (w.length() > n_) throw std::invalid_argument("coordinate: word longer than truncation degree");
        if (!w.valid(d_)) throw std::invalid_argument("coordinate: letter outside {1..d}");
        return c_[word_flat_index(d_, w)];
    }

    void set_coordinate(const Word& w, S v) {
        if (w.length() > n_) throw std::invalid_argument("set_coordinate: word longer than truncation degree");
        if (!w.valid(d_)) throw std::invalid_argument("set_coordinate: letter outside {1..d}");
        c_[word_flat_index(d_, w)] = v;
    }

    // degree-1 part as a plain vector
    std::vector<S> degree1() const {
        std::vector<S> v(static_cast<std::size_t>(d_), S{});
        if (n_ >= 1)
            for (int i = 0; i < d_; ++i) v[static_cast<std::size_t>(i)] = c_[degree_offset(d_, 1) + static_cast<std::size_t>(i)];
        return v;
    }

    TruncatedTensor& operator+=(const TruncatedTensor& o) {
        require_same_shape(o, "operator+=");
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    TruncatedTensor& operator-=(const TruncatedTensor& o) {
        require_same_shape(o, "operator-=");
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    TruncatedTensor& operator*=(S a) {
        for (auto& x : c_) x *= a;
        return *this;
    }

    friend TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b) { return a += b; }
    friend TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b) { return a -= b; }
    friend TruncatedTensor operator*(S a, TruncatedTensor t) { return t *= a; }
    friend TruncatedTensor operator*(TruncatedTensor t, S a) { return t *= a; }

    void require_same_shape(const TruncatedTensor& o, const char* who) const {
        if (d_ != o.d_ || n_ != o.n_)
            throw std::invalid_argument(std::string(who) + ": mismatched (d, n)");
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : c_) m = std::max(m, std::abs(x));
        return m;
    }

  private:
    int d_;
    int n_;
    std::vector<S> c_;
};

// Graded truncated product: degree-m block of a*b is sum_k rho^k(a) ox rho^{m-k}(b).
template <class S>
TruncatedTensor<S> tensor_mul(const TruncatedTensor<S>& a, const TruncatedTensor<S>& b) {
    a.require_same_shape(b, "tensor_mul");
    const int d = a.dim_d(), n = a.degree_n();
    TruncatedTensor<S> out(d, n);

    std::vector<std::size_t> off(static_cast<std::size_t>(n) + 1), len(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) {
        off[static_cast<std::size_t>(m)] = degree_offset(d, m);
        len[static_cast<std::size_t>(m)] = (m == 0) ? 1 : len[static_cast<std::size_t>(m - 1)] * static_cast<std::size_t>(d);
    }
    for (int m = 0; m <= n; ++m) {
        for (int k = 0; k <= m; ++k) {
            const S* pa = a.coeffs().data() + off[static_cast<std::size_t>(k)];
            const S* pb = b.coeffs().data() + off[static_cast<std::size_t>(m - k)];
            S* po = out.coeffs().data() + off[static_cast<std::size_t>(m)];
            const std::size_t la = len[static_cast<std::size_t>(k)], lb = len[static_cast<std::size_t>(m - k)];
            for (std::size_t iu = 0; iu < la; ++iu) {
                const S au = pa[iu];
                if (au == S{}) continue;
                S* row = po + iu * lb;
                for (std::size_t iv = 0; iv < lb; ++iv) row[iv] += au * pb[iv];
            }
        }
    }
    return out;
}

template <class S>
TruncatedTensor<S> operator*(const TruncatedTensor<S>& a, const TruncatedTensor<S>& b) {
    return tensor_mul(a, b);
}

// exp(a) = sum_{k<=n} a^{ox k}/k!, requires zero scalar component.
template <class S>
TruncatedTensor<S> tensor_exp(const TruncatedTensor<S>& a) {
    if (a.coeffs()[0] != S{})
        throw std::invalid_argument("tensor_exp: scalar component must be zero");
    const int n = a.degree_n();
    TruncatedTensor<S> acc = TruncatedTensor<S>::unit(a.dim_d(), n);
    TruncatedTensor<S> term = acc;
    for (int k = 1; k <= n; ++k) {
        term = tensor_mul(term, a);
        term *= S{1} / static_cast<S>(k);
        acc += term;
    }
    return acc;
}

// a^{-1} = (1/a0) sum_{k<=n} (1 - a/a0)^{ox k}, requires a0 != 0.
template <class S>
TruncatedTensor<S> tensor_inverse(const TruncatedTensor<S>& a) {
    const S a0 = a.coeffs()[0];
    if (a0 == S{}) throw std::invalid_argument("tensor_inverse: zero scalar component is not invertible");
    const int d = a.dim_d(), n = a.degree_n();
    TruncatedTensor<S> v = TruncatedTensor<S>::unit(d, n);
    v -= (S{1} / a0) * a;  // scalar part is exactly 0
    TruncatedTensor<S> acc = TruncatedTensor<S>::unit(d, n);
    TruncatedTensor<S> term = acc;
    for (int k = 1; k <= n; ++k) {
        term = tensor_mul(term, v);
        acc += term;
    }
    acc *= S{1} / a0;
    return acc;
}

// pi^m: keep degrees <= m (embedded back into T^n); m < 0 gives the zero element.
template <class S>
TruncatedTensor<S> project_truncate(const TruncatedTensor<S>& a, int m) {
    TruncatedTensor<S> out(a.dim_d(), a.degree_n());
    if (m < 0) return out;
    const std::size_t keep = dim_truncated(a.dim_d(), std::min(m, a.degree_n()));
    for (std::size_t i = 0; i < keep; ++i) out[i] = a[i];
    return out;
}

// rho^m: keep only the degree-m part; outside [0, n] gives the zero element.
template <class S>
TruncatedTensor<S> project_degree(const TruncatedTensor<S>& a, int m) {
    TruncatedTensor<S> out(a.dim_d(), a.degree_n());
    if (m < 0 || m > a.degree_n()) return out;
    const std::size_t b = degree_offset(a.dim_d(), m);
    const std::size_t e = degree_offset(a.dim_d(), m + 1);
    for (std::size_t i = b; i < e && i < a.size(); ++i) out[i] = a[i];
    return out;
}

// A linear functional on T^n(E) is parametrized by a tensor of dual
// coefficients; the pairing is the word-wise inner product.
template <class S = double>
using LinearFunctional = TruncatedTensor<S>;

template <class S>
S pair(const TruncatedTensor<S>& lambda, const TruncatedTensor<S>& a) {
    lambda.require_same_shape(a, "pair");
    S acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += lambda[i] * a[i];
    return acc;
}

}  // namespace sigcf
