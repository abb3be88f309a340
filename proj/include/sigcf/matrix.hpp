#pragma once

// Small dense matrix helpers and a cyclic Jacobi eigensolver for real
// symmetric matrices. Everything here works at desk scale (d <= 8 or so).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sigcf {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("Mat multiply: shape mismatch");
    Mat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const double v = x(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
        }
    return z;
}

inline Mat operator-(const Mat& x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("Mat subtract: shape mismatch");
    Mat z = x;
    for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
    return z;
}

inline Mat transpose(const Mat& x) {
    Mat z(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) z(j, i) = x(i, j);
    return z;
}

inline Vec matvec(const Mat& x, const Vec& v) {
    if (x.cols != static_cast<int>(v.size())) throw std::invalid_argument("matvec: shape mismatch");
    Vec out(static_cast<std::size_t>(x.rows), 0.0);
    for (int i = 0; i < x.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < x.cols; ++j) s += x(i, j) * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

inline double frob_norm(const Mat& x) {
    double s = 0.0;
    for (double v : x.a) s += v * v;
    return std::sqrt(s);
}

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline bool is_skew(const Mat& m, double rel_tol = 1e-12) {
    if (m.rows != m.cols) return false;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            const double a = m(i, j) + m(j, i);
            num += a * a;
            den += m(i, j) * m(i, j);
        }
    return std::sqrt(num) <= rel_tol * std::max(1.0, std::sqrt(den));
}

inline bool is_orthogonal(const Mat& m, double tol = 1e-10) {
    if (m.rows != m.cols) return false;
    return frob_norm(m * transpose(m) - Mat::identity(m.rows)) <= tol;
}

// Cyclic Jacobi for real symmetric matrices. Eigenvectors come back as the
// columns of V; eigenvalues are unsorted.
inline void jacobi_symmetric_eig(const Mat& m, Vec& values, Mat& vectors, int max_sweeps = 64) {
    if (m.rows != m.cols) throw std::invalid_argument("jacobi_symmetric_eig: square matrix required");
    const int n = m.rows;
    Mat a = m;
    Mat v = Mat::identity(n);
    double scale = 0.0;
    for (double x : a.a) scale = std::max(scale, std::abs(x));
    const double stop = (scale == 0.0) ? 0.0 : 1e-15 * scale;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= stop) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= stop) continue;
                const double theta = 0.5 * std::atan2(2.0 * apq, a(q, q) - a(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    values.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a(i, i);
    vectors = v;
}

}  // namespace sigcf
