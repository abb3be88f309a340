#include <doctest.h>

#include <cmath>
#include <complex>

#include "sigcf/expected_sig.hpp"
#include "sigcf/levy.hpp"
#include "test_util.hpp"

using namespace sigcf;
using testutil::max_abs_diff;

namespace {

Mat skew_2d(double l12) {
    Mat m(2, 2);
    m(0, 1) = l12;
    m(1, 0) = -l12;
    return m;
}

TruncatedTensor<double> generator_tensor(const Vec& mu, const Mat& b, int n) {
    const int d = static_cast<int>(mu.size());
    TruncatedTensor<double> g(d, n);
    for (int i = 0; i < d; ++i) g.set_coordinate(Word{{i + 1}}, mu[static_cast<std::size_t>(i)]);
    if (n >= 2)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g.set_coordinate(Word{{i + 1, j + 1}}, 0.5 * b(i, j));
    return g;
}

Mat random_psd(int d, std::mt19937_64& g) {
    Mat s(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s(i, j) = testutil::runif(g);
    return s * transpose(s);
}

}  // namespace

TEST_CASE("Brownian expected signature: even degrees only, Phi_2 = (t/2) sum e_j e_j") {
    const int d = 3, n = 4;
    const auto s = expected_signature_const_coeff(Vec(d, 0.0), Mat::identity(d), n);
    const auto at = s.eval(0.7);
    for (int i = 1; i <= d; ++i) {
        CHECK(at.coordinate(Word{{i}}) == 0.0);
        for (int j = 1; j <= d; ++j) {
            CHECK(at.coordinate(Word{{i, j}}) == doctest::Approx(i == j ? 0.35 : 0.0));
            for (int k = 1; k <= d; ++k) CHECK(at.coordinate(Word{{i, j, k}}) == 0.0);
        }
    }
    CHECK(at.coordinate(Word{}) == 1.0);
    // Phi_m(0) = 0 for m >= 1
    const auto at0 = s.eval(0.0);
    CHECK(at0.coordinate(Word{}) == 1.0);
    for (std::size_t i = 1; i < at0.size(); ++i) CHECK(at0[i] == 0.0);
}

TEST_CASE("pure drift gives the signature of a line") {
    const Vec c{0.4, -1.1};
    const auto s = expected_signature_const_coeff(c, Mat(2, 2), 4);
    const double t = 1.3;
    const auto expected = tensor_exp(TruncatedTensor<double>::from_degree1(4, {c[0] * t, c[1] * t}));
    CHECK(max_abs_diff(s.eval(t), expected) < 1e-12);
}

TEST_CASE("series equals the tensor exponential of t (mu_hat + b_hat/2)") {
    auto rng = testutil::rng(211);
    for (int d = 1; d <= 3; ++d) {
        const int n = 6;
        const Vec mu = testutil::random_vec(d, rng);
        const Mat b = random_psd(d, rng);
        const auto s = expected_signature_const_coeff(mu, b, n);
        for (double t : {0.25, 1.0, 2.0}) {
            const auto direct = tensor_exp(t * generator_tensor(mu, b, n));
            CHECK(max_abs_diff(s.eval(t), direct) < 1e-12);
        }
    }
}

TEST_CASE("series coefficients satisfy the recursion symbolically") {
    // (k+1) phi[m][k+1] = mu_hat ox phi[m-1][k] + 1/2 b_hat ox phi[m-2][k]
    auto rng = testutil::rng(223);
    const int d = 2, n = 5;
    const Vec mu = testutil::random_vec(d, rng);
    const Mat b = random_psd(d, rng);
    const auto s = expected_signature_const_coeff(mu, b, n);
    for (int m = 1; m <= n; ++m) {
        std::size_t blk = 1;
        for (int i = 0; i < m; ++i) blk *= static_cast<std::size_t>(d);
        const auto& cur = s.phi[static_cast<std::size_t>(m)];
        for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
            std::vector<double> rhs(blk, 0.0);
            if (k < s.phi[static_cast<std::size_t>(m - 1)].size()) {
                const auto& a = s.phi[static_cast<std::size_t>(m - 1)][k];
                for (int j = 0; j < d; ++j)
                    for (std::size_t i = 0; i < a.size(); ++i)
                        rhs[static_cast<std::size_t>(j) * a.size() + i] += mu[static_cast<std::size_t>(j)] * a[i];
            }
            if (m >= 2 && k < s.phi[static_cast<std::size_t>(m - 2)].size()) {
                const auto& a = s.phi[static_cast<std::size_t>(m - 2)][k];
                for (int j1 = 0; j1 < d; ++j1)
                    for (int j2 = 0; j2 < d; ++j2)
                        for (std::size_t i = 0; i < a.size(); ++i)
                            rhs[static_cast<std::size_t>(j1 * d + j2) * a.size() + i] += 0.5 * b(j1, j2) * a[i];
            }
            for (std::size_t i = 0; i < blk; ++i)
                CHECK(static_cast<double>(k + 1) * cur[k + 1][i] == doctest::Approx(rhs[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("Gaussian moments read from the expected signature") {
    // E[<u, W_t>^2] = t |u|^2 from the degree-2 part
    const int d = 2;
    const auto s = expected_signature_const_coeff(Vec(d, 0.0), Mat::identity(d), 2);
    const Vec u{0.8, -0.5};
    const double t = 1.7;
    const auto at = s.eval(t);
    double m2 = 0.0;
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j)
            m2 += u[static_cast<std::size_t>(i - 1)] * u[static_cast<std::size_t>(j - 1)] * at.coordinate(Word{{i, j}});
    CHECK(2.0 * m2 == doctest::Approx(t * (u[0] * u[0] + u[1] * u[1])).epsilon(1e-13));
    CHECK_THROWS_AS(expected_signature_const_coeff(Vec(2, 0.0), Mat::identity(2), -1), std::invalid_argument);
}

TEST_CASE("Taylor terms vanish for the zero functional") {
    const auto diag = taylor_cf_const_coeff(Vec(2, 0.0), Mat::identity(2), TruncatedTensor<double>(2, 2), 1.0, 8);
    for (const auto& s : diag.partial_sums) CHECK(std::abs(s - std::complex<double>(1.0, 0.0)) == 0.0);
    for (double m : diag.term_magnitudes) CHECK(m == 0.0);
}

TEST_CASE("Levy functional Taylor series reproduces sech") {
    const double lam0 = 1.0, t = 1.0;  // lam0 * t / 2 = 0.5
    const Mat Lambda = skew_2d(-lam0);
    TruncatedTensor<double> lam(2, 2);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) lam.set_coordinate(Word{{i, j}}, 0.5 * Lambda(i - 1, j - 1));

    const auto diag = taylor_cf_const_coeff(Vec(2, 0.0), Mat::identity(2), lam, t, 24);
    // first coefficients of sech(z) at z = lam0 t / 2
    CHECK(diag.term_magnitudes[0] == 0.0);  // m = 1
    CHECK(diag.term_magnitudes[1] == doctest::Approx(std::pow(lam0 * t, 2) / 8.0).epsilon(1e-12));
    CHECK(diag.term_magnitudes[3] == doctest::Approx(5.0 * std::pow(lam0 * t, 4) / 384.0).epsilon(1e-12));
    CHECK(std::abs(diag.value() - std::complex<double>(1.0 / std::cosh(0.5 * lam0 * t), 0.0)) < 1e-6);
    CHECK(diag.converged);
    CHECK(!diag.diverging);
    // the estimated scaling radius reflects the sech pole at lam0 t = pi
    CHECK(diag.roc_estimate > 2.0);
    CHECK(diag.roc_estimate < 4.5);
}

TEST_CASE("Taylor series diverges once lam0 t passes the pole") {
    const double lam0 = 8.0, t = 1.0;
    TruncatedTensor<double> lam(2, 2);
    lam.set_coordinate(Word{{1, 2}}, -0.5 * lam0);
    lam.set_coordinate(Word{{2, 1}}, 0.5 * lam0);
    const auto diag = taylor_cf_const_coeff(Vec(2, 0.0), Mat::identity(2), lam, t, 24);
    CHECK(diag.diverging);
    CHECK(!diag.converged);
    CHECK(diag.term_magnitudes.back() > diag.term_magnitudes[5]);
}

TEST_CASE("monotone truncation of partial sums") {
    TruncatedTensor<double> lam(2, 2);
    lam.set_coordinate(Word{{1, 2}}, -0.4);
    lam.set_coordinate(Word{{2, 1}}, 0.4);
    lam.set_coordinate(Word{{1}}, 0.3);
    const auto diag = taylor_cf_const_coeff(Vec(2, 0.0), Mat::identity(2), lam, 0.9, 16);
    for (std::size_t m = 1; m < diag.partial_sums.size(); ++m)
        CHECK(std::abs(diag.partial_sums[m] - diag.partial_sums[m - 1]) ==
              doctest::Approx(diag.term_magnitudes[m - 1]).epsilon(1e-12));
}

TEST_CASE("level-1 Taylor series gives the Gaussian characteristic function") {
    const Vec u{0.8, -0.6};
    TruncatedTensor<double> lam(2, 1);
    lam.set_coordinate(Word{{1}}, u[0]);
    lam.set_coordinate(Word{{2}}, u[1]);
    const double t = 0.9;
    const auto bm = taylor_cf_const_coeff(Vec(2, 0.0), Mat::identity(2), lam, t, 20);
    CHECK(std::abs(bm.value() - std::complex<double>(std::exp(-0.5 * t), 0.0)) < 1e-10);  // |u| = 1

    const Vec c{0.5, 0.2};
    const auto drift = taylor_cf_const_coeff(c, Mat::identity(2), lam, t, 24);
    const std::complex<double> exact =
        std::exp(std::complex<double>(-0.5 * t, t * (u[0] * c[0] + u[1] * c[1])));
    CHECK(std::abs(drift.value() - exact) < 1e-9);
}

TEST_CASE("Taylor evaluation at a shifted start matches the conditional Levy law") {
    // the generalized-signature characteristic function at start (1, w, 0)
    // with the plain Levy functional equals L(t, w; Lambda)
    const Mat Lambda = skew_2d(-0.9);
    TruncatedTensor<double> lam(2, 2);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) lam.set_coordinate(Word{{i, j}}, 0.5 * Lambda(i - 1, j - 1));
    const Vec w{0.7, -0.4};
    const double t = 0.8;
    const auto diag = taylor_cf_const_coeff(Vec(2, 0.0), Mat::identity(2), lam, t, 24, {1.0, w[0], w[1]});
    const auto closed = levy_cf_conditional_closed(t, w, Lambda);
    CHECK(std::abs(diag.value() - closed) < 1e-8);
}

TEST_CASE("series-driven entry point recovers the base model") {
    auto rng = testutil::rng(229);
    const Vec mu = testutil::random_vec(2, rng, -0.5, 0.5);
    const Mat b = random_psd(2, rng);
    const auto series = expected_signature_const_coeff(mu, b, 3);
    const auto lam = testutil::random_tensor(2, 2, rng, -0.3, 0.3);
    const auto a = taylor_cf(series, lam, 0.8, 12);
    const auto direct = taylor_cf_const_coeff(mu, b, lam, 0.8, 12);
    CHECK(std::abs(a.value() - direct.value()) < 1e-13);

    const auto short_series = expected_signature_const_coeff(mu, b, 1);
    CHECK_THROWS_AS(taylor_cf(short_series, lam, 0.8, 12), std::invalid_argument);
}
