#include <doctest.h>

#include <cmath>
#include <complex>

#include "sigcf/levy.hpp"
#include "test_util.hpp"

using namespace sigcf;

namespace {

Mat skew_2d(double l12) {
    Mat m(2, 2);
    m(0, 1) = l12;
    m(1, 0) = -l12;
    return m;
}

// random skew matrix with prescribed frequencies (possibly repeated) and
// kernel dimension, conjugated by a random rotation
Mat skew_with_spectrum(const std::vector<double>& etas, int d0, std::mt19937_64& g) {
    const int d = 2 * static_cast<int>(etas.size()) + d0;
    Mat s(d, d);
    for (std::size_t i = 0; i < etas.size(); ++i) {
        s(2 * static_cast<int>(i), 2 * static_cast<int>(i) + 1) = -etas[i];
        s(2 * static_cast<int>(i) + 1, 2 * static_cast<int>(i)) = etas[i];
    }
    const Mat q = testutil::random_orthogonal(d, g);
    return transpose(q) * s * q;
}

}  // namespace

TEST_CASE("canonical form of an already-canonical 2x2 block") {
    const auto c = skew_canonical_decomposition(skew_2d(-2.0));
    REQUIRE(c.d1 == 1);
    CHECK(c.d0 == 0);
    CHECK(c.eta[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(frob_norm(c.O - Mat::identity(2)) < 1e-12);
}

TEST_CASE("canonical form of a rank-deficient 3x3 matrix") {
    Mat m(3, 3);
    m(0, 1) = 1.0;
    m(1, 0) = -1.0;
    const auto c = skew_canonical_decomposition(m);
    REQUIRE(c.d1 == 1);
    CHECK(c.d0 == 1);
    CHECK(c.eta[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(frob_norm(transpose(c.O) * c.block_form() * c.O - m) < 1e-10);
}

TEST_CASE("canonical form of the zero matrix") {
    const auto c = skew_canonical_decomposition(Mat(4, 4));
    CHECK(c.d0 == 4);
    CHECK(c.d1 == 0);
    CHECK(c.eta.empty());
    CHECK(frob_norm(c.O - Mat::identity(4)) == 0.0);
}

TEST_CASE("decomposition contract over random skew matrices, d <= 8") {
    auto rng = testutil::rng(111);
    for (int rep = 0; rep < 40; ++rep) {
        const int d = 2 + static_cast<int>(rep % 7);
        const Mat m = testutil::random_skew(d, rng);
        const auto c = skew_canonical_decomposition(m);
        CHECK(2 * c.d1 + c.d0 == d);
        CHECK(frob_norm(c.O * transpose(c.O) - Mat::identity(d)) <= 1e-12);
        CHECK(frob_norm(transpose(c.O) * c.block_form() * c.O - m) <= 1e-10 * std::max(1.0, frob_norm(m)));
        for (std::size_t i = 1; i < c.eta.size(); ++i) CHECK(c.eta[i - 1] >= c.eta[i]);
        for (double e : c.eta) CHECK(e > 0.0);
    }
}

TEST_CASE("decomposition handles repeated frequencies and prescribed kernels") {
    auto rng = testutil::rng(113);
    for (int rep = 0; rep < 10; ++rep) {
        const Mat m = skew_with_spectrum({1.7, 1.7, 0.4}, 2, rng);  // repeated eta, d0 = 2, d = 8
        const auto c = skew_canonical_decomposition(m);
        CHECK(c.d1 == 3);
        CHECK(c.d0 == 2);
        CHECK(c.eta[0] == doctest::Approx(1.7).epsilon(1e-9));
        CHECK(c.eta[1] == doctest::Approx(1.7).epsilon(1e-9));
        CHECK(c.eta[2] == doctest::Approx(0.4).epsilon(1e-9));
        CHECK(frob_norm(transpose(c.O) * c.block_form() * c.O - m) <= 1e-10 * std::max(1.0, frob_norm(m)));
    }
}

TEST_CASE("non-skew input is rejected") {
    Mat m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 0.5;
    CHECK_THROWS_AS(skew_canonical_decomposition(m), std::invalid_argument);
}

TEST_CASE("scaling the matrix scales the spectrum") {
    auto rng = testutil::rng(117);
    const Mat m = testutil::random_skew(5, rng);
    const auto c1 = skew_canonical_decomposition(m);
    Mat m3 = m;
    for (auto& v : m3.a) v *= 3.0;
    const auto c3 = skew_canonical_decomposition(m3);
    REQUIRE(c1.eta.size() == c3.eta.size());
    for (std::size_t i = 0; i < c1.eta.size(); ++i)
        CHECK(c3.eta[i] == doctest::Approx(3.0 * c1.eta[i]).epsilon(1e-10));
}

TEST_CASE("joint characteristic function: Gaussian limit and the sech value") {
    const Vec mu{0.4, -0.6};
    const auto gauss = joint_cf_bm_levy_closed(1.3, mu, Mat(2, 2));
    CHECK(gauss.real() == doctest::Approx(std::exp(-0.5 * 1.3 * (0.16 + 0.36))).epsilon(1e-13));
    CHECK(gauss.imag() == 0.0);

    const auto sech = joint_cf_bm_levy_closed(1.0, {0.0, 0.0}, skew_2d(-1.0));
    CHECK(sech.real() == doctest::Approx(1.0 / std::cosh(0.5)).epsilon(1e-13));
    CHECK(sech.real() == doctest::Approx(0.886819).epsilon(1e-6));
}

TEST_CASE("degenerate d = 3 with kernel-aligned frequency factorizes") {
    Mat m(3, 3);
    const double eta = 1.4, t = 0.9, c = 0.8;
    m(0, 1) = -eta;
    m(1, 0) = eta;
    const auto v = joint_cf_bm_levy_closed(t, {0.0, 0.0, c}, m);
    CHECK(v.real() == doctest::Approx(std::exp(-0.5 * t * c * c) / std::cosh(0.5 * eta * t)).epsilon(1e-12));
}

TEST_CASE("conditional Levy characteristic function: reference values") {
    // t = 0 and w = 0 limits
    auto rng = testutil::rng(119);
    const Mat m = testutil::random_skew(4, rng);
    CHECK(levy_cf_conditional_closed(0.0, {1, 2, 3, 4}, m).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(levy_cf_conditional_closed(1.0, {0, 0, 0, 0}, m).real() ==
          doctest::Approx(joint_cf_bm_levy_closed(1.0, {0, 0, 0, 0}, m).real()).epsilon(1e-13));

    // d = 2 closed-form number
    const auto v = levy_cf_conditional_closed(1.0, {1.0, 0.0}, skew_2d(-1.0));
    CHECK(v.real() == doctest::Approx((1.0 / std::cosh(0.5)) * std::exp(-0.25 * std::tanh(0.5))).epsilon(1e-13));
    CHECK(v.real() == doctest::Approx(0.7900620468622171).epsilon(1e-9));
}

TEST_CASE("link identity between the conditional and joint laws") {
    auto rng = testutil::rng(127);
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 2 + (rep % 4);
        const Mat m = (rep % 3 == 0) ? skew_with_spectrum({1.2}, d - 2, rng) : testutil::random_skew(d, rng);
        const Vec w = testutil::random_vec(d, rng);
        const double t = 0.3 + 0.2 * (rep % 4);
        const auto lhs = levy_cf_conditional_closed(t, w, m);
        const auto rhs = joint_cf_bm_levy_closed(t, levy_link_mu(w, m), m);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("values are real and inside (0, 1]") {
    auto rng = testutil::rng(131);
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 2 + (rep % 5);
        const Mat m = testutil::random_skew(d, rng);
        const Vec mu = testutil::random_vec(d, rng);
        const Vec w = testutil::random_vec(d, rng);
        const double t = 0.1 + 0.3 * (rep % 5);
        const auto a = joint_cf_bm_levy_closed(t, mu, m);
        const auto b = levy_cf_conditional_closed(t, w, m);
        CHECK(a.imag() == 0.0);
        CHECK(a.real() > 0.0);
        CHECK(a.real() <= 1.0);
        CHECK(b.imag() == 0.0);
        CHECK(b.real() > 0.0);
        CHECK(b.real() <= 1.0);
        CHECK(joint_cf_bm_levy_closed(0.0, mu, m).real() == 1.0);
    }
}

TEST_CASE("orthogonal invariance of the closed form") {
    auto rng = testutil::rng(137);
    for (int rep = 0; rep < 10; ++rep) {
        const int d = 4;
        const Mat m = testutil::random_skew(d, rng);
        const Vec mu = testutil::random_vec(d, rng);
        const Mat M = testutil::random_orthogonal(d, rng);
        const auto [mu_r, m_r] = rotate_parameters(mu, m, M);
        const double t = 0.8;
        CHECK(std::abs(joint_cf_bm_levy_closed(t, mu, m) - joint_cf_bm_levy_closed(t, mu_r, m_r)) < 1e-12);
    }

    // identity map and a permutation on a degenerate d = 3 spectrum
    const Mat eye = Mat::identity(3);
    Mat m3(3, 3);
    m3(0, 1) = 0.9;
    m3(1, 0) = -0.9;
    const auto [mu_id, m_id] = rotate_parameters({1, 2, 3}, m3, eye);
    CHECK(frob_norm(m_id - m3) == 0.0);
    Mat perm(3, 3);
    perm(0, 2) = 1.0;
    perm(1, 0) = 1.0;
    perm(2, 1) = 1.0;
    const auto [mu_p, m_p] = rotate_parameters({1, 2, 3}, m3, perm);
    (void)mu_p;
    const auto c0 = skew_canonical_decomposition(m3);
    const auto cp = skew_canonical_decomposition(m_p);
    CHECK(c0.d0 == cp.d0);
    REQUIRE(c0.eta.size() == cp.eta.size());
    for (std::size_t i = 0; i < c0.eta.size(); ++i) CHECK(c0.eta[i] == doctest::Approx(cp.eta[i]).epsilon(1e-12));

    Mat not_orth(3, 3);
    not_orth(0, 0) = 2.0;
    CHECK_THROWS_AS(rotate_parameters({1, 2, 3}, m3, not_orth), std::invalid_argument);
}

TEST_CASE("closed-form factors solve the Riccati equation") {
    // h'(t) = 2 h(t)^2 - eta^2 / 8, h(0) = 0; amplitude(0) = 1
    const Mat m = skew_2d(-1.7);
    const auto c = skew_canonical_decomposition(m);
    const auto at0 = closed_form_factors(c, 0.0, {0.0, 0.0});
    CHECK(at0.amplitude[0] == 1.0);
    CHECK(at0.h[0] == 0.0);
    const double eta = c.eta[0];
    for (double t : {0.2, 0.7, 1.4}) {
        const double dh = 1e-5;
        const auto fp = closed_form_factors(c, t + dh, {0.0, 0.0});
        const auto fm = closed_form_factors(c, t - dh, {0.0, 0.0});
        const auto f0 = closed_form_factors(c, t, {0.0, 0.0});
        const double lhs = (fp.h[0] - fm.h[0]) / (2.0 * dh);
        const double rhs = 2.0 * f0.h[0] * f0.h[0] - eta * eta / 8.0;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
}
