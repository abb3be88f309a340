#pragma once

// Batch experiment harness behind the CLI: a single JSON config document
// describes the model, the functional, the grids and the simulation budget;
// each runner returns deterministic text output plus an exit status.

#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sigcf/diffusion.hpp"
#include "sigcf/estimators.hpp"
#include "sigcf/expected_sig.hpp"
#include "sigcf/io.hpp"
#include "sigcf/levy.hpp"
#include "sigcf/pde.hpp"
#include "sigcf/tensor.hpp"

namespace sigcf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    json doc;
    int threads = 1;

    static ExperimentConfig parse(const std::string& text) {
        ExperimentConfig cfg;
        try {
            cfg.doc = json::parse(text);
        } catch (const json::parse_error& e) {
            // byte offset gives the line context
            std::size_t line = 1, col = 1;
            for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
                if (text[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                              std::to_string(col) + ": " + e.what());
        }
        if (!cfg.doc.is_object()) throw ConfigError("config must be a JSON object");
        cfg.threads = cfg.doc.value("threads", 1);
        return cfg;
    }

    SimConfig sim() const {
        SimConfig s;
        if (doc.contains("sim")) {
            const auto& j = doc.at("sim");
            s.t_end = j.value("t_end", s.t_end);
            s.steps = j.value("steps", s.steps);
            s.n_paths = j.value("n_paths", static_cast<long>(200000));
            s.seed = j.value("seed", static_cast<std::uint64_t>(0));
            const std::string scheme = j.value("scheme", std::string("chord_signature"));
            if (scheme == "chord_signature")
                s.scheme = Scheme::chord_signature;
            else if (scheme == "euler_maruyama_lifted")
                s.scheme = Scheme::euler_maruyama_lifted;
            else
                throw ConfigError("unknown scheme: " + scheme);
        } else {
            s.n_paths = 200000;
        }
        s.validate();
        return s;
    }

    Stencil stencil() const {
        Stencil st;
        if (doc.contains("stencil")) {
            st.h_t = doc.at("stencil").value("h_t", st.h_t);
            st.h_x = doc.at("stencil").value("h_x", st.h_x);
        }
        st.validate();
        return st;
    }

    Mat skew_matrix() const {
        if (!doc.contains("Lambda")) throw ConfigError("config needs a \"Lambda\" matrix");
        const Mat m = mat_from_json(doc.at("Lambda"));
        if (!is_skew(m)) throw ConfigError("Lambda is not skew-symmetric");
        return m;
    }

    Vec vec_field(const char* key, std::size_t dim) const {
        if (!doc.contains(key)) return Vec(dim, 0.0);
        const Vec v = doc.at(key).get<Vec>();
        if (v.size() != dim) throw ConfigError(std::string(key) + " has the wrong dimension");
        return v;
    }

    std::vector<double> t_grid() const {
        if (doc.contains("t_grid")) return doc.at("t_grid").get<std::vector<double>>();
        return {doc.value("t", 1.0)};
    }

    DiffusionModel model() const {
        if (!doc.contains("model")) return DiffusionModel::brownian(2);
        const auto& j = doc.at("model");
        const std::string id = j.value("id", std::string("bm"));
        if (id == "bm") return DiffusionModel::brownian(j.value("d", 2));
        if (id == "bm_drift") return DiffusionModel::brownian_with_drift(j.at("c").get<Vec>());
        if (id == "scalar_linear") return DiffusionModel::scalar_linear(j.at("a").get<double>(), j.at("b").get<double>());
        if (id == "constant") return DiffusionModel::constant(j.at("mu").get<Vec>(), mat_from_json(j.at("sigma")));
        throw ConfigError("unknown model id: " + id);
    }
};

struct RunResult {
    int status = 0;
    std::string output;  // CSV or JSON payload, written byte-for-byte
    std::string log;     // human-readable summary for stderr/stdout
};

// closed form vs Monte Carlo for the joint Brownian/Levy-area law over a
// time grid; gate on |z| > 5
inline RunResult run_levy_table(const ExperimentConfig& cfg) {
    const Mat Lambda = cfg.skew_matrix();
    const std::size_t d = static_cast<std::size_t>(Lambda.rows);
    const Vec mu = cfg.vec_field("mu", d);
    const Vec w = cfg.vec_field("w", d);
    const SimConfig sim = cfg.sim();

    const bool as_json = cfg.doc.value("format", std::string("csv")) == "json";
    json records = json::array();
    std::ostringstream csv, log;
    csv << "t,closed_re,closed_im,mc_re,mc_im,stderr_re,stderr_im,z,n_paths,steps,seed\n";
    double worst = 0.0;
    for (double t : cfg.t_grid()) {
        LevyParams p;
        p.Lambda = Lambda;
        p.mu_vec = mu;
        p.w = w;
        p.t = t;
        const auto est = estimate_joint_bm_levy(p, sim, cfg.threads);
        // with a nonzero start the closed form follows from the link identity:
        // W = w + B gives <mu, W_t> + L = <mu, w> + <mu + w^T Lambda / 2, B_t> + L(B)
        std::complex<double> closed;
        if (norm2(w) == 0.0) {
            closed = joint_cf_bm_levy_closed(t, mu, Lambda);
        } else {
            Vec mu_eff = levy_link_mu(w, Lambda);
            for (std::size_t i = 0; i < d; ++i) mu_eff[i] += mu[i];
            closed = joint_cf_bm_levy_closed(t, mu_eff, Lambda) *
                     std::exp(std::complex<double>(0.0, dot(mu, w)));
        }
        const double z = z_score(est, closed);
        worst = std::max(worst, z);
        csv << format_double(t) << ',' << format_double(closed.real()) << ',' << format_double(closed.imag()) << ','
            << format_double(est.mean.real()) << ',' << format_double(est.mean.imag()) << ','
            << format_double(est.stderr_re) << ',' << format_double(est.stderr_im) << ',' << format_double(z) << ','
            << est.n_samples << ',' << sim.steps << ',' << sim.seed << '\n';
        if (as_json) {
            json rec = estimate_to_json(est);
            rec["params"] = json{{"t", t}, {"Lambda", mat_to_json(Lambda)}, {"mu", mu}, {"w", w}};
            rec["n_paths"] = est.n_samples;
            rec["steps"] = sim.steps;
            rec["seed"] = sim.seed;
            rec["closed_re"] = closed.real();
            rec["closed_im"] = closed.imag();
            rec["z"] = z;
            records.push_back(std::move(rec));
        }
    }
    RunResult r;
    r.output = as_json ? records.dump(2) + "\n" : csv.str();
    r.status = worst > 5.0 ? 1 : 0;
    log << "levy-table: " << cfg.t_grid().size() << " rows, max |z| = " << worst << (r.status ? " (GATE FAILED)" : "")
        << '\n';
    r.log = log.str();
    return r;
}

// residual of the closed form in the Levy-area PDE, or of a supplied level
// of the general PDE, over the acceptance-style grid
inline RunResult run_pde_residual(const ExperimentConfig& cfg) {
    const Stencil st = cfg.stencil();
    const double gate = cfg.doc.value("residual_gate", 1e-4);
    if (gate < 0.0) throw ConfigError("residual_gate must be nonnegative");
    std::vector<double> tg = cfg.doc.contains("grid") && cfg.doc.at("grid").contains("t")
                                 ? cfg.doc.at("grid").at("t").get<std::vector<double>>()
                                 : std::vector<double>{0.2, 0.5, 1.0};
    std::vector<double> cv = cfg.doc.contains("grid") && cfg.doc.at("grid").contains("coord_values")
                                 ? cfg.doc.at("grid").at("coord_values").get<std::vector<double>>()
                                 : std::vector<double>{-1.0, 0.0, 1.0};

    const std::string kind = cfg.doc.value("pde", std::string("levy"));
    ResidualReport rep;
    if (kind == "levy") {
        const Mat Lambda = cfg.skew_matrix();
        SpaceTimeField f = [&](double t, const Vec& x) { return levy_cf_conditional_closed(t, x, Lambda); };
        rep = residual_report_levy(Lambda, f, tg, cv, st);
    } else if (kind == "general") {
        // level-2 lift of Brownian motion with the Levy functional; the
        // candidate is the closed form read through the T^1 layout
        const Mat Lambda = cfg.skew_matrix();
        const int d = Lambda.rows;
        const auto L = lift_generalized_signature(DiffusionModel::brownian(d), 2);
        TruncatedTensor<double> lam(d, 2);
        for (int i = 1; i <= d; ++i)
            for (int j = 1; j <= d; ++j) lam.set_coordinate(Word{{i, j}}, 0.5 * Lambda(i - 1, j - 1));
        SpaceTimeField f = [&](double t, const Vec& x) {
            return levy_cf_conditional_closed(t, Vec(x.begin() + 1, x.end()), Lambda);
        };
        for (double t : tg) {
            std::size_t total = 1;
            for (int i = 0; i < d; ++i) total *= cv.size();
            for (std::size_t flat = 0; flat < total; ++flat) {
                std::size_t rem = flat;
                Vec x(static_cast<std::size_t>(d) + 1, 1.0);
                for (int i = 0; i < d; ++i) {
                    x[static_cast<std::size_t>(i) + 1] = cv[rem % cv.size()];
                    rem /= cv.size();
                }
                GridPointResidual g;
                g.t = t;
                g.x = x;
                g.terms = residual_general_pde_terms(L, lam, f, t, x, st);
                rep.points.push_back(std::move(g));
            }
        }
        rep.finalize();
    } else {
        throw ConfigError("unknown pde kind: " + kind);
    }

    RunResult r;
    r.output = residual_report_to_json(rep).dump(2) + "\n";
    r.status = rep.max_abs > gate ? 1 : 0;
    std::ostringstream log;
    log << "pde-residual (" << kind << "): " << rep.points.size() << " points\n";
    log << "      t        max|res|       mean|res|\n";
    for (double t : tg) {
        double mx = 0.0, mn = 0.0;
        std::size_t cnt = 0;
        for (const auto& p : rep.points)
            if (p.t == t) {
                const double a = std::abs(p.terms.total());
                mx = std::max(mx, a);
                mn += a;
                ++cnt;
            }
        if (cnt) log << "  " << format_double(t) << "  " << format_double(mx) << "  " << format_double(mn / cnt) << '\n';
    }
    log << "overall max = " << rep.max_abs << ", mean = " << rep.mean_abs << (r.status ? " (GATE FAILED)" : "") << '\n';
    r.log = log.str();
    return r;
}

// Taylor partial-sum trace, optionally with the expected-signature table
inline RunResult run_taylor(const ExperimentConfig& cfg) {
    const int m_max = cfg.doc.value("m_max", 24);
    const double t = cfg.doc.value("t", 1.0);
    const DiffusionModel m = cfg.model();
    if (!m.is_constant_coefficient) throw ConfigError("taylor requires a constant-coefficient model");
    const Vec x0(static_cast<std::size_t>(m.d), 0.0);
    const Vec mu = m.drift(x0);
    const Mat b = m.diffusion_matrix(x0);

    TruncatedTensor<double> lam;
    if (cfg.doc.contains("lambda")) {
        lam = tensor_from_json(cfg.doc.at("lambda"));
    } else if (cfg.doc.contains("Lambda")) {
        const Mat Lambda = cfg.skew_matrix();
        if (Lambda.rows != m.d) throw ConfigError("Lambda dimension does not match the model");
        lam = TruncatedTensor<double>(m.d, 2);
        for (int i = 1; i <= m.d; ++i)
            for (int j = 1; j <= m.d; ++j) lam.set_coordinate(Word{{i, j}}, 0.5 * Lambda(i - 1, j - 1));
    } else {
        throw ConfigError("taylor needs either \"lambda\" coefficients or a \"Lambda\" matrix");
    }

    const auto diag = taylor_cf_const_coeff(mu, b, lam, t, m_max);

    std::ostringstream csv;
    csv << "m,term_magnitude,partial_re,partial_im\n";
    csv << "0,," << format_double(diag.partial_sums[0].real()) << ',' << format_double(diag.partial_sums[0].imag())
        << '\n';
    for (std::size_t k = 0; k < diag.term_magnitudes.size(); ++k)
        csv << (k + 1) << ',' << format_double(diag.term_magnitudes[k]) << ','
            << format_double(diag.partial_sums[k + 1].real()) << ',' << format_double(diag.partial_sums[k + 1].imag())
            << '\n';

    if (cfg.doc.value("phi_table", false)) {
        const int n_phi = cfg.doc.value("phi_degree", lam.degree_n());
        const auto series = expected_signature_const_coeff(mu, b, n_phi);
        csv << "degree,t_power,index,coefficient\n";
        for (int deg = 0; deg <= series.n; ++deg)
            for (std::size_t k = 0; k < series.phi[static_cast<std::size_t>(deg)].size(); ++k) {
                const auto& blk = series.phi[static_cast<std::size_t>(deg)][k];
                for (std::size_t i = 0; i < blk.size(); ++i)
                    if (blk[i] != 0.0)
                        csv << deg << ',' << k << ',' << i << ',' << format_double(blk[i]) << '\n';
            }
    }

    RunResult r;
    r.output = csv.str();
    std::ostringstream log;
    log << "taylor: " << m_max << " terms, value = (" << diag.value().real() << ", " << diag.value().imag()
        << "), converged = " << (diag.converged ? "yes" : "no") << ", diverging = " << (diag.diverging ? "yes" : "no")
        << ", roc estimate = " << diag.roc_estimate << '\n';
    r.log = log.str();
    r.status = 0;
    return r;
}

// algebraic identity suites; prints one PASS/FAIL line each
inline RunResult run_identities(const ExperimentConfig& cfg) {
    int trials = 100;
    int d_max = 3, n_max = 4;
    double tol = 1e-9;
    std::uint64_t seed = 7;
    if (cfg.doc.contains("identities")) {
        const auto& j = cfg.doc.at("identities");
        trials = j.value("trials", trials);
        d_max = j.value("d_max", d_max);
        n_max = j.value("n_max", n_max);
        tol = j.value("tolerance", tol);
        seed = j.value("seed", seed);
    }
    if (tol <= 0.0) throw ConfigError("identities tolerance must be positive");
    if (trials < 1 || d_max < 1 || n_max < 1) throw ConfigError("identities parameters must be positive");

    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto rand_path = [&](int d, int segs) {
        std::vector<Vec> verts(1, Vec(static_cast<std::size_t>(d)));
        for (auto& x : verts[0]) x = U(g);
        for (int s = 0; s < segs; ++s) {
            Vec v = verts.back();
            for (auto& x : v) x += 0.5 * U(g);
            verts.push_back(std::move(v));
        }
        return PiecewiseLinearPath(d, std::move(verts));
    };

    struct Suite {
        std::string name;
        double max_err = 0.0;
        double tol = 0.0;
        bool pass() const { return max_err <= tol; }
    };
    std::vector<Suite> suites;

    {
        Suite s{"chen_identity", 0.0, tol};
        for (int k = 0; k < trials; ++k) {
            const int d = 1 + static_cast<int>(g() % static_cast<unsigned>(d_max));
            const int n = 1 + static_cast<int>(g() % static_cast<unsigned>(n_max));
            const auto p = rand_path(d, 3), q = rand_path(d, 3);
            const auto lhs = path_signature(concat_paths(p, q), n);
            const auto rhs = tensor_mul(path_signature(p, n), path_signature(q, n));
            for (std::size_t i = 0; i < lhs.size(); ++i) s.max_err = std::max(s.max_err, std::abs(lhs[i] - rhs[i]));
        }
        suites.push_back(s);
    }
    {
        Suite s{"time_reversal", 0.0, tol};
        for (int k = 0; k < trials; ++k) {
            const int d = 1 + static_cast<int>(g() % static_cast<unsigned>(d_max));
            const int n = 1 + static_cast<int>(g() % static_cast<unsigned>(n_max));
            const auto p = rand_path(d, 4);
            const auto prod = tensor_mul(path_signature(p, n), path_signature(reverse_path(p), n));
            const auto one = TruncatedTensor<double>::unit(d, n);
            for (std::size_t i = 0; i < prod.size(); ++i) s.max_err = std::max(s.max_err, std::abs(prod[i] - one[i]));
        }
        suites.push_back(s);
    }
    {
        Suite s{"refinement_invariance", 0.0, tol};
        for (int k = 0; k < trials; ++k) {
            const int d = 1 + static_cast<int>(g() % static_cast<unsigned>(d_max));
            const int n = 1 + static_cast<int>(g() % static_cast<unsigned>(n_max));
            const auto p = rand_path(d, 3);
            std::vector<Vec> verts;
            for (int seg = 0; seg < p.segments(); ++seg) {
                const auto& a = p.vertices[static_cast<std::size_t>(seg)];
                const auto& bb = p.vertices[static_cast<std::size_t>(seg) + 1];
                verts.push_back(a);
                Vec mid(a.size());
                const double u = 0.5 + 0.4 * U(g);
                for (std::size_t i = 0; i < a.size(); ++i) mid[i] = a[i] + u * (bb[i] - a[i]);
                verts.push_back(std::move(mid));
            }
            verts.push_back(p.vertices.back());
            const auto refined = PiecewiseLinearPath(p.d, std::move(verts));
            const auto sa = path_signature(p, n), sb = path_signature(refined, n);
            for (std::size_t i = 0; i < sa.size(); ++i) s.max_err = std::max(s.max_err, std::abs(sa[i] - sb[i]));
        }
        suites.push_back(s);
    }
    {
        Suite s{"inverse_multiply_back", 0.0, tol};
        for (int k = 0; k < trials; ++k) {
            const int d = 1 + static_cast<int>(g() % static_cast<unsigned>(d_max));
            const int n = 1 + static_cast<int>(g() % static_cast<unsigned>(n_max));
            TruncatedTensor<double> a(d, n);
            for (std::size_t i = 0; i < a.size(); ++i) a[i] = U(g);
            a[0] = 1.0;
            const auto prod = tensor_mul(a, tensor_inverse(a));
            const auto one = TruncatedTensor<double>::unit(d, n);
            for (std::size_t i = 0; i < prod.size(); ++i) s.max_err = std::max(s.max_err, std::abs(prod[i] - one[i]));
        }
        suites.push_back(s);
    }
    {
        Suite s{"lambda_tilde_pathwise", 0.0, tol};
        const int d = 2, n = 2;
        const auto model = DiffusionModel::brownian(d);
        SimConfig sim;
        sim.t_end = 0.5;
        sim.steps = 50;
        sim.seed = seed;
        for (int k = 0; k < trials; ++k) {
            TruncatedTensor<double> lam(d, n);
            for (std::size_t i = 0; i < lam.size(); ++i) lam[i] = U(g);
            Vec x(static_cast<std::size_t>(d));
            for (auto& v : x) v = U(g);
            const auto lt = lambda_tilde(lam, x, n);
            auto x0 = TruncatedTensor<double>::unit(d, n);
            for (int i = 0; i < d; ++i) x0.set_coordinate(Word{{i + 1}}, x[static_cast<std::size_t>(i)]);
            const auto sig = chord_signature_path(model, x, n, sim, k);
            const auto xt = tensor_mul(x0, sig);
            s.max_err = std::max(s.max_err, std::abs(pair(lam, sig) - pair(lt, xt)));
        }
        suites.push_back(s);
    }
    if (cfg.doc.contains("path_csv")) {
        // identities on a user-supplied path (CSV, one vertex per row)
        std::ifstream in(cfg.doc.at("path_csv").get<std::string>());
        if (!in) throw ConfigError("cannot open path_csv file");
        const PiecewiseLinearPath p = path_from_csv(in);
        const int n = std::min(n_max, 4);
        Suite s{"user_path_identities", 0.0, tol};
        const auto sig = path_signature(p, n);
        const auto rev = tensor_mul(sig, path_signature(reverse_path(p), n));
        const auto one = TruncatedTensor<double>::unit(p.d, n);
        for (std::size_t i = 0; i < rev.size(); ++i) s.max_err = std::max(s.max_err, std::abs(rev[i] - one[i]));
        if (p.segments() >= 2) {
            const std::size_t cut = p.vertices.size() / 2;
            PiecewiseLinearPath a(p.d, {p.vertices.begin(), p.vertices.begin() + static_cast<long>(cut) + 1});
            PiecewiseLinearPath b(p.d, {p.vertices.begin() + static_cast<long>(cut), p.vertices.end()});
            const auto glued = tensor_mul(path_signature(a, n), path_signature(b, n));
            for (std::size_t i = 0; i < sig.size(); ++i) s.max_err = std::max(s.max_err, std::abs(glued[i] - sig[i]));
        }
        suites.push_back(s);
    }
    {
        Suite s{"levy_link_closed_form", 0.0, 1e-12};
        for (int k = 0; k < trials; ++k) {
            const int d = 2 + static_cast<int>(g() % 3);
            Mat Lambda(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) {
                    const double v = 2.0 * U(g);
                    Lambda(i, j) = v;
                    Lambda(j, i) = -v;
                }
            Vec w(static_cast<std::size_t>(d));
            for (auto& v : w) v = U(g);
            const double t = 0.2 + 0.8 * std::abs(U(g));
            const auto lhs = levy_cf_conditional_closed(t, w, Lambda);
            const auto rhs = joint_cf_bm_levy_closed(t, levy_link_mu(w, Lambda), Lambda);
            s.max_err = std::max(s.max_err, std::abs(lhs - rhs));
        }
        suites.push_back(s);
    }

    RunResult r;
    std::ostringstream out;
    bool all = true;
    for (const auto& s : suites) {
        all = all && s.pass();
        out << (s.pass() ? "PASS" : "FAIL") << ' ' << s.name << " max_err=" << format_double(s.max_err)
            << " tol=" << format_double(s.tol) << '\n';
    }
    r.output = out.str();
    r.log = std::string("identities: ") + (all ? "all suites passed" : "SUITE FAILURES") + "\n";
    r.status = all ? 0 : 1;
    return r;
}

// terminal states of a plain or lifted simulation as CSV
inline RunResult run_simulate(const ExperimentConfig& cfg) {
    const DiffusionModel m = cfg.model();
    const SimConfig sim = cfg.sim();
    std::ostringstream csv;
    RunResult r;
    if (cfg.doc.contains("lift_degree")) {
        const int n = cfg.doc.at("lift_degree").get<int>();
        const auto L = lift_generalized_signature(m, n);
        auto x0 = TruncatedTensor<double>::unit(m.d, n);
        if (cfg.doc.contains("x0")) {
            const Vec x = cfg.vec_field("x0", static_cast<std::size_t>(m.d));
            for (int i = 0; i < m.d; ++i) x0.set_coordinate(Word{{i + 1}}, x[static_cast<std::size_t>(i)]);
        }
        const auto out = simulate_generalized_signature(L, x0, sim, cfg.threads);
        csv << "path";
        for (std::size_t i = 0; i < x0.size(); ++i) csv << ",c" << i;
        csv << '\n';
        for (std::size_t p = 0; p < out.terminal_tensor.size(); ++p) {
            csv << p;
            for (std::size_t i = 0; i < out.terminal_tensor[p].size(); ++i)
                csv << ',' << format_double(out.terminal_tensor[p][i]);
            csv << '\n';
        }
    } else {
        const Vec x0 = cfg.vec_field("x0", static_cast<std::size_t>(m.d));
        const auto out = simulate_ito(m, x0, sim, cfg.threads);
        csv << "path";
        for (int i = 0; i < m.d; ++i) csv << ",x" << i;
        csv << '\n';
        for (std::size_t p = 0; p < out.terminal_x.size(); ++p) {
            csv << p;
            for (double v : out.terminal_x[p]) csv << ',' << format_double(v);
            csv << '\n';
        }
    }
    r.output = csv.str();
    r.log = "simulate: done\n";
    return r;
}

}  // namespace sigcf
