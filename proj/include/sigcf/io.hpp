#pragma once

// JSON and CSV interchange: tensors, matrices, estimates, residual reports,
// and piecewise-linear paths. Numeric formatting is fixed so that a given
// seed reproduces byte-identical files.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigcf/estimators.hpp"
#include "sigcf/matrix.hpp"
#include "sigcf/path.hpp"
#include "sigcf/pde.hpp"
#include "sigcf/tensor.hpp"

namespace sigcf {

using json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json tensor_to_json(const TruncatedTensor<double>& t) {
    return json{{"d", t.dim_d()}, {"n", t.degree_n()}, {"coeffs", t.coeffs()}};
}

inline TruncatedTensor<double> tensor_from_json(const json& j) {
    TruncatedTensor<double> t(j.at("d").get<int>(), j.at("n").get<int>());
    const auto c = j.at("coeffs").get<std::vector<double>>();
    if (c.size() != t.size()) throw std::invalid_argument("tensor_from_json: coefficient count does not match (d, n)");
    t.coeffs() = c;
    return t;
}

inline json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("mat_from_json: expected a non-empty array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.at(0).size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j.at(static_cast<std::size_t>(i)).size()) != cols)
            throw std::invalid_argument("mat_from_json: ragged rows");
        for (int c = 0; c < cols; ++c) m(i, c) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

inline json estimate_to_json(const ComplexEstimate& e) {
    return json{{"mean_re", e.mean.real()},
                {"mean_im", e.mean.imag()},
                {"stderr_re", e.stderr_re},
                {"stderr_im", e.stderr_im},
                {"n_samples", e.n_samples}};
}

inline json residual_report_to_json(const ResidualReport& r) {
    json pts = json::array();
    for (const auto& p : r.points) {
        pts.push_back(json{{"t", p.t},
                           {"x", p.x},
                           {"time_re", p.terms.time_term.real()},
                           {"time_im", p.terms.time_term.imag()},
                           {"generator_re", p.terms.generator_term.real()},
                           {"generator_im", p.terms.generator_term.imag()},
                           {"first_order_re", p.terms.first_order_term.real()},
                           {"first_order_im", p.terms.first_order_term.imag()},
                           {"zeroth_order_re", p.terms.zeroth_order_term.real()},
                           {"zeroth_order_im", p.terms.zeroth_order_term.imag()},
                           {"abs_residual", std::abs(p.terms.total())}});
    }
    return json{{"max_abs_residual", r.max_abs}, {"mean_abs_residual", r.mean_abs}, {"points", std::move(pts)}};
}

// CSV path format: one vertex per row, d comma-separated columns
inline PiecewiseLinearPath path_from_csv(std::istream& in) {
    std::vector<std::vector<double>> verts;
    std::string line;
    int d = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (d < 0) d = static_cast<int>(v.size());
        if (static_cast<int>(v.size()) != d) throw std::invalid_argument("path_from_csv: inconsistent column count");
        verts.push_back(std::move(v));
    }
    if (verts.empty()) throw std::invalid_argument("path_from_csv: no vertices");
    return PiecewiseLinearPath(d, std::move(verts));
}

inline void path_to_csv(const PiecewiseLinearPath& p, std::ostream& out) {
    for (const auto& v : p.vertices) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ',';
            out << format_double(v[i]);
        }
        out << '\n';
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace sigcf
