#include "nchardy/io.hpp"

#include <fstream>
#include <stdexcept>

namespace nchardy {

namespace {

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("element JSON: complex entries must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const json& j, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw std::invalid_argument("element JSON: matrix must have n rows");
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw std::invalid_argument("element JSON: matrix must have n columns per row");
        for (int k = 0; k < n; ++k) m(i, k) = complex_from_json(row[k]);
    }
    return m;
}

}  // namespace

json element_to_json(const Element& x) {
    const AlgebraModel& m = x.model();
    json j;
    j["kind"] = m.is_torus() ? "torus" : "matrix";
    j["n"] = m.n;
    if (m.is_torus()) {
        j["blocks"] = nullptr;
        j["degree"] = m.degree;
        if (m.quad_nodes != 4 * m.degree + 1) j["quad_nodes"] = m.quad_nodes;
        json data = json::object();
        for (const auto& [k, c] : x.coeffs()) data[std::to_string(k)] = matrix_to_json(c);
        j["data"] = std::move(data);
    } else {
        j["blocks"] = m.blocks;
        j["degree"] = nullptr;
        j["data"] = matrix_to_json(x.matrix());
    }
    return j;
}

Element element_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const int n = j.at("n").get<int>();
    if (kind == "matrix") {
        std::vector<int> blocks;
        if (j.contains("blocks") && !j["blocks"].is_null())
            blocks = j["blocks"].get<std::vector<int>>();
        else
            blocks.assign(static_cast<std::size_t>(n), 1);
        const AlgebraModel m = AlgebraModel::matrix_block(blocks);
        if (m.n != n) throw std::invalid_argument("element JSON: blocks do not sum to n");
        return Element::from_matrix(m, matrix_from_json(j.at("data"), n));
    }
    if (kind != "torus") throw std::invalid_argument("element JSON: kind must be matrix|torus");
    const int degree = j.at("degree").get<int>();
    const int quad = j.contains("quad_nodes") && !j["quad_nodes"].is_null()
                         ? j["quad_nodes"].get<int>()
                         : 0;
    const AlgebraModel m = n == 1 ? AlgebraModel::torus_scalar(degree, quad)
                                  : AlgebraModel::torus_matrix(n, degree, quad);
    std::map<int, CMatrix> coeffs;
    for (const auto& [key, val] : j.at("data").items())
        coeffs[std::stoi(key)] = matrix_from_json(val, n);
    return Element::from_coeffs(m, std::move(coeffs));
}

json to_json(const FactorizationResult& r) {
    json j;
    j["unitary"] = element_to_json(r.unitary);
    j["analytic"] = element_to_json(r.analytic);
    if (r.analytic_inverse) j["analytic_inverse"] = element_to_json(*r.analytic_inverse);
    j["residuals"] = {{"reconstruction", r.residuals.reconstruction},
                      {"unitarity", r.residuals.unitarity},
                      {"membership", r.residuals.membership},
                      {"inverse_membership", r.residuals.inverse_membership}};
    return j;
}

json to_json(const OuterReport& r) {
    json j;
    j["left"] = r.left;
    j["right"] = r.right;
    j["bilateral"] = r.bilateral;
    j["det_h"] = r.det_h;
    j["det_phi_h"] = r.det_phi_h;
    j["det_criterion"] = r.det_criterion;
    j["rank_left"] = r.rank_left;
    j["rank_right"] = r.rank_right;
    j["rank_bilateral"] = r.rank_bilateral;
    j["rank_full"] = r.rank_full;
    j["rank_oracle_exact"] = r.rank_oracle_exact;
    if (!r.rank_oracle_exact) {
        j["dist_left"] = r.dist_left;
        j["dist_right"] = r.dist_right;
        j["dist_bilateral"] = r.dist_bilateral;
        j["note"] = r.note;
    }
    return j;
}

json to_json(const SzegoReport& r) {
    json j;
    j["det_w"] = r.det_w;
    j["inf_estimate"] = r.inf_estimate;
    if (r.oracle_value) j["oracle_value"] = *r.oracle_value;
    j["relative_gap"] = r.relative_gap;
    j["p"] = r.p;
    j["iterations"] = r.iterations;
    j["constraint_residual"] = r.constraint_residual;
    j["minimizer"] = element_to_json(r.minimizer);
    return j;
}

json to_json(const RieszResult& r) {
    json j;
    j["y"] = element_to_json(r.y);
    j["z"] = element_to_json(r.z);
    j["p"] = r.p;
    j["q"] = r.q;
    j["r"] = r.r;
    j["reconstruction"] = r.reconstruction;
    j["membership_y"] = r.membership_y;
    j["membership_z"] = r.membership_z;
    j["norm_x"] = r.norm_x;
    j["norm_y"] = r.norm_y;
    j["norm_z"] = r.norm_z;
    j["bound_slack"] = r.bound_slack;
    j["attained"] = r.attained;
    return j;
}

Element load_element(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j = json::parse(in);  // throws json::parse_error with byte location
    return element_from_json(j);
}

void save_element(const Element& x, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << element_to_json(x).dump(2) << "\n";
}

}  // namespace nchardy
