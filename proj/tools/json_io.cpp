#include "json_io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "lowform/error.hpp"

namespace lowform::io {

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

namespace {

double as_number(const json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
    return j.get<double>();
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

}  // namespace

json to_json(const Polynomial& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"exp", e}, {"coef", c}});
    return {{"num_vars", p.num_vars()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const json& j) {
    const json& nv = field(j, "num_vars");
    if (!nv.is_number_integer() || nv.get<long long>() < 0) throw ParseError("num_vars must be a non-negative integer");
    const std::size_t n = nv.get<std::size_t>();
    const json& terms = field(j, "terms");
    if (!terms.is_array()) throw ParseError("terms must be an array");
    Polynomial p(n);
    for (const json& t : terms) {
        const json& e = field(t, "exp");
        if (!e.is_array() || e.size() != n) throw ParseError("every exponent must have num_vars entries");
        Exponent exp;
        for (const json& a : e) {
            if (!a.is_number_integer() || a.get<long long>() < 0)
                throw ParseError("exponents must be non-negative integers");
            exp.push_back(a.get<int>());
        }
        p.add_term(exp, as_number(field(t, "coef"), "coef"));
    }
    return p;
}

json to_json(const Matrix& a) {
    json rows = json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) rows.push_back(Vector(a.row(i).begin(), a.row(i).end()));
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("matrix must be an array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    if (rows > 0) {
        if (!j[0].is_array()) throw ParseError("matrix rows must be arrays");
        cols = j[0].size();
    }
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw ParseError("matrix rows must have equal length");
        for (std::size_t k = 0; k < cols; ++k) a(i, k) = as_number(j[i][k], "matrix entry");
    }
    return a;
}

Vector vector_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("vector must be an array");
    Vector v;
    for (const json& x : j) v.push_back(as_number(x, "vector entry"));
    return v;
}

json to_json(const SparseForm& sf) { return {{"f", to_json(sf.f)}, {"ell", to_json(sf.ell)}}; }

SparseForm sparse_form_from_json(const json& j) {
    SparseForm sf{polynomial_from_json(field(j, "f")), matrix_from_json(field(j, "ell"))};
    // An n×0 basis serializes as n empty rows; a 0-row array loses n, which only a constant f tolerates.
    if (sf.ell.cols() != sf.f.num_vars() && !(sf.ell.rows() == 0 && sf.f.num_vars() == 0))
        throw ParseError("f and ell disagree on the number of forms");
    return sf;
}

json to_json(const Polyhedron& region) { return {{"G", to_json(region.rows)}, {"c", region.rhs}}; }

Polyhedron polyhedron_from_json(const json& j) {
    Polyhedron region{matrix_from_json(field(j, "G")), vector_from_json(field(j, "c"))};
    if (region.rows.rows() != region.rhs.size()) throw ParseError("G and c disagree on the number of rows");
    return region;
}

json to_json(const DetectionReport& r) {
    return {{"m", r.m},
            {"basis", to_json(r.basis)},
            {"spectrum", r.spectrum},
            {"method", std::string(to_string(r.method))},
            {"samples_used", r.samples_used},
            {"rank_tol", r.rank_tol}};
}

json to_json(const SolveResult& r) {
    return {{"value", r.value},
            {"point", r.point},
            {"status", std::string(to_string(r.status))},
            {"iterations", r.iterations},
            {"starts_used", r.starts_used}};
}

json to_json(const CutSet& cuts, const Vector& b) {
    json list = json::array();
    for (const Cut& c : cuts.cuts) list.push_back({{"lambda", c.lambda}, {"u", c.u}, {"rhs", dot(c.lambda, b)}});
    return list;
}

json to_json(const SpectrumSplit& s) {
    return {{"ell", to_json(s.ell)},
            {"s", to_json(s.s)},
            {"lambda_head", s.lambda_head},
            {"lambda_tail", s.lambda_tail}};
}

json to_json(const LiftedPolynomial& f) { return {{"m", f.m}, {"poly", to_json(f.poly)}}; }

std::string content_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
        h ^= static_cast<unsigned char>(*it);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace lowform::io
