#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lowform/approx.hpp"
#include "lowform/detection.hpp"
#include "lowform/polytope_reduction.hpp"
#include "lowform/solvers.hpp"
#include "lowform/sphere_reduction.hpp"

namespace lowform::io {

using nlohmann::json;

// Reading throws ParseError with a message naming the offending field.
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j);

json to_json(const Matrix& a);
Matrix matrix_from_json(const json& j);
Vector vector_from_json(const json& j);

json to_json(const SparseForm& sf);
SparseForm sparse_form_from_json(const json& j);

/// {"G": rows, "c": rhs}
json to_json(const Polyhedron& region);
Polyhedron polyhedron_from_json(const json& j);

json to_json(const DetectionReport& r);
json to_json(const SolveResult& r);
json to_json(const CutSet& cuts, const Vector& b);
json to_json(const SpectrumSplit& s);
json to_json(const LiftedPolynomial& f);

/// 64-bit FNV-1a of the file bytes, as 16 hex digits.
std::string content_hash(const std::filesystem::path& path);

}  // namespace lowform::io
