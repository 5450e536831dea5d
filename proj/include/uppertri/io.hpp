#pragma once

#include <string>

#include "json.hpp"

#include "uppertri/core.hpp"
#include "uppertri/infop.hpp"
#include "uppertri/toeplitz.hpp"

namespace uppertri::io {

using nlohmann::json;

/// Serializes with every float written as %.17g, so parsing the text back
/// reproduces each double bit for bit. Non-finite floats become the strings
/// "inf", "-inf", "nan". indent < 0 gives compact output.
std::string dump(const json& j, int indent = -1);

/// {"rows":r,"cols":c,"data":[[re,im],...]} row-major.
json matrix_to_json(const DenseMatrix& m);
DenseMatrix matrix_from_json(const json& j);

/// {"d":d,"c":c,"columns":[{"K":[...],"entries":[{"I":[...],"block":[[[re,im],...],...]}]}]}
/// with only I <= K (graded-lex) stored; the mirror is implied.
json operator_to_json(const BlockOperator& op);
BlockOperator operator_from_json(const json& j);

/// {"coeffs":[{"k":int,"re":x,"im":y},...]} for k >= 0.
json symbol_to_json(const Symbol& s);
Symbol symbol_from_json(const json& j);

json index_to_json(const MultiIndex& idx);
MultiIndex index_from_json(const json& j);
json complex_to_json(Complex z);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);
json read_json_file(const std::string& path);

}  // namespace uppertri::io
