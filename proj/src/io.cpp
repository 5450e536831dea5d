#include "uppertri/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace uppertri::io {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep floats recognizable as floats when read back.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void dump_into(std::string& out, const json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays ([re, im], multi-indices) stay on one line.
      const bool flat = j.size() <= 8 && std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) {
          out += ',';
          if (flat && indent >= 0) out += ' ';
        }
        first = false;
        if (!flat) newline(depth + 1);
        dump_into(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

DenseMatrix block_from_json(const json& j, int c) {
  if (!j.is_array() || static_cast<int>(j.size()) != c) throw InputError("operator file: block must have c rows");
  DenseMatrix b(c, c);
  for (int r = 0; r < c; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != c) throw InputError("operator file: block row must have c entries");
    for (int k = 0; k < c; ++k) {
      const json& z = row[static_cast<std::size_t>(k)];
      if (!z.is_array() || z.size() != 2) throw InputError("operator file: entries are [re, im] pairs");
      b(r, k) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return b;
}

}  // namespace

std::string dump(const json& j, int indent) {
  std::string out;
  dump_into(out, j, indent, 0);
  return out;
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json index_to_json(const MultiIndex& idx) { return json(idx.coords()); }

MultiIndex index_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("multi-index must be a nonempty integer array");
  std::vector<int> coords;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw InputError("multi-index coordinates must be integers");
    coords.push_back(e.get<int>());
  }
  return MultiIndex(std::move(coords));
}

json matrix_to_json(const DenseMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

DenseMatrix matrix_from_json(const json& j) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw InputError("matrix file: data length does not match rows * cols");
    DenseMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index k = 0; k < cols; ++k) {
        const json& z = data[static_cast<std::size_t>(i * cols + k)];
        if (!z.is_array() || z.size() != 2) throw InputError("matrix file: entries are [re, im] pairs");
        m(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("matrix file: ") + e.what());
  }
}

json operator_to_json(const BlockOperator& op) {
  json columns = json::array();
  for (const auto& [k, column] : op.columns()) {
    json entries = json::array();
    for (const auto& [i, blk] : column) {
      if (k < i) continue;
      json rows = json::array();
      for (Eigen::Index r = 0; r < blk.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index s = 0; s < blk.cols(); ++s) row.push_back(complex_to_json(blk(r, s)));
        rows.push_back(std::move(row));
      }
      entries.push_back(json{{"I", index_to_json(i)}, {"block", std::move(rows)}});
    }
    if (!entries.empty()) columns.push_back(json{{"K", index_to_json(k)}, {"entries", std::move(entries)}});
  }
  return json{{"d", op.dim()}, {"c", op.block_size()}, {"columns", std::move(columns)}};
}

BlockOperator operator_from_json(const json& j) {
  try {
    BlockOperator op(j.at("d").get<int>(), j.at("c").get<int>());
    for (const auto& column : j.at("columns")) {
      const MultiIndex k = index_from_json(column.at("K"));
      for (const auto& entry : column.at("entries"))
        op.set_block(index_from_json(entry.at("I")), k, block_from_json(entry.at("block"), op.block_size()));
    }
    return op;
  } catch (const json::exception& e) {
    throw InputError(std::string("operator file: ") + e.what());
  }
}

json symbol_to_json(const Symbol& s) {
  json coeffs = json::array();
  for (std::size_t k = 0; k < s.nonneg().size(); ++k)
    coeffs.push_back(json{{"k", k}, {"re", s.nonneg()[k].real()}, {"im", s.nonneg()[k].imag()}});
  return json{{"coeffs", std::move(coeffs)}};
}

Symbol symbol_from_json(const json& j) {
  try {
    std::map<int, Complex> coeffs;
    for (const auto& e : j.at("coeffs"))
      coeffs[e.at("k").get<int>()] = Complex(e.at("re").get<double>(), e.value("im", 0.0));
    return Symbol(std::move(coeffs));
  } catch (const json::exception& e) {
    throw InputError(std::string("symbol file: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace uppertri::io
