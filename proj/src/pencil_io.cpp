#include "adae/pencil_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace adae {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json flat(const CMatrix& m, bool imag) {
  ordered_json arr = ordered_json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) arr.push_back(imag ? m(i, j).imag() : m(i, j).real());
  return arr;
}

std::vector<double> read_numbers(const ordered_json& node, Index rows, Index cols, const char* key) {
  std::vector<double> out;
  if (node.is_null()) return std::vector<double>(static_cast<size_t>(rows * cols), 0.0);
  if (!node.is_array()) throw InvalidInput(std::string(key) + " must be an array");
  for (const auto& v : node) {
    if (v.is_array()) {
      for (const auto& w : v) {
        if (!w.is_number()) throw InvalidInput(std::string(key) + " holds a non-number");
        out.push_back(w.get<double>());
      }
    } else {
      if (!v.is_number()) throw InvalidInput(std::string(key) + " holds a non-number");
      out.push_back(v.get<double>());
    }
  }
  if (static_cast<Index>(out.size()) != rows * cols)
    throw InvalidInput(std::string(key) + " has the wrong number of entries");
  return out;
}

CMatrix assemble(const ordered_json& doc, const char* re_key, const char* im_key, Index rows,
                 Index cols) {
  if (!doc.contains(re_key)) throw InvalidInput(std::string("missing ") + re_key);
  std::vector<double> re = read_numbers(doc.at(re_key), rows, cols, re_key);
  std::vector<double> im =
      read_numbers(doc.contains(im_key) ? doc.at(im_key) : ordered_json(), rows, cols, im_key);
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      const size_t k = static_cast<size_t>(i * cols + j);
      m(i, j) = Complex(re[k], im[k]);
    }
  return m;
}

}  // namespace

std::string pencil_to_json(const CMatrix& E, const CMatrix& A) {
  ordered_json doc;
  doc["rows"] = E.rows();
  doc["cols"] = E.cols();
  doc["E_re"] = flat(E, false);
  doc["E_im"] = flat(E, true);
  doc["A_re"] = flat(A, false);
  doc["A_im"] = flat(A, true);
  return doc.dump() + "\n";
}

std::string pencil_to_json(const MatrixPencil& p) { return pencil_to_json(p.E(), p.A()); }

void pencil_from_json(const std::string& text, CMatrix& E, CMatrix& A) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw InvalidInput(std::string("malformed pencil JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rows") || !doc.contains("cols") ||
      !doc["rows"].is_number_integer() || !doc["cols"].is_number_integer())
    throw InvalidInput("pencil JSON needs integer rows and cols");
  const Index rows = doc["rows"].get<Index>(), cols = doc["cols"].get<Index>();
  if (rows < 0 || cols < 0) throw InvalidInput("negative pencil dimensions");
  E = assemble(doc, "E_re", "E_im", rows, cols);
  A = assemble(doc, "A_re", "A_im", rows, cols);
}

MatrixPencil read_pencil(const std::string& text, TolerancePolicy pol) {
  CMatrix E, A;
  pencil_from_json(text, E, A);
  return MatrixPencil(std::move(E), std::move(A), pol);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidInput("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InvalidInput("cannot move output into place: " + path);
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace adae
