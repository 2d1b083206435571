#pragma once

#include <string>

#include "adae/pencil.hpp"

namespace adae {

/// Pencil JSON: {"rows","cols","E_re","E_im","A_re","A_im"} with flat row-major arrays.
std::string pencil_to_json(const CMatrix& E, const CMatrix& A);
std::string pencil_to_json(const MatrixPencil& p);
void pencil_from_json(const std::string& text, CMatrix& E, CMatrix& A);
MatrixPencil read_pencil(const std::string& text, TolerancePolicy pol = {});

std::string read_text_file(const std::string& path);
/// Writes through a temporary file in the target directory followed by a rename.
void write_text_file_atomic(const std::string& path, const std::string& content);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace adae
