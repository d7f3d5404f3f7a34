#pragma once

#include "singdet/common.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace singdet {

struct CsvTable {
  std::vector<std::string> header;  ///< empty when the file had none
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  ///< 1-based source line per row
};

/// Comma-separated cells, blank lines skipped. A first row with any
/// non-empty, non-numeric cell is taken as a header.
CsvTable read_csv(const std::filesystem::path& path);

/// Numeric matrix from a CSV; ragged or non-numeric rows raise InputError
/// naming the line.
Points read_points(const std::filesystem::path& path);

bool parse_double(const std::string& cell, double& out);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Orthonormal 2-D DCT-II of a row-major side x side image.
std::vector<double> dct2(const std::vector<double>& image, int side);
std::vector<double> idct2(const std::vector<double>& coeffs, int side);

/// Per row: reshape to a square image, transform and keep the top-left
/// keep x keep block row-major.
Points ingest_dct(const Points& images, int keep);

}  // namespace singdet
