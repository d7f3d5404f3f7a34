#include "singdet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace singdet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// 1-D orthonormal DCT-II (inverse when `inverse`) along a strided line.
void dct_line(const double* in, double* out, int n, std::size_t stride, bool inverse) {
  const double s0 = std::sqrt(1.0 / n), s = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!inverse) {
        acc += in[j * stride] * std::cos(M_PI * (j + 0.5) * k / n);
      } else {
        acc += (j == 0 ? s0 : s) * in[j * stride] * std::cos(M_PI * (k + 0.5) * j / n);
      }
    }
    out[k * stride] = inverse ? acc : (k == 0 ? s0 : s) * acc;
  }
}

std::vector<double> transform2(const std::vector<double>& src, int side, bool inverse) {
  if (side <= 0 || src.size() != static_cast<std::size_t>(side) * side)
    throw InputError("dct: image is not side x side");
  std::vector<double> tmp(src.size()), out(src.size());
  for (int r = 0; r < side; ++r) dct_line(&src[r * side], &tmp[r * side], side, 1, inverse);
  for (int c = 0; c < side; ++c) dct_line(&tmp[c], &out[c], side, side, inverse);
  return out;
}

}  // namespace

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* b = cell.data();
  const char* e = b + cell.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (first) {
      first = false;
      double v;
      for (const auto& c : cells) {
        if (!c.empty() && !parse_double(c, v)) {
          table.header = std::move(cells);
          break;
        }
      }
      if (!table.header.empty()) continue;
    }
    table.rows.push_back(std::move(cells));
    table.line_numbers.push_back(lineno);
  }
  return table;
}

Points read_points(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.rows.empty()) throw InputError(path.string() + ": no data rows");
  const std::size_t cols = t.rows.front().size();
  Points pts(static_cast<Index>(t.rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = path.string() + ":" + std::to_string(t.line_numbers[i]);
    if (row.size() != cols)
      throw InputError(where + ": expected " + std::to_string(cols) + " columns, got " +
                       std::to_string(row.size()));
    for (std::size_t j = 0; j < cols; ++j) {
      double v;
      if (!parse_double(row[j], v) || !std::isfinite(v))
        throw InputError(where + ": bad number '" + row[j] + "' in column " + std::to_string(j + 1));
      pts(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  }
  return pts;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << contents;
    if (!out.flush()) throw InputError("write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<double> dct2(const std::vector<double>& image, int side) { return transform2(image, side, false); }
std::vector<double> idct2(const std::vector<double>& coeffs, int side) { return transform2(coeffs, side, true); }

Points ingest_dct(const Points& images, int keep) {
  const auto pixels = images.cols();
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(pixels))));
  if (static_cast<Index>(side) * side != pixels)
    throw InputError("ingest-dct: " + std::to_string(pixels) + " pixels is not a square image");
  if (keep < 1 || keep > side) throw InputError("ingest-dct: keep must lie in [1, " + std::to_string(side) + "]");
  Points out(images.rows(), static_cast<Index>(keep) * keep);
  std::vector<double> img(static_cast<std::size_t>(pixels));
  for (Index i = 0; i < images.rows(); ++i) {
    for (Index j = 0; j < pixels; ++j) img[j] = images(i, j);
    const auto c = dct2(img, side);
    for (int a = 0; a < keep; ++a)
      for (int b = 0; b < keep; ++b) out(i, a * keep + b) = c[a * side + b];
  }
  return out;
}

}  // namespace singdet
