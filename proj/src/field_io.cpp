#include "relwave/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "relwave/errors.hpp"

namespace relwave {

namespace {

const char* kAxisNames[] = {"x", "y", "z"};

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw DomainError("field csv line " + std::to_string(line) + ": '" + s + "' is not a finite number");
  }
  return v;
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * scale; }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_field_csv(const ComplexField<double>& field) {
  const auto& g = field.grid();
  const bool spectral = field.representation() == Representation::spectral;
  std::string out;
  for (int a = 0; a < g.dim(); ++a) {
    if (spectral) out += 'k';
    out += kAxisNames[a];
    out += ',';
  }
  out += "re,im\n";
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const auto coord = spectral ? g.wavenumber(i) : g.position(i);
    for (int a = 0; a < g.dim(); ++a) {
      out += format_double(coord[a]);
      out += ',';
    }
    out += format_double(field[i].real());
    out += ',';
    out += format_double(field[i].imag());
    out += '\n';
  }
  return out;
}

ComplexField<double> parse_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("field csv: empty input");
  const auto header = split_commas(line);
  const int dim = static_cast<int>(header.size()) - 2;
  if (dim < 1 || dim > 3 || header[header.size() - 2] != "re" || header.back() != "im") {
    throw DomainError("field csv line 1: header must be x[,y[,z]],re,im or kx[,ky[,kz]],re,im");
  }
  const bool spectral = header[0] == "kx";
  for (int a = 0; a < dim; ++a) {
    const std::string expected = std::string(spectral ? "k" : "") + kAxisNames[a];
    if (header[static_cast<std::size_t>(a)] != expected) {
      throw DomainError("field csv line 1: expected column '" + expected + "', got '" + header[a] + "'");
    }
  }

  std::vector<std::array<double, 3>> coords;
  std::vector<std::complex<double>> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw DomainError("field csv line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                        " columns");
    }
    std::array<double, 3> c{0, 0, 0};
    for (int a = 0; a < dim; ++a) c[a] = parse_number(cells[static_cast<std::size_t>(a)], lineno);
    coords.push_back(c);
    values.emplace_back(parse_number(cells[dim], lineno), parse_number(cells[dim + 1], lineno));
  }

  const auto count = static_cast<Eigen::Index>(values.size());
  const auto n = static_cast<Eigen::Index>(std::llround(std::pow(static_cast<double>(count), 1.0 / dim)));
  Eigen::Index expected_count = 1;
  for (int a = 0; a < dim; ++a) expected_count *= n;
  if (count == 0 || expected_count != count || n < 2 || n % 2 != 0) {
    throw DomainError("field csv: " + std::to_string(count) + " rows do not form an even n^" + std::to_string(dim) +
                      " grid");
  }

  // Axis 0 is the slowest index, so rows 0 and stride hold consecutive axis-0 samples.
  const Eigen::Index stride = count / n;
  double box = 0;
  if (spectral) {
    const double dk = coords[static_cast<std::size_t>(stride)][0] - coords[0][0];
    if (!(dk > 0)) throw DomainError("field csv: spectral rows are not in FFT order");
    box = 2 * std::numbers::pi / dk;
  } else {
    const double dx = coords[static_cast<std::size_t>(stride)][0] - coords[0][0];
    if (!(dx > 0)) throw DomainError("field csv: physical rows are not in grid order");
    box = dx * static_cast<double>(n);
  }
  const SpectralGrid<double> grid(dim, n, box);

  const double scale = spectral ? grid.wavenumber_spacing() * static_cast<double>(n) : box;
  ComplexVector<double> v(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto expected = spectral ? grid.wavenumber(i) : grid.position(i);
    for (int a = 0; a < dim; ++a) {
      if (!close(coords[static_cast<std::size_t>(i)][a], expected[a], scale)) {
        throw DomainError("field csv line " + std::to_string(i + 2) + ": coordinate does not match the inferred grid");
      }
    }
    v[i] = values[static_cast<std::size_t>(i)];
  }
  return ComplexField<double>(grid, std::move(v), spectral ? Representation::spectral : Representation::physical);
}

ComplexField<double> read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open field file '" + path.string() + "'");
  return parse_field_csv(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace relwave
