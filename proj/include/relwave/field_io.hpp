#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "relwave/spectral_grid.hpp"

namespace relwave {

/// Round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Field snapshot as CSV. The header names the representation: coordinate
/// columns x[,y[,z]] for physical samples or kx[,ky[,kz]] for spectral
/// coefficients, followed by re,im. Rows follow the grid's flat index (FFT
/// order for spectral data).
std::string format_field_csv(const ComplexField<double>& field);

/// Parses a snapshot written by format_field_csv, inferring the grid from the
/// coordinates. Malformed input is a DomainError naming the offending line.
ComplexField<double> parse_field_csv(std::istream& in);
ComplexField<double> read_field_csv(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace relwave
