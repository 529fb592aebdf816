#pragma once

#include <string>
#include <vector>

#include "diracstab/continuation.hpp"
#include "diracstab/spectra.hpp"

namespace diracstab::io {

/// CSV column with a unit tag; headers render as "name [unit]".
struct CsvColumn {
  std::string name;
  std::string unit;
};

/// %.17g formatting: shortest representation that round-trips a double.
std::string format_double(double x);

std::string csv_string(const std::vector<CsvColumn>& columns,
                       const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& content);

/// FNV-1a over the byte string, rendered as 16 hex digits.
std::string hash_hex(const std::string& bytes);

/// Self-contained SVG 1.1 scatter of a spectrum in the complex plane with the
/// essential bands shaded along the imaginary axis and thresholds marked.
/// An empty spectrum yields an axes-only document.
std::string plot_spectrum(const spectra::SpectrumResult& spectrum);

/// Im lambda vs omega, one polyline per tracked branch.
std::string plot_branches(const std::vector<continuation::BranchTrace>& branches);

}  // namespace diracstab::io
