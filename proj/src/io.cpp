#include "diracstab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace diracstab::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_string(const std::vector<CsvColumn>& columns,
                       const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c].name + " [" + columns[c].unit + "]";
  }
  out += '\n';
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

std::string hash_hex(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0, kMargin = 50.0;

struct Frame {
  double xlo, xhi, ylo, yhi;
  double px(double x) const {
    return kMargin + (x - xlo) / (xhi - xlo) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - (y - ylo) / (yhi - ylo) * (kHeight - 2 * kMargin);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void svg_open(std::string& s) {
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) +
       "\" height=\"" + num(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void svg_axes(std::string& s, const Frame& f, const std::string& xlabel,
              const std::string& ylabel) {
  s += "<line x1=\"" + num(f.px(f.xlo)) + "\" y1=\"" + num(f.py(0.0)) + "\" x2=\"" +
       num(f.px(f.xhi)) + "\" y2=\"" + num(f.py(0.0)) + "\" stroke=\"#444\"/>\n";
  const double x0 = f.xlo <= 0.0 && f.xhi >= 0.0 ? 0.0 : f.xlo;
  s += "<line x1=\"" + num(f.px(x0)) + "\" y1=\"" + num(f.py(f.ylo)) + "\" x2=\"" +
       num(f.px(x0)) + "\" y2=\"" + num(f.py(f.yhi)) + "\" stroke=\"#444\"/>\n";
  s += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(f.py(0.0) - 6) +
       "\" font-size=\"12\" text-anchor=\"end\">" + xlabel + "</text>\n";
  s += "<text x=\"" + num(f.px(x0) + 8) + "\" y=\"" + num(kMargin - 8) +
       "\" font-size=\"12\">" + ylabel + "</text>\n";
}

}  // namespace

std::string plot_spectrum(const spectra::SpectrumResult& spectrum) {
  double xmax = 1.0, ymax = 1.0;
  for (const auto& l : spectrum.eigenvalues) {
    xmax = std::max(xmax, std::abs(l.real()) * 1.1);
    ymax = std::max(ymax, std::abs(l.imag()) * 1.1);
  }
  const auto& bands = spectrum.bands;
  if (bands.m > 0.0) ymax = std::max(ymax, 1.3 * bands.threshold);
  const Frame f{-xmax, xmax, -ymax, ymax};

  std::string s;
  svg_open(s);
  // essential bands: strips along the imaginary axis above/below the gap edge
  if (bands.m > 0.0 && bands.gap_edge < ymax) {
    const double half = 0.01 * (f.xhi - f.xlo);
    for (double sgn : {1.0, -1.0}) {
      const double yin = sgn * bands.gap_edge, yout = sgn * ymax;
      s += "<rect x=\"" + num(f.px(-half)) + "\" y=\"" + num(std::min(f.py(yin), f.py(yout))) +
           "\" width=\"" + num(f.px(half) - f.px(-half)) + "\" height=\"" +
           num(std::abs(f.py(yin) - f.py(yout))) + "\" fill=\"#9ecae1\" fill-opacity=\"0.6\"/>\n";
      // embedded threshold mark
      const double yt = sgn * bands.threshold;
      if (std::abs(yt) < ymax)
        s += "<line x1=\"" + num(f.px(0.0) - 8) + "\" y1=\"" + num(f.py(yt)) + "\" x2=\"" +
             num(f.px(0.0) + 8) + "\" y2=\"" + num(f.py(yt)) + "\" stroke=\"#08519c\" "
             "stroke-width=\"2\"/>\n";
    }
  }
  svg_axes(s, f, "Re &#955;", "Im &#955;");
  for (size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    const Complex l = spectrum.eigenvalues[i];
    const spectra::Label lab = i < spectrum.labels.size() ? spectrum.labels[i]
                                                          : spectra::Label::unclassified;
    std::string color = "#888888";  // delocalized / unclassified
    double r = 1.5;
    if (lab == spectra::Label::point) { color = "#d62728"; r = 3.0; }
    else if (lab == spectra::Label::embedded_candidate) { color = "#ff7f0e"; r = 3.0; }
    else if (lab == spectra::Label::threshold) { color = "#2ca02c"; r = 2.0; }
    s += "<circle cx=\"" + num(f.px(l.real())) + "\" cy=\"" + num(f.py(l.imag())) +
         "\" r=\"" + num(r) + "\" fill=\"" + color + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string plot_branches(const std::vector<continuation::BranchTrace>& branches) {
  double xlo = 1e300, xhi = -1e300, ymax = 1.0;
  for (const auto& br : branches)
    for (size_t i = 0; i < br.omegas.size(); ++i) {
      xlo = std::min(xlo, br.omegas[i]);
      xhi = std::max(xhi, br.omegas[i]);
      ymax = std::max(ymax, std::abs(br.lambdas[i].imag()) * 1.1);
    }
  if (xlo > xhi) { xlo = 0.0; xhi = 1.0; }
  if (xhi - xlo < 1e-12) { xlo -= 0.5; xhi += 0.5; }
  const Frame f{xlo, xhi, -ymax, ymax};

  static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::string s;
  svg_open(s);
  svg_axes(s, f, "&#969;", "Im &#955;");
  int idx = 0;
  for (const auto& br : branches) {
    const char* color = palette[idx++ % 8];
    std::string pts;
    for (size_t i = 0; i < br.omegas.size(); ++i)
      pts += num(f.px(br.omegas[i])) + "," + num(f.py(br.lambdas[i].imag())) + " ";
    s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"1.5\"/>\n";
    for (size_t i = 0; i < br.omegas.size(); ++i)
      s += "<circle cx=\"" + num(f.px(br.omegas[i])) + "\" cy=\"" +
           num(f.py(br.lambdas[i].imag())) + "\" r=\"2.50\" fill=\"" + color + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace diracstab::io
