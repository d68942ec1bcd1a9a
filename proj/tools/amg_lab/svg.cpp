#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "amg/error.hpp"

namespace amg::lab {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double width = 640, height = 400;
  double left = 60, right = 20, top = 40, bottom = 50;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

void open_svg(std::ostringstream& os, const Frame& f, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width) << "\" height=\"" << num(f.height)
     << "\" viewBox=\"0 0 " << num(f.width) << ' ' << num(f.height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(f.width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, double xlo, double xhi, double ylo, double yhi) {
  const double x0 = f.left, y0 = f.top + f.plot_h();
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0 + f.plot_w()) << "\" y2=\""
     << num(y0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(f.top) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y0)
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double u = i / 4.0;
    const double x = x0 + u * f.plot_w();
    const double y = y0 - u * f.plot_h();
    os << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">"
       << num(xlo + u * (xhi - xlo)) << "</text>\n";
    os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
       << num(ylo + u * (yhi - ylo)) << "</text>\n";
  }
}

void legend(std::ostringstream& os, const Frame& f, const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = f.top + 8 + 16.0 * static_cast<double>(i);
    const double x = f.left + f.plot_w() - 150;
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"10\" height=\"10\" fill=\""
       << kPalette[i % 8] << "\"/>\n";
    os << "<text x=\"" << num(x + 14) << "\" y=\"" << num(y) << "\">" << escape(labels[i]) << "</text>\n";
  }
}

}  // namespace

std::string histogram_svg(const std::string& title, const std::vector<HistogramSeries>& series) {
  if (series.empty()) throw DomainError("histogram_svg: no series");
  const auto& edges = series.front().histogram.edges;
  for (const auto& s : series) {
    if (s.histogram.edges != edges) throw DomainError("histogram_svg: series must share bin edges");
  }
  std::size_t peak = 1;
  for (const auto& s : series) peak = std::max(peak, *std::max_element(s.histogram.counts.begin(), s.histogram.counts.end()));
  const Frame f;
  const double xlo = edges.front(), xhi = edges.back();
  const double span = xhi > xlo ? xhi - xlo : 1.0;
  auto px = [&](double v) { return f.left + (v - xlo) / span * f.plot_w(); };
  auto py = [&](double c) { return f.top + f.plot_h() - c / static_cast<double>(peak) * f.plot_h(); };

  std::ostringstream os;
  open_svg(os, f, title);
  axes(os, f, xlo, xlo + span, 0.0, static_cast<double>(peak));
  std::vector<std::string> labels;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& h = series[si].histogram;
    const char* color = kPalette[si % 8];
    labels.push_back(series[si].label + " (mean " + num(h.mean) + ")");
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      if (h.counts[b] == 0) continue;
      const double x = px(h.edges[b]);
      const double w = std::max(px(h.edges[b + 1]) - x, 1.0);
      const double y = py(static_cast<double>(h.counts[b]));
      os << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\""
         << num(f.top + f.plot_h() - y) << "\" fill=\"" << color << "\" fill-opacity=\"0.45\"/>\n";
    }
    const double mx = px(h.mean);
    os << "<line x1=\"" << num(mx) << "\" y1=\"" << num(f.top) << "\" x2=\"" << num(mx) << "\" y2=\""
       << num(f.top + f.plot_h()) << "\" stroke=\"" << color << "\" stroke-dasharray=\"5,3\" stroke-width=\"2\"/>\n";
  }
  legend(os, f, labels);
  os << "</svg>\n";
  return os.str();
}

std::string heatmap_svg(const std::string& title, const SelfSimMatrix& m) {
  const auto rows = m.values.rows(), cols = m.values.cols();
  Frame f;
  f.width = 480;
  f.height = 480;
  const double cw = f.plot_w() / static_cast<double>(cols);
  const double ch = f.plot_h() / static_cast<double>(rows);
  std::ostringstream os;
  open_svg(os, f, title + " (diagonality " + num(m.diagonality) + ")");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = std::clamp(0.5 * (m.values.at(r, c) + 1.0), 0.0, 1.0);
      const int g = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      char fill[16];
      std::snprintf(fill, sizeof fill, "#%02x%02x%02x", g, g, g);
      os << "<rect x=\"" << num(f.left + cw * static_cast<double>(c)) << "\" y=\""
         << num(f.top + ch * static_cast<double>(r)) << "\" width=\"" << num(cw) << "\" height=\"" << num(ch)
         << "\" fill=\"" << fill << "\"/>\n";
    }
    os << "<rect x=\"" << num(f.left + cw * static_cast<double>(m.argmax[r])) << "\" y=\""
       << num(f.top + ch * static_cast<double>(r)) << "\" width=\"" << num(cw) << "\" height=\"" << num(ch)
       << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  }
  os << "<text x=\"" << num(f.left + f.plot_w() / 2) << "\" y=\"" << num(f.height - 14)
     << "\" text-anchor=\"middle\">generated window</text>\n";
  os << "<text x=\"16\" y=\"" << num(f.top + f.plot_h() / 2) << "\" transform=\"rotate(-90 16 "
     << num(f.top + f.plot_h() / 2) << ")\" text-anchor=\"middle\">reference window</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string scatter_svg(const std::string& title, const std::vector<ScatterGroup>& groups) {
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  bool first = true;
  for (const auto& g : groups) {
    if (g.x.size() != g.y.size()) throw DomainError("scatter_svg: ragged group");
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      if (first) {
        xlo = xhi = g.x[i];
        ylo = yhi = g.y[i];
        first = false;
      }
      xlo = std::min(xlo, g.x[i]);
      xhi = std::max(xhi, g.x[i]);
      ylo = std::min(ylo, g.y[i]);
      yhi = std::max(yhi, g.y[i]);
    }
  }
  if (first) throw DomainError("scatter_svg: no points");
  if (xhi == xlo) xhi = xlo + 1.0;
  if (yhi == ylo) yhi = ylo + 1.0;
  const Frame f;
  auto px = [&](double v) { return f.left + (v - xlo) / (xhi - xlo) * f.plot_w(); };
  auto py = [&](double v) { return f.top + f.plot_h() - (v - ylo) / (yhi - ylo) * f.plot_h(); };
  std::ostringstream os;
  open_svg(os, f, title);
  axes(os, f, xlo, xhi, ylo, yhi);
  std::vector<std::string> labels;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    labels.push_back(groups[gi].label);
    for (std::size_t i = 0; i < groups[gi].x.size(); ++i) {
      os << "<circle cx=\"" << num(px(groups[gi].x[i])) << "\" cy=\"" << num(py(groups[gi].y[i]))
         << "\" r=\"3.5\" fill=\"" << kPalette[gi % 8] << "\" fill-opacity=\"0.7\"/>\n";
    }
  }
  legend(os, f, labels);
  os << "</svg>\n";
  return os.str();
}

}  // namespace amg::lab
