#include "mlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mlab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void emit_plot(const std::vector<std::pair<double, double>>& series, const std::string& path,
               const std::string& title) {
  if (series.empty()) throw std::invalid_argument("emit_plot: empty series");
  const double W = 640, H = 400, ml = 60, mr = 20, mt = 30, mb = 40;
  double xlo = series[0].first, xhi = xlo, ylo = series[0].second, yhi = ylo;
  for (const auto& [x, y] : series) {
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  }
  if (xhi == xlo) xhi = xlo + 1.0;
  if (yhi == ylo) yhi = ylo + 1.0;
  auto sx = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
  auto sy = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };

  std::string body;
  body += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" +
          fmt(H) + "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
  body += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    body += "<text x=\"" + fmt(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
            "font-family=\"sans-serif\">" + title + "</text>\n";
  body += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(H - mb) + "\" x2=\"" + fmt(W - mr) +
          "\" y2=\"" + fmt(H - mb) + "\" stroke=\"black\"/>\n";
  body += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(ml) + "\" y2=\"" +
          fmt(H - mb) + "\" stroke=\"black\"/>\n";
  for (const auto& [pos, val] : {std::pair{ml, xlo}, std::pair{W - mr, xhi}})
    body += "<text x=\"" + fmt(pos) + "\" y=\"" + fmt(H - mb + 16) +
            "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" + fmt(val) +
            "</text>\n";
  for (const auto& [pos, val] : {std::pair{H - mb, ylo}, std::pair{mt, yhi}})
    body += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(pos + 4) +
            "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + fmt(val) +
            "</text>\n";
  std::string pts;
  for (const auto& [x, y] : series) {
    if (!pts.empty()) pts += " ";
    pts += fmt(sx(x)) + "," + fmt(sy(y));
  }
  body += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#0b61a4\" stroke-width=\"1.5\"/>\n";
  for (const auto& [x, y] : series)
    body += "<circle cx=\"" + fmt(sx(x)) + "\" cy=\"" + fmt(sy(y)) +
            "\" r=\"2\" fill=\"#0b61a4\"/>\n";
  body += "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
  out << body;
  if (!out) throw std::runtime_error("emit_plot: write failed for " + path);
}

}  // namespace mlab
