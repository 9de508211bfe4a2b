#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "origami/error.hpp"
#include "origami/hitting.hpp"

namespace origami {

ExponentFit exponent_estimate(const std::vector<ExponentPoint>& points) {
  if (points.size() < 5) throw Error(ErrorKind::InsufficientSpan, "need at least 5 records");
  for (const auto& p : points)
    if (!(p.r > 0) || !(p.T > 0)) throw Error(ErrorKind::OutOfRange, "records need r > 0 and T > 0");
  auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                      [](const ExponentPoint& a, const ExponentPoint& b) { return a.r < b.r; });
  ExponentFit fit;
  fit.span_decades = std::log10(hi->r / lo->r);
  if (fit.span_decades < 1.5) throw Error(ErrorKind::InsufficientSpan, "records span under 1.5 decades of r");

  std::vector<double> x(points.size()), y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    x[i] = -std::log(points[i].r);
    y[i] = std::log(points[i].T);
    fit.per_point.push_back(x[i] > 0 ? y[i] / x[i] : NAN);
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] > y[b];
  });
  // upper hull, left to right
  std::vector<std::size_t> hull;
  for (std::size_t i : order) {
    if (!hull.empty() && x[hull.back()] == x[i]) continue;
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull.back();
      double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross >= 0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  fit.envelope = hull;
  fit.used = hull.size();
  double mx = 0, my = 0;
  for (auto i : hull) {
    mx += x[i];
    my += y[i];
  }
  mx /= hull.size();
  my /= hull.size();
  double sxx = 0, sxy = 0;
  for (auto i : hull) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.H = sxx > 0 ? sxy / sxx : NAN;
  fit.intercept = my - fit.H * mx;
  return fit;
}

std::string exponent_svg(const std::vector<ExponentPoint>& points, const ExponentFit& fit, const std::string& title) {
  const double W = 640, H = 480, pad = 60;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    xs.push_back(-std::log10(p.r));
    ys.push_back(std::log10(p.T));
    x0 = std::min(x0, xs.back());
    x1 = std::max(x1, xs.back());
    y0 = std::min(y0, ys.back());
    y1 = std::max(y1, ys.back());
  }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  auto px = [&](double v) { return pad + (v - x0) / (x1 - x0) * (W - 2 * pad); };
  auto py = [&](double v) { return H - pad - (v - y0) / (y1 - y0) * (H - 2 * pad); };

  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">-log10 r</text>\n";
  s << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2
    << ")\" text-anchor=\"middle\">log10 T</text>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"30\" text-anchor=\"middle\">" << title << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    double vx = x0 + (x1 - x0) * k / 4, vy = y0 + (y1 - y0) * k / 4;
    s << "<text x=\"" << px(vx) << "\" y=\"" << H - pad + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << vx
      << "</text>\n";
    s << "<text x=\"" << pad - 6 << "\" y=\"" << py(vy) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << vy
      << "</text>\n";
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    s << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i]) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"orange\" stroke-width=\"1.5\" points=\"";
  for (auto i : fit.envelope) s << px(xs[i]) << "," << py(ys[i]) << " ";
  s << "\"/>\n";
  // fitted line in natural logs maps to the same slope in log10
  double b10 = fit.intercept / std::log(10.0);
  s << "<line x1=\"" << px(x0) << "\" y1=\"" << py(fit.H * x0 + b10) << "\" x2=\"" << px(x1) << "\" y2=\""
    << py(fit.H * x1 + b10) << "\" stroke=\"crimson\" stroke-dasharray=\"6,4\"/>\n";
  s.precision(4);
  s << "<text x=\"" << W - pad << "\" y=\"" << pad << "\" text-anchor=\"end\">H = " << fit.H << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace origami
