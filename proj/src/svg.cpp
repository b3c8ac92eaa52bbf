#include "bcpg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace bcpg::svg {

namespace {

constexpr double kPanelWidth = 720;
constexpr double kPanelHeight = 260;
constexpr double kMarginLeft = 60;
constexpr double kMarginRight = 20;
constexpr double kMarginTop = 30;
constexpr double kMarginBottom = 35;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 0.005 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly 5 round ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0)) return {lo};
  const double raw = span / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
  return out;
}

void panel(std::ostringstream& os, const Panel& p, double y0) {
  const Trajectory& tr = *p.trajectory;
  const double w = kPanelWidth - kMarginLeft - kMarginRight;
  const double h = kPanelHeight - kMarginTop - kMarginBottom;
  const double left = kMarginLeft, top = y0 + kMarginTop;

  const std::size_t n = tr.states.empty() ? 0 : tr.states.front().size();
  double t_lo = tr.times.empty() ? 0 : tr.times.front();
  double t_hi = tr.times.empty() ? 1 : tr.times.back();
  if (t_hi <= t_lo) t_hi = t_lo + 1;
  double y_lo = 0, y_hi = 0;
  for (const auto& s : tr.states)
    for (std::size_t i = 1; i < n; ++i) {
      y_lo = std::min(y_lo, s[i] - s[0]);
      y_hi = std::max(y_hi, s[i] - s[0]);
    }
  if (y_hi - y_lo < 1e-9) {
    y_lo -= 1;
    y_hi += 1;
  }
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;
  auto X = [&](double t) { return left + (t - t_lo) / (t_hi - t_lo) * w; };
  auto Y = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * h; };

  os << "<text x=\"" << num(left) << "\" y=\"" << num(y0 + 18) << "\" font-size=\"14\">" << escape(p.title)
     << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (double t : ticks(t_lo, t_hi)) {
    os << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(top + h) << "\" x2=\"" << num(X(t)) << "\" y2=\""
       << num(top + h + 4) << "\" stroke=\"#000\"/>";
    os << "<text x=\"" << num(X(t)) << "\" y=\"" << num(top + h + 16) << "\" font-size=\"10\" text-anchor=\"middle\">"
       << num(t) << "</text>\n";
  }
  for (double v : ticks(y_lo, y_hi)) {
    os << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(Y(v)) << "\" x2=\"" << num(left) << "\" y2=\""
       << num(Y(v)) << "\" stroke=\"#000\"/>";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(Y(v) + 3) << "\" font-size=\"10\" text-anchor=\"end\">"
       << num(v) << "</text>\n";
  }
  os << "<text x=\"" << num(left + w / 2) << "\" y=\"" << num(top + h + 30)
     << "\" font-size=\"11\" text-anchor=\"middle\">t</text>\n";

  for (const Kick& k : tr.events)
    os << "<line x1=\"" << num(X(k.time)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(X(k.time)) << "\" y2=\""
       << num(top + h) << "\" stroke=\"#bbb\" stroke-dasharray=\"3,3\"/>\n";

  // Thin out to at most ~2000 points per curve.
  const std::size_t stride = std::max<std::size_t>(1, tr.size() / 2000);
  for (std::size_t i = 1; i < n; ++i) {
    os << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << kPalette[(i - 1) % 10] << "\" points=\"";
    for (std::size_t k = 0; k < tr.size(); k += stride) {
      os << num(X(tr.times[k])) << ',' << num(Y(tr.states[k][i] - tr.states[k][0])) << ' ';
    }
    const std::size_t last = tr.size() - 1;
    os << num(X(tr.times[last])) << ',' << num(Y(tr.states[last][i] - tr.states[last][0]));
    os << "\"/>\n";
    os << "<text x=\"" << num(left + w - 4) << "\" y=\"" << num(Y(tr.states[last][i] - tr.states[last][0]) - 2)
       << "\" font-size=\"9\" text-anchor=\"end\" fill=\"" << kPalette[(i - 1) % 10] << "\">" << i + 1 << "</text>\n";
  }
}

}  // namespace

std::string phase_differences(const std::vector<Panel>& panels) {
  std::ostringstream os;
  const double height = kPanelHeight * std::max<std::size_t>(1, panels.size());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kPanelWidth) << "\" height=\"" << num(height)
     << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t k = 0; k < panels.size(); ++k)
    if (panels[k].trajectory && panels[k].trajectory->size() > 0) panel(os, panels[k], k * kPanelHeight);
  os << "</svg>\n";
  return os.str();
}

std::string digraph(const Digraph& g, const std::vector<Edge>& highlight, const std::string& title) {
  const double size = 420, cx = size / 2, cy = size / 2 + 10, r = 160, node_r = 14;
  const int n = g.node_count();
  auto pos = [&](NodeId i) {
    const double a = -std::numbers::pi / 2 + 2 * std::numbers::pi * (i - 1) / n;
    return std::pair{cx + r * std::cos(a), cy + r * std::sin(a)};
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size) << "\" height=\"" << num(size + 20)
     << "\" font-family=\"sans-serif\">\n";
  os << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"7\" "
        "markerHeight=\"7\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (!title.empty()) os << "<text x=\"10\" y=\"18\" font-size=\"14\">" << escape(title) << "</text>\n";
  for (const Edge& e : g.edges()) {
    const bool bold = std::any_of(highlight.begin(), highlight.end(),
                                  [&](const Edge& h) { return h.src == e.src && h.dst == e.dst; });
    auto [x1, y1] = pos(e.src);
    auto [x2, y2] = pos(e.dst);
    const double dx = x2 - x1, dy = y2 - y1, len = std::hypot(dx, dy);
    // Offset sideways so that opposite edges do not overlap.
    const double ox = -dy / len * 4, oy = dx / len * 4;
    const double sx = x1 + dx / len * node_r + ox, sy = y1 + dy / len * node_r + oy;
    const double ex = x2 - dx / len * node_r + ox, ey = y2 - dy / len * node_r + oy;
    os << "<line x1=\"" << num(sx) << "\" y1=\"" << num(sy) << "\" x2=\"" << num(ex) << "\" y2=\"" << num(ey)
       << "\" stroke=\"" << (bold ? "#d62728" : "#333") << "\" stroke-width=\"" << (bold ? "2.5" : "1.2")
       << "\" marker-end=\"url(#arrow)\"/>\n";
    if (e.weight != 1)
      os << "<text x=\"" << num((sx + ex) / 2 + ox * 2) << "\" y=\"" << num((sy + ey) / 2 + oy * 2)
         << "\" font-size=\"11\" text-anchor=\"middle\">" << e.weight << "</text>\n";
  }
  for (NodeId i = 1; i <= n; ++i) {
    auto [x, y] = pos(i);
    os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(node_r)
       << "\" fill=\"#eef\" stroke=\"#000\"/>";
    os << "<text x=\"" << num(x) << "\" y=\"" << num(y + 4) << "\" font-size=\"12\" text-anchor=\"middle\">" << i
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace bcpg::svg
