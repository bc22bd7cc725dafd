#include "qcorr/cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "qcorr/error.hpp"

namespace qcorr::cli {

namespace {

using geometry::Point2;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

constexpr std::array<const char*, 8> kPalette{"#440154", "#3b528b", "#21918c", "#5ec962",
                                              "#fde725", "#e16462", "#b12a90", "#6a00a8"};

// World box to a square pixel panel, y up.
struct View {
  double x0, y0, scale, left, top, size;

  View(double xmin, double xmax, double ymin, double ymax, double left_, double top_, double size_)
      : left(left_), top(top_), size(size_) {
    double w = xmax - xmin, h = ymax - ymin;
    double span = std::max(w, h);
    if (!(span > 0.0)) span = std::max({1.0, std::abs(xmin), std::abs(ymin)}) * 1e-6;
    const double pad = 0.05 * span;
    span += 2.0 * pad;
    x0 = 0.5 * (xmin + xmax) - 0.5 * span;
    y0 = 0.5 * (ymin + ymax) - 0.5 * span;
    scale = size / span;
  }
  double px(double x) const { return left + (x - x0) * scale; }
  double py(double y) const { return top + size - (y - y0) * scale; }
};

std::string header(int w, int h) {
  return fmt("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" "
             "height=\"%d\" viewBox=\"0 0 %d %d\">\n"
             "<rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"white\"/>\n",
             w, h, w, h, w, h);
}

std::string cross(double x, double y, double r, const char* colour) {
  return fmt("<path d=\"M%.3f %.3fL%.3f %.3fM%.3f %.3fL%.3f %.3f\" stroke=\"%s\" "
             "stroke-width=\"2\"/>\n",
             x - r, y - r, x + r, y + r, x - r, y + r, x + r, y - r, colour);
}

}  // namespace

std::string portrait_svg(const portrait::PortraitResult& r, const portrait::PortraitConfig& config) {
  const double panel = 600.0, margin = 40.0;
  const int width = 1000, height = 680;
  std::string out = header(width, height);

  const View view(r.bounds.re_min, r.bounds.re_max, r.bounds.im_min, r.bounds.im_max, margin,
                  margin, panel);
  out += fmt("<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"none\" "
             "stroke=\"#999999\"/>\n",
             view.px(r.bounds.re_min), view.py(r.bounds.im_max),
             (r.bounds.re_max - r.bounds.re_min) * view.scale,
             (r.bounds.im_max - r.bounds.im_min) * view.scale);

  out += "<g class=\"curves\" fill=\"none\" stroke-width=\"1.2\">\n";
  for (const auto& c : r.curves.curves) {
    if (c.polyline.empty()) continue;
    const char* colour = kPalette[c.level_index % kPalette.size()];
    std::string pts;
    for (const Point2& p : c.polyline) pts += fmt("%.3f,%.3f ", view.px(p.x), view.py(p.y));
    if (c.closed) pts += fmt("%.3f,%.3f", view.px(c.polyline.front().x), view.py(c.polyline.front().y));
    out += fmt("<polyline stroke=\"%s\"%s points=\"", colour,
               c.level_index % 2 ? " stroke-dasharray=\"4 2\"" : "");
    out += pts + "\"/>\n";
  }
  out += "</g>\n";
  for (const auto& z : r.eigenvalues) out += cross(view.px(z.real()), view.py(z.imag()), 4, "black");

  // Legend.
  for (std::size_t k = 0; k < config.levels.size(); ++k) {
    const double y = margin + 14.0 * static_cast<double>(k);
    out += fmt("<line x1=\"660\" y1=\"%.1f\" x2=\"690\" y2=\"%.1f\" stroke=\"%s\" "
               "stroke-width=\"2\"%s/>\n",
               y, y, kPalette[k % kPalette.size()], k % 2 ? " stroke-dasharray=\"4 2\"" : "");
    out += fmt("<text x=\"696\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
               "dominant-baseline=\"middle\">%.3g</text>\n",
               y, config.levels[k]);
  }

  // Merge tree: leaves along the bottom, internal nodes at their level.
  const auto& nodes = r.report.tree.nodes;
  const std::size_t n = r.eigenvalues.size();
  const double tx0 = 760.0, tx1 = 980.0, ty0 = 620.0, ty1 = 200.0;
  const double levels = static_cast<double>(std::max<std::size_t>(config.levels.size(), 1));
  std::vector<double> nx(nodes.size(), 0.0), ny(nodes.size(), ty0);
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack(r.report.tree.roots.rbegin(), r.report.tree.roots.rend());
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (v < n) {
      order.push_back(v);
      continue;
    }
    for (auto it = nodes[v].children.rbegin(); it != nodes[v].children.rend(); ++it) {
      stack.push_back(*it);
    }
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    nx[order[k]] = order.size() > 1
                       ? tx0 + (tx1 - tx0) * static_cast<double>(k) / static_cast<double>(order.size() - 1)
                       : 0.5 * (tx0 + tx1);
  }
  for (std::size_t v = n; v < nodes.size(); ++v) {
    double sum = 0.0;
    for (std::size_t c : nodes[v].children) sum += nx[c];
    nx[v] = sum / static_cast<double>(std::max<std::size_t>(nodes[v].children.size(), 1));
    const double k = static_cast<double>(nodes[v].level_index.value_or(0));
    ny[v] = ty0 - (ty0 - ty1) * (levels - k) / levels;
  }
  out += "<g class=\"merge-tree\" stroke=\"black\" stroke-width=\"1.2\" fill=\"none\">\n";
  for (std::size_t v = n; v < nodes.size(); ++v) {
    for (std::size_t c : nodes[v].children) {
      out += fmt("<polyline points=\"%.3f,%.3f %.3f,%.3f %.3f,%.3f\"/>\n", nx[c], ny[c], nx[c],
                 ny[v], nx[v], ny[v]);
    }
  }
  out += "</g>\n";
  for (std::size_t leaf : order) {
    out += fmt("<text x=\"%.3f\" y=\"%.3f\" font-family=\"sans-serif\" font-size=\"10\" "
               "text-anchor=\"middle\">%zu</text>\n",
               nx[leaf], ty0 + 14.0, leaf);
  }
  out += "</svg>\n";
  return out;
}

std::string jordan_svg(const jordan::JordanResult& r) {
  const double panel = 600.0, margin = 40.0;
  std::string out = header(680, 700);

  const jordan::SampleCloud* cloud = nullptr;
  for (const auto& c : r.clouds) {
    if (!cloud || c.points.size() > cloud->points.size()) cloud = &c;
  }
  std::vector<Point2> pts = cloud ? cloud->points : std::vector<Point2>{};
  std::vector<Point2> rotated;
  if (r.found) {
    const double t = std::numbers::pi / r.estimate.rho;
    const double c = std::cos(t), s = std::sin(t);
    const Point2 o = r.estimate.lambda;
    for (const Point2& p : pts) {
      const Point2 d = p - o;
      rotated.push_back({o.x + c * d.x - s * d.y, o.y + s * d.x + c * d.y});
    }
  }
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool first = true;
  for (const auto* set : {&pts, &rotated}) {
    for (const Point2& p : *set) {
      if (first) {
        xmin = xmax = p.x;
        ymin = ymax = p.y;
        first = false;
      }
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (first && r.found) xmin = xmax = r.estimate.lambda.x, ymin = ymax = r.estimate.lambda.y;
  const View view(xmin, xmax, ymin, ymax, margin, margin, panel);

  out += "<g class=\"original\" fill=\"#d62728\">\n";
  for (const Point2& p : pts) out += fmt("<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2.5\"/>\n", view.px(p.x), view.py(p.y));
  out += "</g>\n<g class=\"rotated\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.2\">\n";
  for (const Point2& p : rotated) {
    out += fmt("<circle cx=\"%.3f\" cy=\"%.3f\" r=\"5\"/>\n", view.px(p.x), view.py(p.y));
  }
  out += "</g>\n";
  std::string caption = "no structure detected";
  if (r.found) {
    out += cross(view.px(r.estimate.lambda.x), view.py(r.estimate.lambda.y), 6, "#1f77b4");
    caption = fmt("lambda = %.10g%+.3gi, rho = %d, confidence %.3f", r.estimate.lambda.x,
                  r.estimate.lambda.y, r.estimate.rho, r.estimate.confidence);
  }
  if (cloud) caption += fmt("; delta exponent %d, %zu points", cloud->delta_exp, cloud->points.size());
  out += fmt("<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\">", margin,
             margin + panel + 30.0);
  out += caption + "</text>\n</svg>\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace qcorr::cli
