#include "basislab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "basislab/errors.hpp"

namespace basislab {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string short_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4g", value);
  return buffer;
}

}  // namespace

void emit_svg(const CoefficientTrajectory& traj, const std::filesystem::path& path,
              const SvgOptions& options) {
  traj.validate();
  if (traj.size() == 0) {
    throw InputError("emit_svg: trajectory is empty");
  }
  const int margin = 60;
  const double plot_w = options.width - 2 * margin;
  const double plot_h = options.height - 2 * margin;
  const std::size_t columns = traj.labels.size();

  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    for (Eigen::Index i = 0; i < traj.coefficients[t].size(); ++i) {
      const double v = traj.coefficients[t](i);
      if (options.log_y && !(v > 0.0)) {
        continue;
      }
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (!std::isfinite(y_min)) {  // all values clipped
    y_min = 0.1;
    y_max = 1.0;
  }
  auto transform_y = [&](double v) { return options.log_y ? std::log10(v) : v; };
  double lo = transform_y(y_min);
  double hi = transform_y(y_max);
  if (hi - lo < 1e-30) {
    hi = lo + 1.0;
    lo -= 1.0;
  }
  const double x_last = static_cast<double>(traj.steps.back());
  const double x_first = static_cast<double>(traj.steps.front());
  const double x_span = std::max(x_last - x_first, 1.0);

  auto px = [&](std::size_t step) {
    return margin + plot_w * (static_cast<double>(step) - x_first) / x_span;
  };
  auto py = [&](double v) { return margin + plot_h * (1.0 - (transform_y(v) - lo) / (hi - lo)); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height
      << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <line x1=\"" << margin << "\" y1=\"" << options.height - margin << "\" x2=\""
      << options.width - margin << "\" y2=\"" << options.height - margin
      << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
      << options.height - margin << "\" stroke=\"black\"/>\n";
  out << "  <text x=\"" << margin << "\" y=\"" << options.height - margin + 20
      << "\" font-size=\"12\">" << traj.steps.front() << "</text>\n";
  out << "  <text x=\"" << options.width - margin << "\" y=\"" << options.height - margin + 20
      << "\" font-size=\"12\" text-anchor=\"end\">" << traj.steps.back() << "</text>\n";
  out << "  <text x=\"" << margin - 8 << "\" y=\"" << options.height - margin
      << "\" font-size=\"12\" text-anchor=\"end\">" << short_number(y_min) << "</text>\n";
  out << "  <text x=\"" << margin - 8 << "\" y=\"" << margin
      << "\" font-size=\"12\" text-anchor=\"end\">" << short_number(y_max) << "</text>\n";

  for (std::size_t c = 0; c < columns; ++c) {
    const char* color = kPalette[c % (sizeof kPalette / sizeof kPalette[0])];
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const double v = traj.coefficients[t](static_cast<Eigen::Index>(c));
      if (options.log_y && !(v > 0.0)) {
        continue;
      }
      if (!first) {
        out << ' ';
      }
      out << short_number(px(traj.steps[t])) << ',' << short_number(py(v));
      first = false;
    }
    out << "\"/>\n";
    out << "  <text x=\"" << options.width - margin + 6 << "\" y=\""
        << margin + 16 * static_cast<int>(c) << "\" font-size=\"12\" fill=\"" << color << "\">"
        << traj.labels[c] << "</text>\n";
  }
  out << "</svg>\n";

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) {
      throw IoError("cannot open for writing: " + tmp.string());
    }
    os << out.str();
    os.flush();
    if (!os) {
      throw IoError("write failure: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace basislab
