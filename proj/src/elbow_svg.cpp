#include "kcc/elbow_svg.hpp"

#include "kcc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kcc {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

} // namespace

std::string elbow_svg(const SseCurve& sse, std::optional<int> marked_k) {
    const int kmax = sse.k_max();
    if (kmax < 2) throw InvalidInput("elbow plot needs at least two SSE values");
    for (double v : sse.values)
        if (!std::isfinite(v)) throw InvalidInput("SSE curve contains non-finite values");
    if (!marked_k && kmax >= 3) marked_k = elbow(sse);
    if (marked_k && (*marked_k < 1 || *marked_k > kmax)) throw InvalidInput("marked k outside the curve");

    const double top = *std::max_element(sse.values.begin(), sse.values.end());
    const double bottom = std::min(0.0, *std::min_element(sse.values.begin(), sse.values.end()));
    const double span = top > bottom ? top - bottom : 1.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](int k) { return kLeft + plot_w * (k - 1) / (kmax - 1); };
    auto py = [&](double v) { return kTop + plot_h * (1.0 - (v - bottom) / span); };

    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
    for (int k = 1; k <= kmax; ++k)
        s << "<text x=\"" << px(k) << "\" y=\"" << kTop + plot_h + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
          << k << "</text>\n";
    s << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 8
      << "\" font-size=\"13\" text-anchor=\"middle\">k</text>\n"
      << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">SSE</text>\n";
    s.precision(6);
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(top) + 4 << "\" font-size=\"10\" text-anchor=\"end\">"
      << top << "</text>\n";
    s.precision(2);

    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (int k = 1; k <= kmax; ++k) s << (k > 1 ? " " : "") << px(k) << ',' << py(sse.at(k));
    s << "\"/>\n";
    for (int k = 1; k <= kmax; ++k)
        s << "<circle cx=\"" << px(k) << "\" cy=\"" << py(sse.at(k)) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    if (marked_k)
        s << "<circle class=\"elbow\" data-k=\"" << *marked_k << "\" cx=\"" << px(*marked_k) << "\" cy=\""
          << py(sse.at(*marked_k)) << "\" r=\"7\" fill=\"none\" stroke=\"crimson\" stroke-width=\"2\"/>\n";
    s << "</svg>\n";
    return s.str();
}

void emit_elbow_svg(const SseCurve& sse, const std::filesystem::path& path, std::optional<int> marked_k) {
    const std::string doc = elbow_svg(sse, marked_k);
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << doc;
    if (!out) throw Error("failed writing " + path.string());
}

} // namespace kcc
