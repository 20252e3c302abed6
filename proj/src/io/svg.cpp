#include "dsre/io/io.hpp"

#include <algorithm>
#include <cstdio>

namespace dsre::io {

// Dependency-free SVG bar chart. Static layout, deterministic output.
void write_histogram_svg(const std::string& path, const AngularHistogram& hist,
                         const std::string& title) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw Error("cannot open " + path);

    const int width = 720, height = 440;
    const int ml = 60, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr;
    const double ph = height - mt - mb;
    const double max_mass = std::max(1e-12, *std::max_element(hist.mass.begin(), hist.mass.end()));

    std::fprintf(f,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                 "viewBox=\"0 0 %d %d\">\n",
                 width, height, width, height);
    std::fprintf(f, "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", width, height);
    std::fprintf(f,
                 "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
                 "text-anchor=\"middle\">%s</text>\n",
                 width / 2, title.c_str());

    // axes
    std::fprintf(f,
                 "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n"
                 "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                 ml, mt, ml, height - mb, ml, height - mb, width - mr, height - mb);

    for (int k = 0; k < hist.bins; ++k) {
        const double x0 = ml + pw * (hist.edges[k] - hist.lo) / (hist.hi - hist.lo);
        const double x1 = ml + pw * (hist.edges[k + 1] - hist.lo) / (hist.hi - hist.lo);
        const double h = ph * hist.mass[k] / max_mass;
        if (hist.mass[k] <= 0.0) continue;
        std::fprintf(f,
                     "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                     "fill=\"#4878a8\" stroke=\"none\"/>\n",
                     x0, height - mb - h, std::max(0.5, x1 - x0 - 0.4), h);
    }

    // x ticks at multiples of pi/8
    for (double tick = hist.lo; tick <= hist.hi + 1e-9; tick += M_PI / 8.0) {
        const double x = ml + pw * (tick - hist.lo) / (hist.hi - hist.lo);
        std::fprintf(f,
                     "<line x1=\"%.2f\" y1=\"%d\" x2=\"%.2f\" y2=\"%d\" stroke=\"black\"/>\n"
                     "<text x=\"%.2f\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                     "text-anchor=\"middle\">%.3f</text>\n",
                     x, height - mb, x, height - mb + 5, x, height - mb + 20, tick);
    }
    // y ticks
    for (int j = 0; j <= 4; ++j) {
        const double v = max_mass * j / 4.0;
        const double y = height - mb - ph * j / 4.0;
        std::fprintf(f,
                     "<line x1=\"%d\" y1=\"%.2f\" x2=\"%d\" y2=\"%.2f\" stroke=\"black\"/>\n"
                     "<text x=\"%d\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                     "text-anchor=\"end\">%.3g</text>\n",
                     ml - 5, y, ml, y, ml - 8, y + 4.0, v);
    }
    std::fprintf(f,
                 "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                 "text-anchor=\"middle\">angle (rad)</text>\n",
                 ml + static_cast<int>(pw / 2), height - 10);
    std::fputs("</svg>\n", f);
    std::fclose(f);
}

} // namespace dsre::io
