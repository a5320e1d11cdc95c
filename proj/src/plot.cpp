#include "sslnl/plot.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sslnl/common.hpp"
#include "sslnl/image.hpp"
#include "sslnl/imageio.hpp"

namespace sslnl {

namespace {

// ------------------------------ raster canvas ------------------------------

struct Rgb {
    float r, g, b;
};

const Rgb kPalette[] = {
    {0.12f, 0.47f, 0.71f}, {0.89f, 0.47f, 0.13f}, {0.17f, 0.63f, 0.17f}, {0.84f, 0.15f, 0.16f},
    {0.58f, 0.40f, 0.74f}, {0.55f, 0.34f, 0.29f}, {0.89f, 0.47f, 0.76f}, {0.50f, 0.50f, 0.50f},
};

Rgb series_color(std::size_t i) { return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))]; }

struct Canvas {
    Image img;
    explicit Canvas(int h, int w) : img(h, w, 3) { std::fill(img.v.begin(), img.v.end(), 1.0f); }

    void set(int y, int x, Rgb c, float alpha = 1.0f) {
        if (y < 0 || y >= img.h || x < 0 || x >= img.w) return;
        for (int ch = 0; ch < 3; ++ch) {
            const float old = img.at(y, x, ch);
            const float nv = (ch == 0 ? c.r : (ch == 1 ? c.g : c.b));
            img.at(y, x, ch) = old * (1.0f - alpha) + nv * alpha;
        }
    }

    void line(double y0, double x0, double y1, double x1, Rgb c) {
        const double steps = std::max(std::abs(y1 - y0), std::abs(x1 - x0)) + 1.0;
        for (int s = 0; s <= static_cast<int>(steps); ++s) {
            const double t = s / steps;
            set(static_cast<int>(std::lround(y0 + t * (y1 - y0))),
                static_cast<int>(std::lround(x0 + t * (x1 - x0))), c);
        }
    }

    void fill_rect(int y0, int x0, int h, int w, Rgb c, float alpha = 1.0f) {
        for (int y = y0; y < y0 + h; ++y)
            for (int x = x0; x < x0 + w; ++x) set(y, x, c, alpha);
    }

    void marker(int y, int x, Rgb c) {
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx)
                if (std::abs(dy) + std::abs(dx) <= 2) set(y + dy, x + dx, c);
    }
};

// ------------------------------ 5x7 bitmap font -----------------------------

const std::map<char, std::array<const char*, 7>>& glyphs() {
    static const std::map<char, std::array<const char*, 7>> table = {
        {' ', {"     ", "     ", "     ", "     ", "     ", "     ", "     "}},
        {'0', {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "}},
        {'1', {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
        {'2', {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"}},
        {'3', {" ### ", "#   #", "    #", "  ## ", "    #", "#   #", " ### "}},
        {'4', {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "}},
        {'5', {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "}},
        {'6', {"  ## ", " #   ", "#    ", "#### ", "#   #", "#   #", " ### "}},
        {'7', {"#####", "    #", "   # ", "  #  ", " #   ", " #   ", " #   "}},
        {'8', {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "}},
        {'9', {" ### ", "#   #", "#   #", " ####", "    #", "   # ", " ##  "}},
        {'.', {"     ", "     ", "     ", "     ", "     ", "  ## ", "  ## "}},
        {',', {"     ", "     ", "     ", "     ", "  ## ", "  ## ", " #   "}},
        {'-', {"     ", "     ", "     ", " ### ", "     ", "     ", "     "}},
        {'_', {"     ", "     ", "     ", "     ", "     ", "     ", "#####"}},
        {'=', {"     ", "     ", "#####", "     ", "#####", "     ", "     "}},
        {'(', {"   # ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "   # "}},
        {')', {" #   ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " #   "}},
        {'/', {"    #", "    #", "   # ", "  #  ", " #   ", "#    ", "#    "}},
        {'%', {"##   ", "##  #", "   # ", "  #  ", " #   ", "#  ##", "   ##"}},
        {'+', {"     ", "  #  ", "  #  ", "#####", "  #  ", "  #  ", "     "}},
        {'a', {"     ", "     ", " ### ", "    #", " ####", "#   #", " ####"}},
        {'b', {"#    ", "#    ", "#### ", "#   #", "#   #", "#   #", "#### "}},
        {'c', {"     ", "     ", " ####", "#    ", "#    ", "#    ", " ####"}},
        {'d', {"    #", "    #", " ####", "#   #", "#   #", "#   #", " ####"}},
        {'e', {"     ", "     ", " ### ", "#   #", "#####", "#    ", " ### "}},
        {'f', {"  ## ", " #   ", "#### ", " #   ", " #   ", " #   ", " #   "}},
        {'g', {"     ", " ####", "#   #", "#   #", " ####", "    #", " ### "}},
        {'h', {"#    ", "#    ", "#### ", "#   #", "#   #", "#   #", "#   #"}},
        {'i', {"  #  ", "     ", " ##  ", "  #  ", "  #  ", "  #  ", " ### "}},
        {'j', {"   # ", "     ", "  ## ", "   # ", "   # ", "#  # ", " ##  "}},
        {'k', {"#    ", "#    ", "#  # ", "# #  ", "##   ", "# #  ", "#  # "}},
        {'l', {" ##  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
        {'m', {"     ", "     ", "## # ", "# # #", "# # #", "# # #", "# # #"}},
        {'n', {"     ", "     ", "#### ", "#   #", "#   #", "#   #", "#   #"}},
        {'o', {"     ", "     ", " ### ", "#   #", "#   #", "#   #", " ### "}},
        {'p', {"     ", "     ", "#### ", "#   #", "#### ", "#    ", "#    "}},
        {'q', {"     ", "     ", " ####", "#   #", " ####", "    #", "    #"}},
        {'r', {"     ", "     ", "# ## ", "##   ", "#    ", "#    ", "#    "}},
        {'s', {"     ", "     ", " ####", "#    ", " ### ", "    #", "#### "}},
        {'t', {" #   ", " #   ", "#### ", " #   ", " #   ", " #   ", "  ## "}},
        {'u', {"     ", "     ", "#   #", "#   #", "#   #", "#   #", " ####"}},
        {'v', {"     ", "     ", "#   #", "#   #", "#   #", " # # ", "  #  "}},
        {'w', {"     ", "     ", "#   #", "#   #", "# # #", "# # #", " # # "}},
        {'x', {"     ", "     ", "#   #", " # # ", "  #  ", " # # ", "#   #"}},
        {'y', {"     ", "     ", "#   #", "#   #", " ####", "    #", " ### "}},
        {'z', {"     ", "     ", "#####", "   # ", "  #  ", " #   ", "#####"}},
    };
    return table;
}

void draw_text(Canvas& canvas, int y, int x, std::string text, Rgb color) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto& table = glyphs();
    int cx = x;
    for (char ch : text) {
        auto it = table.find(ch);
        if (it == table.end()) it = table.find(' ');
        for (int gy = 0; gy < 7; ++gy)
            for (int gx = 0; gx < 5; ++gx)
                if (it->second[gy][gx] == '#') canvas.set(y + gy, cx + gx, color);
        cx += 6;
    }
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ------------------------------ svg helpers --------------------------------

std::string svg_color(Rgb c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(c.r * 255),
                  static_cast<int>(c.g * 255), static_cast<int>(c.b * 255));
    return buf;
}

struct Extent {
    double lo = 0.0, hi = 1.0;
    void expand(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

struct Layout {
    int width = 720, height = 480;
    int left = 70, right = 160, top = 40, bottom = 55;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;

    double px(double x) const {
        const double f = (x_hi - x_lo) < 1e-12 ? 0.5 : (x - x_lo) / (x_hi - x_lo);
        return left + f * (width - left - right);
    }
    double py(double y) const {
        const double f = (y_hi - y_lo) < 1e-12 ? 0.5 : (y - y_lo) / (y_hi - y_lo);
        return height - bottom - f * (height - top - bottom);
    }
};

void axes_png(Canvas& canvas, const Layout& lay, const std::string& title, const std::string& x_label,
              const std::string& y_label) {
    const Rgb black{0, 0, 0};
    canvas.line(lay.height - lay.bottom, lay.left, lay.height - lay.bottom, lay.width - lay.right, black);
    canvas.line(lay.top, lay.left, lay.height - lay.bottom, lay.left, black);
    draw_text(canvas, 12, lay.left, title, black);
    draw_text(canvas, lay.height - 14, (lay.width - lay.right + lay.left) / 2 - 3 * static_cast<int>(x_label.size()),
              x_label, black);
    draw_text(canvas, lay.top - 14, 6, y_label, black);
    for (int t = 0; t <= 5; ++t) {
        const double xv = lay.x_lo + t * (lay.x_hi - lay.x_lo) / 5.0;
        const double yv = lay.y_lo + t * (lay.y_hi - lay.y_lo) / 5.0;
        const int xp = static_cast<int>(lay.px(xv)), yp = static_cast<int>(lay.py(yv));
        canvas.line(lay.height - lay.bottom, xp, lay.height - lay.bottom + 4, xp, black);
        draw_text(canvas, lay.height - lay.bottom + 8, xp - 8, fmt_tick(xv), black);
        canvas.line(yp, lay.left - 4, yp, lay.left, black);
        draw_text(canvas, yp - 3, 8, fmt_tick(yv), black);
    }
}

void legend_png(Canvas& canvas, const Layout& lay, const std::vector<PlotSeries>& series) {
    int ly = lay.top + 4;
    for (std::size_t i = 0; i < series.size(); ++i) {
        canvas.fill_rect(ly, lay.width - lay.right + 10, 7, 14, series_color(i));
        draw_text(canvas, ly, lay.width - lay.right + 30, series[i].label, {0, 0, 0});
        ly += 14;
    }
}

void axes_svg(std::ostream& os, const Layout& lay, const std::string& title, const std::string& x_label,
              const std::string& y_label) {
    os << "<line x1='" << lay.left << "' y1='" << lay.height - lay.bottom << "' x2='"
       << lay.width - lay.right << "' y2='" << lay.height - lay.bottom << "' stroke='black'/>\n"
       << "<line x1='" << lay.left << "' y1='" << lay.top << "' x2='" << lay.left << "' y2='"
       << lay.height - lay.bottom << "' stroke='black'/>\n"
       << "<text x='" << lay.left << "' y='20' font-size='14'>" << title << "</text>\n"
       << "<text x='" << (lay.width - lay.right + lay.left) / 2 << "' y='" << lay.height - 8
       << "' font-size='12'>" << x_label << "</text>\n"
       << "<text x='6' y='" << lay.top - 8 << "' font-size='12'>" << y_label << "</text>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = lay.x_lo + t * (lay.x_hi - lay.x_lo) / 5.0;
        const double yv = lay.y_lo + t * (lay.y_hi - lay.y_lo) / 5.0;
        os << "<text x='" << lay.px(xv) - 8 << "' y='" << lay.height - lay.bottom + 16
           << "' font-size='10'>" << fmt_tick(xv) << "</text>\n"
           << "<text x='8' y='" << lay.py(yv) + 3 << "' font-size='10'>" << fmt_tick(yv) << "</text>\n";
    }
}

void legend_svg(std::ostream& os, const Layout& lay, const std::vector<PlotSeries>& series) {
    int ly = lay.top + 8;
    for (std::size_t i = 0; i < series.size(); ++i) {
        os << "<rect x='" << lay.width - lay.right + 10 << "' y='" << ly - 8
           << "' width='14' height='8' fill='" << svg_color(series_color(i)) << "'/>\n"
           << "<text x='" << lay.width - lay.right + 30 << "' y='" << ly << "' font-size='11'>"
           << series[i].label << "</text>\n";
        ly += 16;
    }
}

} // namespace

void render_line_chart(const std::string& path_base, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series) {
    check(!series.empty(), "config", "line chart needs at least one series");
    Layout lay;
    Extent ex{1e300, -1e300}, ey{0.0, 1e-9};
    for (const PlotSeries& s : series) {
        check(s.x.size() == s.y.size(), "shape", "series x/y length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            ex.expand(s.x[i]);
            const double e = s.yerr.empty() ? 0.0 : s.yerr[i];
            ey.expand(s.y[i] - e);
            ey.expand(s.y[i] + e);
        }
    }
    if (ex.lo > ex.hi) ex = {0.0, 1.0};
    lay.x_lo = ex.lo;
    lay.x_hi = ex.hi + (ex.hi - ex.lo < 1e-12 ? 1.0 : 0.0);
    lay.y_lo = std::min(0.0, ey.lo);
    lay.y_hi = std::max(1.0, ey.hi);

    // raster
    Canvas canvas(lay.height, lay.width);
    axes_png(canvas, lay, title, x_label, y_label);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const Rgb c = series_color(si);
        if (!s.yerr.empty())
            for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
                // shaded band between consecutive points
                const int x0 = static_cast<int>(lay.px(s.x[i])), x1 = static_cast<int>(lay.px(s.x[i + 1]));
                for (int x = x0; x <= x1; ++x) {
                    const double t = (x1 == x0) ? 0.0 : static_cast<double>(x - x0) / (x1 - x0);
                    const double y = s.y[i] + t * (s.y[i + 1] - s.y[i]);
                    const double e = s.yerr[i] + t * (s.yerr[i + 1] - s.yerr[i]);
                    const int ytop = static_cast<int>(lay.py(y + e)), ybot = static_cast<int>(lay.py(y - e));
                    for (int yy = ytop; yy <= ybot; ++yy) canvas.set(yy, x, c, 0.18f);
                }
            }
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
            canvas.line(lay.py(s.y[i]), lay.px(s.x[i]), lay.py(s.y[i + 1]), lay.px(s.x[i + 1]), c);
        for (std::size_t i = 0; i < s.x.size(); ++i)
            canvas.marker(static_cast<int>(lay.py(s.y[i])), static_cast<int>(lay.px(s.x[i])), c);
    }
    legend_png(canvas, lay, series);
    save_png(path_base + ".png", canvas.img);

    // vector
    std::ofstream os(path_base + ".svg");
    check(os.good(), "io", "cannot write plot: " + path_base + ".svg");
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << lay.width << "' height='" << lay.height
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    axes_svg(os, lay, title, x_label, y_label);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const std::string color = svg_color(series_color(si));
        if (!s.yerr.empty() && s.x.size() > 1) {
            os << "<polygon fill='" << color << "' fill-opacity='0.2' stroke='none' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                os << lay.px(s.x[i]) << "," << lay.py(s.y[i] + s.yerr[i]) << " ";
            for (std::size_t i = s.x.size(); i-- > 0;)
                os << lay.px(s.x[i]) << "," << lay.py(s.y[i] - s.yerr[i]) << " ";
            os << "'/>\n";
        }
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) os << lay.px(s.x[i]) << "," << lay.py(s.y[i]) << " ";
        os << "'/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << "<circle cx='" << lay.px(s.x[i]) << "' cy='" << lay.py(s.y[i]) << "' r='2.5' fill='"
               << color << "'/>\n";
    }
    legend_svg(os, lay, series);
    os << "</svg>\n";
}

void render_bar_chart(const std::string& path_base, const std::string& title,
                      const std::vector<std::string>& group_labels, const std::string& y_label,
                      const std::vector<PlotSeries>& series) {
    check(!series.empty() && !group_labels.empty(), "config", "bar chart needs groups and series");
    const std::size_t groups = group_labels.size();
    for (const PlotSeries& s : series)
        check(s.y.size() == groups, "shape", "bar series must cover every group");

    Layout lay;
    lay.x_lo = 0.0;
    lay.x_hi = static_cast<double>(groups);
    double ymax = 1.0;
    for (const PlotSeries& s : series)
        for (std::size_t i = 0; i < groups; ++i)
            ymax = std::max(ymax, s.y[i] + (s.yerr.empty() ? 0.0 : s.yerr[i]));
    lay.y_lo = 0.0;
    lay.y_hi = ymax;

    const double group_w = (lay.width - lay.left - lay.right) / static_cast<double>(groups);
    const double bar_w = group_w * 0.8 / static_cast<double>(series.size());

    Canvas canvas(lay.height, lay.width);
    const Rgb black{0, 0, 0};
    // y axis + ticks only; group labels replace numeric x ticks
    canvas.line(lay.height - lay.bottom, lay.left, lay.height - lay.bottom, lay.width - lay.right, black);
    canvas.line(lay.top, lay.left, lay.height - lay.bottom, lay.left, black);
    draw_text(canvas, 12, lay.left, title, black);
    draw_text(canvas, lay.top - 14, 6, y_label, black);
    for (int t = 0; t <= 5; ++t) {
        const double yv = lay.y_lo + t * (lay.y_hi - lay.y_lo) / 5.0;
        const int yp = static_cast<int>(lay.py(yv));
        canvas.line(yp, lay.left - 4, yp, lay.left, black);
        draw_text(canvas, yp - 3, 8, fmt_tick(yv), black);
    }

    std::ofstream os(path_base + ".svg");
    check(os.good(), "io", "cannot write plot: " + path_base + ".svg");
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << lay.width << "' height='" << lay.height
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    axes_svg(os, lay, title, "", y_label);

    for (std::size_t gi = 0; gi < groups; ++gi) {
        const double gx = lay.left + (gi + 0.1) * group_w;
        draw_text(canvas, lay.height - lay.bottom + 8,
                  static_cast<int>(lay.left + (gi + 0.5) * group_w) - 3 * static_cast<int>(group_labels[gi].size()),
                  group_labels[gi], black);
        os << "<text x='" << lay.left + (gi + 0.5) * group_w - 3.0 * group_labels[gi].size() << "' y='"
           << lay.height - lay.bottom + 16 << "' font-size='10'>" << group_labels[gi] << "</text>\n";
        for (std::size_t si = 0; si < series.size(); ++si) {
            const double x0 = gx + si * bar_w;
            const double ytop = lay.py(series[si].y[gi]);
            const double ybase = lay.py(0.0);
            const Rgb c = series_color(si);
            canvas.fill_rect(static_cast<int>(ytop), static_cast<int>(x0),
                             static_cast<int>(ybase - ytop), static_cast<int>(bar_w) - 1, c);
            os << "<rect x='" << x0 << "' y='" << ytop << "' width='" << bar_w - 1 << "' height='"
               << ybase - ytop << "' fill='" << svg_color(c) << "'/>\n";
            if (!series[si].yerr.empty() && series[si].yerr[gi] > 0.0) {
                const double xm = x0 + bar_w / 2;
                const double ye0 = lay.py(series[si].y[gi] - series[si].yerr[gi]);
                const double ye1 = lay.py(series[si].y[gi] + series[si].yerr[gi]);
                canvas.line(ye1, xm, ye0, xm, black);
                canvas.line(ye1, xm - 3, ye1, xm + 3, black);
                canvas.line(ye0, xm - 3, ye0, xm + 3, black);
                os << "<line x1='" << xm << "' y1='" << ye0 << "' x2='" << xm << "' y2='" << ye1
                   << "' stroke='black'/>\n"
                   << "<line x1='" << xm - 3 << "' y1='" << ye0 << "' x2='" << xm + 3 << "' y2='" << ye0
                   << "' stroke='black'/>\n"
                   << "<line x1='" << xm - 3 << "' y1='" << ye1 << "' x2='" << xm + 3 << "' y2='" << ye1
                   << "' stroke='black'/>\n";
            }
        }
    }
    legend_png(canvas, lay, series);
    legend_svg(os, lay, series);
    os << "</svg>\n";
    save_png(path_base + ".png", canvas.img);
}

} // namespace sslnl
