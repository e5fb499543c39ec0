#include "cspc/render.hpp"

#include <algorithm>
#include <cmath>

#include "cspc/format.hpp"

namespace cspc {

namespace {

constexpr double margin_left = 55.0;
constexpr double margin_right = 15.0;
constexpr double margin_top = 30.0;
constexpr double margin_bottom = 30.0;

struct frame {
    double x0, y0, plot_w, plot_h; // top-left of plot area
    double vmin, vmax;             // value range
    std::size_t n;

    double px(std::size_t i) const {
        if (n <= 1)
            return x0 + plot_w / 2.0;
        return x0 + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    double py(double v) const {
        const double t = (v - vmin) / (vmax - vmin);
        return y0 + plot_h * (1.0 - t);
    }
};

void append_attr(std::string& s, const char* name, const std::string& value) {
    s += ' ';
    s += name;
    s += "=\"";
    s += value;
    s += '"';
}

void line(std::string& out, double x1, double y1, double x2, double y2, const char* cls,
          const char* stroke) {
    out += "<line";
    append_attr(out, "class", cls);
    append_attr(out, "x1", fmt_sig(x1, 8));
    append_attr(out, "y1", fmt_sig(y1, 8));
    append_attr(out, "x2", fmt_sig(x2, 8));
    append_attr(out, "y2", fmt_sig(y2, 8));
    append_attr(out, "stroke", stroke);
    out += "/>\n";
}

void circle(std::string& out, double cx, double cy, double r, const char* cls,
            const char* fill) {
    out += "<circle";
    append_attr(out, "class", cls);
    append_attr(out, "cx", fmt_sig(cx, 8));
    append_attr(out, "cy", fmt_sig(cy, 8));
    append_attr(out, "r", fmt_sig(r, 8));
    append_attr(out, "fill", fill);
    out += "/>\n";
}

void rect(std::string& out, double x, double y, double w, double h, const char* cls,
          const char* fill, const char* opacity) {
    out += "<rect";
    append_attr(out, "class", cls);
    append_attr(out, "x", fmt_sig(x, 8));
    append_attr(out, "y", fmt_sig(y, 8));
    append_attr(out, "width", fmt_sig(w, 8));
    append_attr(out, "height", fmt_sig(h, 8));
    append_attr(out, "fill", fill);
    append_attr(out, "fill-opacity", opacity);
    out += "/>\n";
}

void text(std::string& out, double x, double y, const std::string& content, const char* cls) {
    out += "<text";
    append_attr(out, "class", cls);
    append_attr(out, "x", fmt_sig(x, 8));
    append_attr(out, "y", fmt_sig(y, 8));
    append_attr(out, "font-size", "11");
    append_attr(out, "font-family", "sans-serif");
    out += '>';
    out += content;
    out += "</text>\n";
}

} // namespace

std::string render_chart(const chart_series& series, const render_spec& spec) {
    if (series.points.empty())
        throw std::invalid_argument("nothing to render");
    if (spec.width <= 0 || spec.height <= 0)
        throw std::invalid_argument("invalid render dimensions");

    frame f;
    f.x0 = margin_left;
    f.y0 = margin_top;
    f.plot_w = spec.width - margin_left - margin_right;
    f.plot_h = spec.height - margin_top - margin_bottom;
    f.n = series.points.size();

    if (series.kind == chart_kind::p_value) {
        f.vmin = 0.0;
        f.vmax = 1.0;
    } else {
        double lo = series.points[0].value, hi = lo;
        const auto widen = [&](double v) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        };
        for (const auto& p : series.points) {
            widen(p.value);
            if (p.lower) widen(*p.lower);
            if (p.upper) widen(*p.upper);
        }
        if (series.limit && series.kind == chart_kind::conformal_score)
            widen(*series.limit);
        if (series.shewhart) {
            widen(series.shewhart->ucl);
            widen(series.shewhart->lcl);
        }
        if (hi == lo) { // flat series still needs a drawable range
            lo -= 1.0;
            hi += 1.0;
        }
        const double pad = 0.05 * (hi - lo);
        f.vmin = lo - pad;
        f.vmax = hi + pad;
    }

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
    out += fmt_sig(spec.width, 8);
    out += "\" height=\"";
    out += fmt_sig(spec.height, 8);
    out += "\" viewBox=\"0 0 " + fmt_sig(spec.width, 8) + " " + fmt_sig(spec.height, 8) + "\">\n";

    // interval band, drawn first so the series sits on top
    if (series.kind == chart_kind::conformal_interval ||
        series.kind == chart_kind::uncertainty_spike) {
        const double half_step = f.n > 1 ? f.plot_w / static_cast<double>(f.n - 1) / 2.0
                                         : f.plot_w / 2.0;
        for (std::size_t i = 0; i < f.n; ++i) {
            const auto& p = series.points[i];
            if (!p.lower || !p.upper)
                continue;
            const double top = f.py(*p.upper);
            const double bot = f.py(*p.lower);
            rect(out, f.px(i) - half_step, top, 2.0 * half_step, bot - top, "band",
                 "#8ecae6", "0.35");
        }
    }

    // axes
    line(out, f.x0, f.y0, f.x0, f.y0 + f.plot_h, "axis", "#000000");
    line(out, f.x0, f.y0 + f.plot_h, f.x0 + f.plot_w, f.y0 + f.plot_h, "axis", "#000000");

    // limit lines
    if (series.shewhart) {
        line(out, f.x0, f.py(series.shewhart->ucl), f.x0 + f.plot_w, f.py(series.shewhart->ucl),
             "limit-line", "#d62828");
        line(out, f.x0, f.py(series.shewhart->lcl), f.x0 + f.plot_w, f.py(series.shewhart->lcl),
             "limit-line", "#d62828");
        line(out, f.x0, f.py(series.shewhart->center), f.x0 + f.plot_w,
             f.py(series.shewhart->center), "center-line", "#6c757d");
    }
    if (series.limit && series.kind == chart_kind::conformal_score)
        line(out, f.x0, f.py(*series.limit), f.x0 + f.plot_w, f.py(*series.limit), "limit-line",
             "#d62828");
    if (series.kind == chart_kind::p_value && series.alpha && spec.show_alpha_line)
        line(out, f.x0, f.py(*series.alpha), f.x0 + f.plot_w, f.py(*series.alpha), "alpha-line",
             "#d62828");

    // the series itself
    out += "<polyline class=\"series\" fill=\"none\" stroke=\"#1d3557\" points=\"";
    for (std::size_t i = 0; i < f.n; ++i) {
        if (i)
            out += ' ';
        out += fmt_sig(f.px(i), 8) + "," + fmt_sig(f.py(series.points[i].value), 8);
    }
    out += "\"/>\n";

    for (std::size_t i = 0; i < f.n; ++i)
        circle(out, f.px(i), f.py(series.points[i].value), 2.0, "point", "#1d3557");

    if (spec.annotate_flags) {
        for (std::size_t i = 0; i < f.n; ++i) {
            const auto& p = series.points[i];
            if (p.limit_exceeded)
                circle(out, f.px(i), f.py(p.value), 4.0, "flag", "#d62828");
            if (p.uncertainty_spike)
                circle(out, f.px(i), f.py(p.value), 6.0, "spike", "#f77f00");
        }
    }

    // labels
    text(out, 4.0, f.y0 + 4.0, fmt_sig(f.vmax, 6), "label");
    text(out, 4.0, f.y0 + f.plot_h, fmt_sig(f.vmin, 6), "label");
    text(out, f.x0, static_cast<double>(spec.height) - 8.0,
         fmt_sig(static_cast<double>(series.points.front().index), 6), "label");
    text(out, f.x0 + f.plot_w - 20.0, static_cast<double>(spec.height) - 8.0,
         fmt_sig(static_cast<double>(series.points.back().index), 6), "label");
    if (!spec.title.empty())
        text(out, f.x0, 18.0, spec.title, "title");
    else
        text(out, f.x0, 18.0, std::string(to_string(series.kind)), "title");

    out += "</svg>\n";
    return out;
}

std::string render_report(const comparison_report& report) {
    std::string out = "chart\tpre_shift_alarm_rate\tpost_shift_detection_rate\t"
                      "first_detection_index\n";
    const auto row = [&](const chart_comparison& c) {
        out += c.chart;
        out += '\t';
        out += fmt_sig(c.pre_shift_alarm_rate, 6);
        out += '\t';
        out += fmt_sig(c.post_shift_detection_rate, 6);
        out += '\t';
        out += c.first_detection_index ? fmt_sig(*c.first_detection_index, 6) : "NA";
        out += '\n';
    };
    for (const auto& rep : report.per_repetition) {
        row(rep.shewhart);
        row(rep.conformal);
    }
    return out;
}

} // namespace cspc
