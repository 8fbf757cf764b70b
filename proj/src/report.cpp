#include "glucast/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "glucast/errors.hpp"

namespace glucast::report {

namespace {

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open file for writing: " + path);
    return out;
}

std::string fixed3(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string sci10(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

ReportRow make_row(const std::string& dataset, const std::string& method, int ph_min,
                   const metrics::MetricsReport& r) {
    ReportRow row;
    row.dataset = dataset;
    row.method = method;
    row.ph_min = ph_min;
    row.rmse = r.rmse;
    row.cc = r.cc;
    row.tl_min = r.tl_min;
    row.fit_pct = r.fit_pct;
    row.n = r.n;
    row.hypo = r.hypo_count;
    row.hyper = r.hyper_count;
    return row;
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
    auto out = open_for_write(path);
    out << "dataset,method,ph_min,rmse,cc,tl_min,fit_pct,n,hypo,hyper\n";
    for (const ReportRow& r : rows) {
        out << r.dataset << ',' << r.method << ',' << r.ph_min << ',' << fixed3(r.rmse) << ','
            << fixed3(r.cc) << ',' << fixed3(r.tl_min) << ',' << fixed3(r.fit_pct) << ',' << r.n
            << ',' << r.hypo << ',' << r.hyper << '\n';
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_history_csv(const std::string& path, const training::History& history) {
    auto out = open_for_write(path);
    out << "epoch,train_mse,val_mse\n";
    for (const auto& e : history) {
        out << e.epoch << ',' << sci10(e.train_mse) << ',' << sci10(e.val_mse) << '\n';
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_sweep_csv(const std::string& path, const std::vector<training::SweepRow>& rows) {
    auto out = open_for_write(path);
    out << "epochs,rmse,cc,tl_min,fit_pct\n";
    for (const auto& r : rows) {
        out << r.epochs << ',' << fixed3(r.rmse) << ',' << fixed3(r.cc) << ',' << fixed3(r.tl_min)
            << ',' << fixed3(r.fit_pct) << '\n';
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_summary_csv(const std::string& path,
                       const std::vector<metrics::DatasetSummary>& rows) {
    auto out = open_for_write(path);
    out << "dataset,samples,mean_mgdl,hypo,hyper\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.samples << ',' << fixed3(r.mean_mgdl) << ',' << r.hypo << ','
            << r.hyper << '\n';
    }
    if (!out) throw ConfigError("write failed: " + path);
}

void write_prediction_svg(const std::string& path, const Vec& actual_mgdl,
                          const Vec& predicted_mgdl, const std::string& title) {
    if (actual_mgdl.size() != predicted_mgdl.size() || actual_mgdl.empty()) {
        throw InputError("write_prediction_svg: series must be nonempty and equal length");
    }
    constexpr double kWidth = 900.0, kHeight = 420.0;
    constexpr double kLeft = 60.0, kRight = 20.0, kTop = 40.0, kBottom = 40.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    double lo = actual_mgdl[0], hi = actual_mgdl[0];
    for (const Vec* v : {&actual_mgdl, &predicted_mgdl}) {
        for (double x : *v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    if (hi <= lo) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const std::size_t n = actual_mgdl.size();
    auto px = [&](std::size_t i) {
        return kLeft + (n == 1 ? 0.0 : plot_w * static_cast<double>(i) / static_cast<double>(n - 1));
    };
    auto py = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };
    auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    auto polyline = [&](const Vec& v, const char* color) {
        std::string s = "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                        "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ' ';
            s += coord(px(i)) + ',' + coord(py(v[i]));
        }
        s += "\"/>\n";
        return s;
    };

    auto out = open_for_write(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(title) << "</text>\n";

    // Axes and a few horizontal guide lines with mg/dL labels.
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = lo + (hi - lo) * tick / 4.0;
        const double y = py(v);
        out << "<line x1=\"" << kLeft << "\" y1=\"" << coord(y) << "\" x2=\"" << kLeft + plot_w
            << "\" y2=\"" << coord(y) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"4\" y=\"" << coord(y + 4) << "\" font-family=\"sans-serif\" "
            << "font-size=\"11\">" << coord(v) << "</text>\n";
    }
    out << "<text x=\"" << kLeft + plot_w / 2 - 60 << "\" y=\"" << kHeight - 8
        << "\" font-family=\"sans-serif\" font-size=\"12\">test samples (5 min grid)</text>\n";

    out << polyline(actual_mgdl, "#1f77b4");
    out << polyline(predicted_mgdl, "#d62728");
    out << "<text x=\"" << kLeft + plot_w - 170 << "\" y=\"" << kTop + 14
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f77b4\">actual</text>\n";
    out << "<text x=\"" << kLeft + plot_w - 110 << "\" y=\"" << kTop + 14
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">predicted</text>\n";
    out << "</svg>\n";
    if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace glucast::report
