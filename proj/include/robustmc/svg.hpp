#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "robustmc/csv.hpp"
#include "robustmc/errors.hpp"

namespace robustmc {

// Minimal static SVG 1.1 line plot: axes box, ticks, legend, one polyline
// per curve. No external plotting dependency.
class SvgLinePlot {
 public:
    struct Curve {
        std::string label;
        std::vector<double> x, y;
    };

    SvgLinePlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_curve(std::string label, std::vector<double> x, std::vector<double> y) {
        if (x.size() != y.size() || x.empty())
            throw ContractViolation("SvgLinePlot: curve needs matching nonempty x/y");
        curves_.push_back({std::move(label), std::move(x), std::move(y)});
    }

    void write(const std::string& path) const {
        if (curves_.empty()) throw ContractViolation("SvgLinePlot: no curves");
        double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
        double y_lo = x_lo, y_hi = -x_lo;
        for (const Curve& c : curves_) {
            for (double v : c.x) { x_lo = std::min(x_lo, v); x_hi = std::max(x_hi, v); }
            for (double v : c.y) { y_lo = std::min(y_lo, v); y_hi = std::max(y_hi, v); }
        }
        if (x_hi <= x_lo) x_hi = x_lo + 1.0;
        if (y_hi <= y_lo) y_hi = y_lo + 1.0;
        double y_pad = 0.05 * (y_hi - y_lo);
        y_lo -= y_pad;
        y_hi += y_pad;

        const double w = 720, hgt = 480;
        const double ml = 70, mr = 150, mt = 40, mb = 50;
        auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
        auto py = [&](double y) { return hgt - mb - (y - y_lo) / (y_hi - y_lo) * (hgt - mt - mb); };

        std::ofstream out(path, std::ios::binary);
        if (!out) throw NumericError("cannot open output file: " + path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
            << "\" height=\"" << hgt << "\" viewBox=\"0 0 " << w << " " << hgt << "\">\n";
        out << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << hgt
            << "\" fill=\"white\"/>\n";
        out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << title_ << "</text>\n";

        // axes box and ticks
        out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w - ml - mr)
            << "\" height=\"" << (hgt - mt - mb)
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
        const int n_ticks = 6;
        for (int i = 0; i <= n_ticks; ++i) {
            double xv = x_lo + (x_hi - x_lo) * i / n_ticks;
            double yv = y_lo + (y_hi - y_lo) * i / n_ticks;
            out << "<line x1=\"" << px(xv) << "\" y1=\"" << (hgt - mb) << "\" x2=\"" << px(xv)
                << "\" y2=\"" << (hgt - mb + 5) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << px(xv) << "\" y=\"" << (hgt - mb + 18)
                << "\" text-anchor=\"middle\" font-size=\"11\">" << format_number(round3(xv))
                << "</text>\n";
            out << "<line x1=\"" << (ml - 5) << "\" y1=\"" << py(yv) << "\" x2=\"" << ml
                << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << (ml - 8) << "\" y=\"" << (py(yv) + 4)
                << "\" text-anchor=\"end\" font-size=\"11\">" << format_number(round3(yv))
                << "</text>\n";
        }
        out << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << (hgt - 12)
            << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label_ << "</text>\n";
        out << "<text x=\"18\" y=\"" << (mt + (hgt - mt - mb) / 2)
            << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
            << (mt + (hgt - mt - mb) / 2) << ")\">" << y_label_ << "</text>\n";

        static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
        for (std::size_t c = 0; c < curves_.size(); ++c) {
            const Curve& curve = curves_[c];
            out << "<polyline fill=\"none\" stroke=\"" << palette[c % 8]
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < curve.x.size(); ++i) {
                if (i) out << ' ';
                out << format_number(round2(px(curve.x[i]))) << ','
                    << format_number(round2(py(curve.y[i])));
            }
            out << "\"/>\n";
            double ly = mt + 16 + 18 * static_cast<double>(c);
            out << "<line x1=\"" << (w - mr + 10) << "\" y1=\"" << ly << "\" x2=\""
                << (w - mr + 34) << "\" y2=\"" << ly << "\" stroke=\"" << palette[c % 8]
                << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << (w - mr + 40) << "\" y=\"" << (ly + 4)
                << "\" font-size=\"12\">" << curve.label << "</text>\n";
        }
        out << "</svg>\n";
        if (!out) throw NumericError("write failed: " + path);
    }

 private:
    static double round2(double v) { return std::round(v * 100.0) / 100.0; }
    static double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

    std::string title_, x_label_, y_label_;
    std::vector<Curve> curves_;
};

}  // namespace robustmc
