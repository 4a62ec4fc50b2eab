#include "fwflow/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace fwflow {

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

std::vector<TraceRow> trace_rows(const Trace& trace, bool include_time) {
    std::vector<TraceRow> rows;
    rows.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        rows.push_back(TraceRow{r.k, r.grad_calls, r.f_value, r.duality_gap, r.step_size,
                                static_cast<long>(r.atom_support.size()), r.identified ? 1 : 0,
                                include_time ? r.wall_ms : 0.0});
    }
    return rows;
}

void write_trace_csv(std::ostream& out, const Trace& trace, bool include_time) {
    out << kTraceCsvHeader << '\n';
    for (const auto& r : trace_rows(trace, include_time)) {
        out << r.k << ',' << r.grad_calls << ',' << format_double(r.f) << ',' << format_double(r.gap) << ','
            << format_double(r.step) << ',' << r.support_size << ',' << r.identified << ','
            << format_double(r.wall_ms) << '\n';
    }
}

namespace {

template <class T>
T parse_field(std::string_view sv, long lineno) {
    T v{};
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || ptr != sv.data() + sv.size())
        throw FormatError("bad CSV field '" + std::string(sv) + "'", lineno);
    return v;
}

}  // namespace

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty CSV", 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceCsvHeader) throw FormatError("unexpected CSV header", 1);
    std::vector<TraceRow> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            f.emplace_back(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (f.size() != 8) throw FormatError("expected 8 fields", lineno);
        rows.push_back(TraceRow{parse_field<long>(f[0], lineno), parse_field<long>(f[1], lineno),
                                parse_field<double>(f[2], lineno), parse_field<double>(f[3], lineno),
                                parse_field<double>(f[4], lineno), parse_field<long>(f[5], lineno),
                                parse_field<int>(f[6], lineno), parse_field<double>(f[7], lineno)});
    }
    return rows;
}

void write_gap_svg(std::ostream& out, const std::vector<const Trace*>& traces, const std::string& title) {
    constexpr double W = 720, H = 460, left = 70, right = 180, top = 40, bottom = 50;
    constexpr std::array<const char*, 8> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto* t : traces)
        for (const auto& r : t->records) {
            if (r.grad_calls <= 0 || !(r.duality_gap > 0.0)) continue;
            const double x = std::log10(static_cast<double>(r.grad_calls));
            const double y = std::log10(r.duality_gap);
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = -1;
        ymax = 0;
    }
    if (xmax - xmin < 1e-9) xmax = xmin + 1;
    if (ymax - ymin < 1e-9) ymax = ymin + 1;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d)
        out << "<text x=\"" << px(d) << "\" y=\"" << H - bottom + 18
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e" << d << "</text>\n";
    for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d)
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(d) + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e" << d << "</text>\n";
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">gradient calls</text>\n";
    out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
        << top + ph / 2 << ")\" text-anchor=\"middle\">duality gap</text>\n";

    // Reference slopes anchored at the top-left corner of the data.
    out << "<g clip-path=\"url(#plot)\">\n";
    out << "<clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\"/></clipPath>\n";
    for (double slope : {-1.0, -1.5}) {
        const double y1 = ymax + slope * (xmax - xmin);
        out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(ymax) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(y1)
            << "\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n";
    }
    std::size_t ci = 0;
    for (const auto* t : traces) {
        out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[ci % colors.size()] << "\" points=\"";
        for (const auto& r : t->records) {
            if (r.grad_calls <= 0 || !(r.duality_gap > 0.0)) continue;
            out << px(std::log10(static_cast<double>(r.grad_calls))) << ',' << py(std::log10(r.duality_gap)) << ' ';
        }
        out << "\"/>\n";
        ++ci;
    }
    out << "</g>\n";
    ci = 0;
    for (const auto* t : traces) {
        const double ly = top + 16 + 18 * static_cast<double>(ci);
        out << "<line x1=\"" << W - right + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 36 << "\" y2=\"" << ly
            << "\" stroke=\"" << colors[ci % colors.size()] << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << W - right + 42 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
            << t->solver_id << "</text>\n";
        ++ci;
    }
    const double ly = top + 16 + 18 * static_cast<double>(ci);
    out << "<line x1=\"" << W - right + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 36 << "\" y2=\"" << ly
        << "\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n";
    out << "<text x=\"" << W - right + 42 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">slopes -1, -1.5</text>\n";
    out << "</svg>\n";
}

}  // namespace fwflow
