#include "fwflow/bench.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace fwflow {

namespace {

bool parse_double(std::string_view sv, double& out) {
    if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
    if (sv.empty()) return false;
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
    return ec == std::errc() && ptr == sv.data() + sv.size();
}

bool parse_index(std::string_view sv, long& out) {
    if (sv.empty()) return false;
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
    return ec == std::errc() && ptr == sv.data() + sv.size();
}

struct SparseRow {
    double label;
    std::vector<std::pair<long, double>> entries;
};

}  // namespace

LibsvmData parse_libsvm(std::istream& in) {
    std::vector<SparseRow> rows;
    long max_index = 0;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        SparseRow row;
        if (!parse_double(tok, row.label)) throw FormatError("bad label '" + tok + "'", lineno);
        long prev = 0;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw FormatError("expected idx:val, got '" + tok + "'", lineno);
            const std::string_view key(tok.data(), colon);
            const std::string_view val(tok.data() + colon + 1, tok.size() - colon - 1);
            if (key == "qid") continue;
            long idx = 0;
            double v = 0.0;
            if (!parse_index(key, idx) || idx < 1) throw FormatError("bad feature index '" + tok + "'", lineno);
            if (!parse_double(val, v)) throw FormatError("bad feature value '" + tok + "'", lineno);
            if (idx <= prev) throw FormatError("feature indices must be strictly increasing", lineno);
            prev = idx;
            row.entries.emplace_back(idx, v);
            max_index = std::max(max_index, idx);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("no data rows", 0);
    if (max_index == 0) throw FormatError("no features", 0);

    std::set<double> distinct;
    for (const auto& r : rows) distinct.insert(r.label);
    if (distinct.size() > 2) throw FormatError("labels are not binary (" + std::to_string(distinct.size()) + " distinct values)", 0);
    const double low = *distinct.begin();
    auto map_label = [&](double l) {
        if (distinct.size() == 2) return l == low ? -1.0 : 1.0;
        return l <= 0.0 ? -1.0 : 1.0;
    };

    LibsvmData data;
    data.rows = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), max_index);
    data.labels = Vector(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        data.labels[r] = map_label(rows[i].label);
        for (const auto& [idx, v] : rows[i].entries) data.rows(r, idx - 1) = v;
    }
    return data;
}

LibsvmData load_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return parse_libsvm(in);
}

}  // namespace fwflow
