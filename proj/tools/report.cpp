#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "framegate/error.hpp"

namespace framegate::cli {
namespace {

std::string scalar_text(const Report& v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_null()) {
        return "-";
    }
    if (v.is_number_integer() || v.is_number_unsigned()) {
        return v.dump();
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
}

bool is_scalar(const Report& v) { return !v.is_array() && !v.is_object(); }

bool all_of_items(const Report& arr, bool (*pred)(const Report&))
{
    return std::all_of(arr.begin(), arr.end(), [&](const Report& x) { return pred(x); });
}

bool scalar_row(const Report& v) { return v.is_array() && all_of_items(v, is_scalar); }

bool flat_object(const Report& v)
{
    if (!v.is_object()) {
        return false;
    }
    return std::all_of(v.begin(), v.end(), [](const Report& x) { return is_scalar(x) || scalar_row(x); });
}

std::string cell_text(const Report& v)
{
    if (is_scalar(v)) {
        return scalar_text(v);
    }
    std::string s;
    for (const auto& x : v) {
        s += (s.empty() ? "" : " ") + scalar_text(x);
    }
    return s;
}

std::string inline_row(const Report& arr)
{
    std::string s = "[";
    bool first = true;
    for (const auto& x : arr) {
        s += (first ? "" : ", ") + scalar_text(x);
        first = false;
    }
    return s + "]";
}

void render_table(std::string& out, const Report& rows, const std::string& pad)
{
    std::vector<std::string> columns;
    for (const auto& row : rows) {
        for (const auto& [k, v] : row.items()) {
            if (std::find(columns.begin(), columns.end(), k) == columns.end()) {
                columns.push_back(k);
            }
        }
    }
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        width[c] = columns[c].size();
    }
    for (const auto& row : rows) {
        std::vector<std::string> line;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            line.push_back(row.contains(columns[c]) ? cell_text(row[columns[c]]) : "-");
            width[c] = std::max(width[c], line.back().size());
        }
        cells.push_back(std::move(line));
    }
    auto emit_line = [&](const std::vector<std::string>& line) {
        std::string s = pad;
        for (std::size_t c = 0; c < line.size(); ++c) {
            s += line[c];
            if (c + 1 < line.size()) {
                s += std::string(width[c] - line[c].size() + 2, ' ');
            }
        }
        out += s + "\n";
    };
    emit_line(columns);
    for (const auto& line : cells) {
        emit_line(line);
    }
}

void render_value(std::string& out, const std::string& key, const Report& v, int depth)
{
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (is_scalar(v)) {
        out += pad + key + ": " + scalar_text(v) + "\n";
        return;
    }
    if (v.is_array()) {
        if (v.empty() || (scalar_row(v) && inline_row(v).size() <= 100)) {
            out += pad + key + ": " + inline_row(v) + "\n";
            return;
        }
        if (scalar_row(v)) {
            out += pad + key + ":\n";
            for (const auto& item : v) {
                out += pad + "  " + scalar_text(item) + "\n";
            }
            return;
        }
        if (all_of_items(v, scalar_row)) {
            out += pad + key + ":\n";
            for (const auto& row : v) {
                out += pad + "  " + inline_row(row) + "\n";
            }
            return;
        }
        if (all_of_items(v, flat_object)) {
            out += pad + key + ":\n";
            render_table(out, v, pad + "  ");
            return;
        }
        out += pad + key + ":\n";
        int i = 0;
        for (const auto& item : v) {
            render_value(out, "[" + std::to_string(i++) + "]", item, depth + 1);
        }
        return;
    }
    out += pad + key + ":\n";
    for (const auto& [k, child] : v.items()) {
        render_value(out, k, child, depth + 1);
    }
}

}  // namespace

Report make_report(const std::string& command)
{
    Report r = Report::object();
    r["command"] = command;
    r["schema_version"] = 1;
    return r;
}

double rounded(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    const double y = std::strtod(buf, nullptr);
    return y == 0.0 ? 0.0 : y;
}

Report to_json(const ComplexMatrix& m)
{
    Report re = Report::array();
    Report im = Report::array();
    for (int r = 0; r < m.dim(); ++r) {
        Report rr = Report::array();
        Report ir = Report::array();
        for (int c = 0; c < m.dim(); ++c) {
            rr.push_back(rounded(m(r, c).real()));
            ir.push_back(rounded(m(r, c).imag()));
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ir));
    }
    Report out = Report::object();
    out["re"] = std::move(re);
    out["im"] = std::move(im);
    return out;
}

Report to_json(const RealMatrix& m)
{
    Report out = Report::array();
    for (int r = 0; r < m.rows(); ++r) {
        Report row = Report::array();
        for (int c = 0; c < m.cols(); ++c) {
            row.push_back(rounded(m(r, c)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

Report to_json(const GLParityElement& g)
{
    Report out = Report::object();
    out["kind"] = g.kind();
    out["Y"] = to_json(g.Y());
    return out;
}

Report to_json(const PUAElement& g)
{
    Report out = Report::object();
    out["parity"] = g.parity();
    out["U"] = to_json(g.U());
    return out;
}

std::string render_json(const Report& r) { return r.dump(2) + "\n"; }

std::string render_text(const Report& r)
{
    std::string out;
    for (const auto& [k, v] : r.items()) {
        render_value(out, k, v, 0);
    }
    return out;
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        fail(ErrorCode::ConfigError, "cannot write report to '" + path + "'");
    }
    f << text;
}

}  // namespace framegate::cli
