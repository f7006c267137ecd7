#include "sglm/panel_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "sglm/error.hpp"

namespace sglm::io {

using Eigen::Index;
using Eigen::MatrixXd;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, std::size_t row, const std::string& column) {
    const std::string t = trim(text);
    auto where = [&] { return "row " + std::to_string(row) + ", column '" + column + "'"; };
    if (t.empty()) throw ParseError("missing value at " + where());
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw ParseError("cannot parse '" + t + "' as a number at " + where());
    return v;
}

Index find(const std::vector<std::string>& names, const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<Index>(i);
    return -1;
}

}  // namespace

Index Table::column_index(const std::string& name) const { return find(columns, name); }

Table read_table(std::istream& in) {
    Table t;
    std::string line;
    bool have_header = false;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            if (line.rfind('#', 0) == 0) {
                std::string c = line.substr(1);
                if (!c.empty() && c.front() == ' ') c.erase(0, 1);
                t.comments.push_back(c);
                continue;
            }
            if (trim(line).empty()) continue;
            for (const auto& c : split_csv_line(line)) t.columns.push_back(trim(c));
            std::set<std::string> uniq(t.columns.begin(), t.columns.end());
            if (uniq.size() != t.columns.size()) throw ParseError("duplicate column names in header");
            for (const auto& c : t.columns)
                if (c.empty()) throw ParseError("empty column name in header");
            have_header = true;
            continue;
        }
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        const std::size_t row = rows.size() + 1;
        if (cells.size() != t.columns.size())
            throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                             ") has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(t.columns.size()));
        std::vector<double> values;
        values.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            values.push_back(parse_number(cells[c], row, t.columns[c]));
        rows.push_back(std::move(values));
    }
    if (!have_header) throw ParseError("no header row");
    t.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            t.data(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return t;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "' for reading");
    return read_table(in);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_table(std::ostream& out, const Table& table) {
    for (const auto& c : table.comments) out << "# " << c << '\n';
    for (std::size_t j = 0; j < table.columns.size(); ++j)
        out << (j ? "," : "") << table.columns[j];
    out << '\n';
    for (Index i = 0; i < table.data.rows(); ++i) {
        for (Index j = 0; j < table.data.cols(); ++j)
            out << (j ? "," : "") << format_number(table.data(i, j));
        out << '\n';
    }
}

void write_table_file(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_table(out, table);
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

void write_text_table(std::ostream& out, const TextTable& table) {
    for (const auto& c : table.comments) out << "# " << c << '\n';
    for (std::size_t j = 0; j < table.columns.size(); ++j)
        out << (j ? "," : "") << table.columns[j];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw AlignmentError("text table row width does not match header");
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << '\n';
    }
}

void write_text_table_file(const std::string& path, const TextTable& table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_text_table(out, table);
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

Index PanelData::y_index(const std::string& name) const { return find(y_names, name); }
Index PanelData::truth_index(const std::string& name) const { return find(truth_names, name); }

PanelData panel_from_table(const Table& table) {
    PanelData p;
    p.comments = table.comments;
    std::vector<Index> xs, ys, ts;
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        const std::string& c = table.columns[j];
        if (c.rfind("x_", 0) == 0 && c.size() > 2) {
            xs.push_back(static_cast<Index>(j));
            p.x_names.push_back(c.substr(2));
        } else if (c.rfind("y_", 0) == 0 && c.size() > 2) {
            ys.push_back(static_cast<Index>(j));
            p.y_names.push_back(c.substr(2));
        } else if (c.rfind("truth_", 0) == 0 && c.size() > 6) {
            ts.push_back(static_cast<Index>(j));
            p.truth_names.push_back(c.substr(6));
        } else {
            throw ParseError("column '" + c + "' lacks an x_, y_ or truth_ prefix");
        }
    }
    if (ys.empty()) throw ParseError("panel has no y_ response columns");
    auto gather = [&](const std::vector<Index>& idx) {
        MatrixXd m(table.data.rows(), static_cast<Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) m.col(static_cast<Index>(k)) = table.data.col(idx[k]);
        return m;
    };
    p.x = gather(xs);
    p.y = gather(ys);
    p.truth = gather(ts);
    return p;
}

Table table_from_panel(const PanelData& p) {
    Table t;
    t.comments = p.comments;
    for (const auto& n : p.x_names) t.columns.push_back("x_" + n);
    for (const auto& n : p.y_names) t.columns.push_back("y_" + n);
    for (const auto& n : p.truth_names) t.columns.push_back("truth_" + n);
    t.data.resize(p.y.rows(), p.x.cols() + p.y.cols() + p.truth.cols());
    t.data << p.x, p.y, p.truth;
    return t;
}

PanelData panel_from_truth(const SimTruth& truth) {
    const Index m = truth.n_obs();
    const Index q = truth.n_series();
    PanelData p;
    p.x_names = {"x"};
    p.x = truth.x;
    for (Index j = 0; j < q; ++j) p.y_names.push_back("s" + std::to_string(j + 1));
    p.y = truth.y;

    p.truth_names = {"noise", "offset"};
    for (const char* prefix : {"z_", "wx_", "wn_"})
        for (const auto& s : p.y_names) p.truth_names.push_back(prefix + s);
    p.truth.resize(m, 2 + 3 * q);
    p.truth.col(0) = truth.noise;
    p.truth.col(1).setConstant(truth.offset);
    p.truth.middleCols(2, q) = truth.z;
    for (Index j = 0; j < q; ++j) {
        p.truth.col(2 + q + j).setConstant(truth.w_x[j]);
        p.truth.col(2 + 2 * q + j).setConstant(truth.w_n[j]);
    }
    return p;
}

}  // namespace sglm::io
