#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sglm/simulate.hpp"

namespace sglm::io {

/// Rectangular numeric CSV with a header row. Lines starting with '#'
/// before the header are kept as comments (without the leading "# ").
struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    Eigen::MatrixXd data;

    Eigen::Index column_index(const std::string& name) const;  // -1 when absent
};

Table read_table(std::istream& in);
Table read_table_file(const std::string& path);

// Numbers are written with 17 significant digits (lossless for binary64).
void write_table(std::ostream& out, const Table& table);
void write_table_file(const std::string& path, const Table& table);

std::string format_number(double v);

// CSV of already-formatted cells (for mixed text/number outputs).
struct TextTable {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

void write_text_table(std::ostream& out, const TextTable& table);
void write_text_table_file(const std::string& path, const TextTable& table);

/// A panel file split by column prefix: x_<name> covariates, y_<name>
/// responses and truth_<name> ground truth. Names are stored without prefix.
struct PanelData {
    std::vector<std::string> comments;
    std::vector<std::string> x_names;
    Eigen::MatrixXd x;
    std::vector<std::string> y_names;
    Eigen::MatrixXd y;
    std::vector<std::string> truth_names;
    Eigen::MatrixXd truth;

    Eigen::Index n_obs() const noexcept { return y.rows(); }
    Eigen::Index y_index(const std::string& name) const;      // -1 when absent
    Eigen::Index truth_index(const std::string& name) const;  // -1 when absent
};

PanelData panel_from_table(const Table& table);
Table table_from_panel(const PanelData& panel);

// Series are named s1..sq; truth columns: noise, offset, z_<s>, wx_<s>, wn_<s>.
PanelData panel_from_truth(const SimTruth& truth);

}  // namespace sglm::io
