#ifndef CAMUV_DATASET_HPP
#define CAMUV_DATASET_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace camuv {

/// Column-named sample matrix: n rows (samples) by p named variables.
/// Names must be unique and entries finite.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::vector<std::string> names, Eigen::MatrixXd values)
        : names_(std::move(names)), values_(std::move(values)) {
        if (values_.rows() == 0 || values_.cols() == 0)
            throw std::invalid_argument("dataset: empty matrix");
        if (static_cast<Eigen::Index>(names_.size()) != values_.cols())
            throw std::invalid_argument("dataset: name count does not match column count");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty())
                throw std::invalid_argument("dataset: empty column name");
            if (index_.count(names_[i]))
                throw std::invalid_argument("dataset: duplicate column name '" + names_[i] + "'");
            index_[names_[i]] = static_cast<int>(i);
        }
        if (!values_.allFinite())
            throw std::invalid_argument("dataset: non-finite entry");
    }

    Eigen::Index rows() const { return values_.rows(); }
    Eigen::Index cols() const { return values_.cols(); }
    const std::vector<std::string>& names() const { return names_; }
    const Eigen::MatrixXd& values() const { return values_; }

    const std::string& name(int col) const { return names_.at(static_cast<std::size_t>(col)); }

    bool has_column(const std::string& name) const { return index_.count(name) > 0; }

    int column_index(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end())
            throw std::invalid_argument("dataset: unknown column '" + name + "'");
        return it->second;
    }

    Eigen::VectorXd column(int i) const { return values_.col(i); }
    Eigen::VectorXd column(const std::string& name) const { return values_.col(column_index(name)); }

private:
    std::vector<std::string> names_;
    Eigen::MatrixXd values_;
    std::unordered_map<std::string, int> index_;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, std::size_t line_no) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = tok.data() + tok.size();
    // tolerate surrounding spaces
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::invalid_argument("csv: cannot parse number '" + tok + "' at line " +
                                    std::to_string(line_no));
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

/// Reads a comma-separated file with a mandatory header row of column names.
inline Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> names = detail::split_csv_line(line);
    if (names.empty()) throw std::invalid_argument("csv: missing header in '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto toks = detail::split_csv_line(line);
        if (toks.size() != names.size())
            throw std::invalid_argument("csv: line " + std::to_string(line_no) + " has " +
                                        std::to_string(toks.size()) + " fields, expected " +
                                        std::to_string(names.size()));
        std::vector<double> row(toks.size());
        for (std::size_t j = 0; j < toks.size(); ++j) row[j] = detail::parse_double(toks[j], line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("csv: no data rows in '" + path + "'");

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return Dataset(names, std::move(m));
}

/// Writes a dataset as CSV (header row, '.' decimal, shortest round-trip numbers).
inline void write_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
    const auto& names = d.names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out << ',';
        out << names[j];
    }
    out << '\n';
    const auto& v = d.values();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            if (j) out << ',';
            out << detail::format_double(v(i, j));
        }
        out << '\n';
    }
}

}  // namespace camuv

#endif
