#include "pervolt/cli/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace pervolt::cli {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

std::string matseq_csv(const MatSeq& S, const std::string& sym) {
    std::vector<std::string> header{"n"};
    for (std::size_t p = 0; p < S.rows(); ++p) {
        for (std::size_t q = 0; q < S.cols(); ++q) {
            header.push_back(sym + "_" + std::to_string(p + 1) + std::to_string(q + 1));
        }
    }
    CsvTable t(header);
    std::vector<std::string> cells(header.size());
    for (std::size_t n = 0; n < S.len(); ++n) {
        cells[0] = std::to_string(n);
        std::size_t c = 1;
        for (std::size_t p = 0; p < S.rows(); ++p) {
            for (std::size_t q = 0; q < S.cols(); ++q) {
                cells[c++] = fmt(S.entry(n, p, q));
            }
        }
        t.row(cells);
    }
    return t.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) { row(header); }

void CsvTable::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) {
        throw std::logic_error("CsvTable: row width mismatch");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            buf_ += ',';
        }
        buf_ += cells[i];
    }
    buf_ += '\n';
}

std::string CsvTable::str() const { return buf_; }

nlohmann::ordered_json to_json(const ConditionResult& c) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["error"] = c.error;
    j["lower"] = c.value - c.error;
    j["upper"] = c.value + c.error;
    j["threshold"] = c.threshold;
    j["verdict"] = std::string(to_string(c.verdict));
    j["certification"] = std::string(to_string(c.cert));
    return j;
}

nlohmann::ordered_json to_json(const Matrix& m) {
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index p = 0; p < m.rows(); ++p) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index q = 0; q < m.cols(); ++q) {
            row.push_back(m(p, q));
        }
        rows.push_back(row);
    }
    return rows;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

} // namespace pervolt::cli
