#pragma once

// Deterministic CSV/JSON writers. Files land via temp-then-rename.

#include "pervolt/lift.hpp"
#include "pervolt/matseq.hpp"
#include "pervolt/weights.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace pervolt::cli {

/// 17 significant digits.
std::string fmt(double v);

/// Writes `content` to path.tmp, then renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Header "n,<sym>_11,<sym>_12,..." and one row per index.
std::string matseq_csv(const MatSeq& S, const std::string& sym);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    std::string str() const;

private:
    std::size_t width_;
    std::string buf_;
};

nlohmann::ordered_json to_json(const ConditionResult& c);
nlohmann::ordered_json to_json(const Matrix& m);
std::string dump(const nlohmann::ordered_json& j);

} // namespace pervolt::cli
