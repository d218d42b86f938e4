#include "pervolt/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pervolt::cli {

using json = nlohmann::json;

namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }
std::string at_index(const std::string& a, std::size_t i) { return a + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& field) {
    if (!j.is_number()) {
        throw ConfigError(field, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ConfigError(field, "must be finite");
    }
    return v;
}

double get_number(const json& obj, const char* key, const std::string& prefix, std::optional<double> dflt) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (!dflt) {
            throw ConfigError(join(prefix, key), "missing");
        }
        return *dflt;
    }
    return number(*it, join(prefix, key));
}

std::size_t get_count(const json& obj, const char* key, const std::string& prefix, std::size_t dflt) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return dflt;
    }
    if (!it->is_number_integer() || it->get<long long>() < 0) {
        throw ConfigError(join(prefix, key), "expected a nonnegative integer");
    }
    return it->get<std::size_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& prefix, bool dflt) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return dflt;
    }
    if (!it->is_boolean()) {
        throw ConfigError(join(prefix, key), "expected true or false");
    }
    return it->get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& prefix, std::optional<std::string> dflt) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (!dflt) {
            throw ConfigError(join(prefix, key), "missing");
        }
        return *dflt;
    }
    if (!it->is_string()) {
        throw ConfigError(join(prefix, key), "expected a string");
    }
    return it->get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError(join(prefix, it.key()), "unknown field");
        }
    }
}

const json& object_at(const json& j, const std::string& field) {
    if (!j.is_object()) {
        throw ConfigError(field, "expected an object");
    }
    return j;
}

// A number is a 1x1 matrix; otherwise a list of rows.
Matrix parse_matrix(const json& j, const std::string& field, std::size_t rows, std::size_t cols) {
    Matrix m;
    if (j.is_number()) {
        m = Matrix::Constant(1, 1, number(j, field));
    } else if (j.is_array() && !j.empty() && j.front().is_array()) {
        const std::size_t nr = j.size();
        const std::size_t nc = j.front().size();
        if (nc == 0) {
            throw ConfigError(field, "empty matrix row");
        }
        m.resize(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
        for (std::size_t p = 0; p < nr; ++p) {
            if (!j[p].is_array() || j[p].size() != nc) {
                throw ConfigError(at_index(field, p), "ragged matrix row");
            }
            for (std::size_t q = 0; q < nc; ++q) {
                m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
                    number(j[p][q], at_index(at_index(field, p), q));
            }
        }
    } else {
        throw ConfigError(field, "expected a number or a list of matrix rows");
    }
    if ((rows && static_cast<std::size_t>(m.rows()) != rows) || (cols && static_cast<std::size_t>(m.cols()) != cols)) {
        throw ConfigError(field, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " +
                                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    return m;
}

std::vector<Matrix> parse_matrix_list(const json& j, const std::string& field, std::size_t rows, std::size_t cols) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(field, "expected a nonempty list");
    }
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(parse_matrix(j[i], at_index(field, i), rows, cols));
    }
    return out;
}

WeightFn parse_weight(const json& j, const std::string& field) {
    object_at(j, field);
    const std::string kind = get_string(j, "kind", field, std::nullopt);
    if (j.contains("r") && !(get_number(j, "r", field, std::nullopt) > 0.0)) {
        throw ConfigError(join(field, "r"), "weight rate r must be positive");
    }
    try {
        if (kind == "poly") {
            reject_unknown(j, {"kind", "r", "alpha", "value_at_0", "name"}, field);
            return WeightFn::poly(get_number(j, "r", field, std::nullopt), get_number(j, "alpha", field, std::nullopt),
                                  get_number(j, "value_at_0", field, 1.0));
        }
        if (kind == "poly_stretch") {
            reject_unknown(j, {"kind", "r", "alpha", "beta", "value_at_0", "name"}, field);
            return WeightFn::poly_stretch(get_number(j, "r", field, std::nullopt),
                                          get_number(j, "alpha", field, std::nullopt),
                                          get_number(j, "beta", field, std::nullopt),
                                          get_number(j, "value_at_0", field, 1.0));
        }
        if (kind == "log_exp") {
            reject_unknown(j, {"kind", "r", "value_at_0", "value_at_1", "name"}, field);
            return WeightFn::log_exp(get_number(j, "r", field, std::nullopt), get_number(j, "value_at_0", field, 1.0),
                                     get_number(j, "value_at_1", field, 1.0));
        }
        if (kind == "table") {
            reject_unknown(j, {"kind", "values", "name"}, field);
            const auto it = j.find("values");
            if (it == j.end() || !it->is_array() || it->empty()) {
                throw ConfigError(join(field, "values"), "expected a nonempty list");
            }
            std::vector<double> v;
            for (std::size_t i = 0; i < it->size(); ++i) {
                v.push_back(number((*it)[i], at_index(join(field, "values"), i)));
            }
            return WeightFn::table(std::move(v));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
    throw ConfigError(join(field, "kind"), "unknown weight kind '" + kind + "'");
}

ArchModel parse_arch(const json& j, const std::string& field) {
    object_at(j, field);
    reject_unknown(j,
                   {"kind", "family", "a", "a_odd", "a_even", "alpha", "phi0", "lambda1", "lambda2", "var", "table",
                    "finite", "limits"},
                   field);
    ArchModel m;
    const std::string family = get_string(j, "family", field, std::string("two_periodic_poly"));
    m.a = get_number(j, "a", field, 0.0);
    m.lambda1 = get_number(j, "lambda1", field, 1.0);
    if (j.contains("lambda2")) {
        m.lambda2 = get_number(j, "lambda2", field, std::nullopt);
    }
    if (j.contains("var")) {
        m.var = get_number(j, "var", field, std::nullopt);
    }
    if (family == "two_periodic_poly") {
        m.family = ArchFamily::two_periodic_poly;
        m.a_odd = get_number(j, "a_odd", field, std::nullopt);
        m.a_even = get_number(j, "a_even", field, std::nullopt);
        m.alpha = get_number(j, "alpha", field, 2.0);
        m.phi0 = get_number(j, "phi0", field, 2.0);
    } else if (family == "table") {
        m.family = ArchFamily::table;
        const auto it = j.find("table");
        if (it == j.end() || !it->is_array()) {
            throw ConfigError(join(field, "table"), "expected a list of coefficients b(1), b(2), ...");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            m.table.push_back(number((*it)[i], at_index(join(field, "table"), i)));
        }
        m.table_finite = get_bool(j, "finite", field, false);
    } else {
        throw ConfigError(join(field, "family"), "unknown family '" + family + "'");
    }
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
    return m;
}

std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path, const std::string& field) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(field, "cannot open '" + path.string() + "'");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    bool drop_index = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (first) {
            first = false;
            char* end = nullptr;
            std::strtod(cells.front().c_str(), &end);
            if (end == cells.front().c_str()) {
                // header; a leading "n" column is an index
                drop_index = cells.front() == "n";
                continue;
            }
        }
        std::vector<double> vals;
        for (std::size_t c = drop_index ? 1 : 0; c < cells.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || !std::isfinite(v)) {
                throw ConfigError(field, path.string() + ":" + std::to_string(lineno) + ": bad number '" + cells[c] +
                                             "'");
            }
            vals.push_back(v);
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) {
        throw ConfigError(field, "'" + path.string() + "' holds no data");
    }
    return rows;
}

SequenceSpec parse_sequence(const json& j, const std::string& field, std::size_t rows, std::size_t cols,
                            const std::filesystem::path& base_dir) {
    object_at(j, field);
    SequenceSpec s;
    s.kind = get_string(j, "kind", field, std::nullopt);
    if (j.contains("limits")) {
        s.limits = parse_matrix_list(j["limits"], join(field, "limits"), rows, cols);
    }
    if (s.kind == "zero") {
        reject_unknown(j, {"kind"}, field);
        s.series = std::make_shared<TableSeries>(MatSeq(rows, cols, 1), true);
    } else if (s.kind == "modulated") {
        reject_unknown(j, {"kind", "pattern", "shift", "weight", "limits"}, field);
        if (!j.contains("pattern")) {
            throw ConfigError(join(field, "pattern"), "missing");
        }
        if (!j.contains("weight")) {
            throw ConfigError(join(field, "weight"), "missing");
        }
        auto pattern = parse_matrix_list(j["pattern"], join(field, "pattern"), rows, cols);
        s.series = std::make_shared<ModulatedSeries>(std::move(pattern), get_count(j, "shift", field, 0),
                                                     parse_weight(j["weight"], join(field, "weight")));
    } else if (s.kind == "table") {
        reject_unknown(j, {"kind", "values", "finite", "limits"}, field);
        if (!j.contains("values")) {
            throw ConfigError(join(field, "values"), "missing");
        }
        s.series = std::make_shared<TableSeries>(
            MatSeq::from_matrices(parse_matrix_list(j["values"], join(field, "values"), rows, cols)),
            get_bool(j, "finite", field, false));
    } else if (s.kind == "csv") {
        reject_unknown(j, {"kind", "path", "finite", "limits"}, field);
        std::filesystem::path p = get_string(j, "path", field, std::nullopt);
        if (p.is_relative()) {
            p = base_dir / p;
        }
        if (!std::filesystem::exists(p)) {
            throw ConfigError(join(field, "path"), "file '" + p.string() + "' does not exist");
        }
        const auto data = read_csv_rows(p, join(field, "path"));
        MatSeq S(rows, cols, data.size());
        for (std::size_t n = 0; n < data.size(); ++n) {
            if (data[n].size() != rows * cols) {
                throw ConfigError(join(field, "path"), "row " + std::to_string(n) + " has " +
                                                           std::to_string(data[n].size()) + " values, expected " +
                                                           std::to_string(rows * cols));
            }
            for (std::size_t p2 = 0; p2 < rows; ++p2) {
                for (std::size_t q = 0; q < cols; ++q) {
                    S.entry(n, p2, q) = data[n][p2 * cols + q];
                }
            }
        }
        s.series = std::make_shared<TableSeries>(std::move(S), get_bool(j, "finite", field, false));
    } else if (s.kind == "arch") {
        if (rows != 1 || cols != 1) {
            throw ConfigError(field, "the ARCH kernel is scalar; set d = 1");
        }
        s.series = parse_arch(j, field).kernel();
    } else {
        throw ConfigError(join(field, "kind"), "unknown sequence kind '" + s.kind + "'");
    }
    return s;
}

RandomSuiteSpec parse_suite(const json& j, const std::string& field) {
    object_at(j, field);
    reject_unknown(j,
                   {"count", "periods", "alpha_lo", "alpha_hi", "c3_lo", "c3_hi", "horizon", "T", "lifted_terms",
                    "converse"},
                   field);
    RandomSuiteSpec s;
    s.count = get_count(j, "count", field, s.count);
    if (j.contains("periods")) {
        const json& p = j["periods"];
        if (!p.is_array() || p.empty()) {
            throw ConfigError(join(field, "periods"), "expected a nonempty list");
        }
        s.periods.clear();
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!p[i].is_number_integer() || p[i].get<long long>() < 1) {
                throw ConfigError(at_index(join(field, "periods"), i), "expected a positive integer");
            }
            s.periods.push_back(p[i].get<std::size_t>());
        }
    }
    s.alpha_lo = get_number(j, "alpha_lo", field, s.alpha_lo);
    s.alpha_hi = get_number(j, "alpha_hi", field, s.alpha_hi);
    s.c3_lo = get_number(j, "c3_lo", field, s.c3_lo);
    s.c3_hi = get_number(j, "c3_hi", field, s.c3_hi);
    s.horizon = get_count(j, "horizon", field, s.horizon);
    s.sumZ_T = get_count(j, "T", field, s.sumZ_T);
    s.lifted_terms = get_count(j, "lifted_terms", field, s.lifted_terms);
    s.converse = get_bool(j, "converse", field, s.converse);
    if (!(s.alpha_lo > 1.0) || s.alpha_hi < s.alpha_lo) {
        throw ConfigError(join(field, "alpha_lo"), "need 1 < alpha_lo <= alpha_hi");
    }
    if (!(s.c3_lo > 0.0) || s.c3_hi < s.c3_lo || !(s.c3_hi < 1.0)) {
        throw ConfigError(join(field, "c3_lo"), "need 0 < c3_lo <= c3_hi < 1");
    }
    if (s.horizon < 8) {
        throw ConfigError(join(field, "horizon"), "must be at least 8");
    }
    if (s.sumZ_T >= s.horizon) {
        throw ConfigError(join(field, "T"), "must be below horizon");
    }
    return s;
}

ScenarioConfig parse_scenario(const json& j, const std::string& field, const std::filesystem::path& base_dir,
                              std::optional<ScenarioKind> expected, std::size_t index) {
    object_at(j, field);
    reject_unknown(j,
                   {"kind", "name", "d", "N", "r", "weight", "kernel", "forcing", "x0", "horizons", "tolerances",
                    "arch", "weights", "random_suite"},
                   field);
    ScenarioConfig c;
    if (j.contains("kind")) {
        c.kind = parse_kind(get_string(j, "kind", field, std::nullopt), join(field, "kind"));
        if (expected && *expected != c.kind) {
            throw ConfigError(join(field, "kind"), "scenario is '" + std::string(to_string(c.kind)) +
                                                       "' but the subcommand is '" +
                                                       std::string(to_string(*expected)) + "'");
        }
    } else if (expected) {
        c.kind = *expected;
    } else {
        throw ConfigError(join(field, "kind"), "missing");
    }
    c.name = get_string(j, "name", field, std::string(to_string(c.kind)) + (index ? std::to_string(index) : ""));
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos || c.name == "." || c.name == "..") {
        throw ConfigError(join(field, "name"), "must be a plain file name");
    }
    c.d = get_count(j, "d", field, 1);
    c.N = get_count(j, "N", field, 1);
    c.r = get_number(j, "r", field, 1.0);
    if (c.d == 0) {
        throw ConfigError(join(field, "d"), "must be positive");
    }
    if (c.N == 0) {
        throw ConfigError(join(field, "N"), "must be positive");
    }
    if (!(c.r > 0.0)) {
        throw ConfigError(join(field, "r"), "must be positive");
    }
    if (j.contains("weight")) {
        c.weight = parse_weight(j["weight"], join(field, "weight"));
        if (std::abs(c.weight->rate() - c.r) > 1e-12 * c.r) {
            throw ConfigError(join(field, "weight.r"), "weight rate " + std::to_string(c.weight->rate()) +
                                                           " differs from r = " + std::to_string(c.r));
        }
    }
    if (j.contains("horizons")) {
        const std::string hf = join(field, "horizons");
        const json& h = object_at(j["horizons"], hf);
        reject_unknown(h, {"n_max", "u_max", "window", "horizon", "T", "lifted_terms"}, hf);
        c.n_max = get_count(h, "n_max", hf, c.n_max);
        c.u_max = get_count(h, "u_max", hf, c.u_max);
        c.window = get_count(h, "window", hf, c.window);
        c.horizon = get_count(h, "horizon", hf, c.horizon);
        c.sumZ_T = get_count(h, "T", hf, c.sumZ_T);
        c.lifted_terms = get_count(h, "lifted_terms", hf, c.lifted_terms);
    }
    if (j.contains("tolerances")) {
        const std::string tf = join(field, "tolerances");
        const json& t = object_at(j["tolerances"], tf);
        reject_unknown(t, {"tail"}, tf);
        c.tail_tol = get_number(t, "tail", tf, c.tail_tol);
        if (!(c.tail_tol > 0.0 && c.tail_tol < 1.0)) {
            throw ConfigError(join(tf, "tail"), "must lie in (0, 1)");
        }
    }

    const bool needs_kernel =
        c.kind == ScenarioKind::resolvent || c.kind == ScenarioKind::solve || c.kind == ScenarioKind::verify;
    if (needs_kernel) {
        if (!c.weight) {
            throw ConfigError(join(field, "weight"), "missing");
        }
        if (!j.contains("kernel")) {
            if (!(c.kind == ScenarioKind::verify && j.contains("random_suite"))) {
                throw ConfigError(join(field, "kernel"), "missing");
            }
        } else {
            c.kernel = parse_sequence(j["kernel"], join(field, "kernel"), c.d, c.d, base_dir);
            if (c.kernel.limits && c.kernel.limits->size() != c.N) {
                throw ConfigError(join(field, "kernel.limits"), "expected N = " + std::to_string(c.N) + " matrices");
            }
        }
        if (c.n_max < 4 * c.N) {
            throw ConfigError(join(field, "horizons.n_max"), "must be at least 4 N");
        }
        const std::size_t strided = (c.n_max + 1) / c.N;
        if (c.window == 0) {
            c.window = std::max<std::size_t>(2, strided / 2);
        }
        if (c.window < 2 || c.window >= strided) {
            throw ConfigError(join(field, "horizons.window"), "must lie in [2, n_max / N)");
        }
        if (c.sumZ_T == 0) {
            c.sumZ_T = strided > 1 ? strided - 2 : 0;
        }
        if (c.N * c.sumZ_T + c.N - 1 > c.n_max) {
            throw ConfigError(join(field, "horizons.T"), "N T + N - 1 exceeds n_max");
        }
    }
    if (c.kind == ScenarioKind::solve) {
        c.x0 = j.contains("x0") ? parse_matrix(j["x0"], join(field, "x0"), c.d, 0)
                                : Matrix(Matrix::Ones(static_cast<Eigen::Index>(c.d), 1));
        const auto cols = static_cast<std::size_t>(c.x0.cols());
        if (j.contains("forcing")) {
            c.forcing = parse_sequence(j["forcing"], join(field, "forcing"), c.d, cols, base_dir);
            if (c.forcing.limits && c.forcing.limits->size() != c.N) {
                throw ConfigError(join(field, "forcing.limits"), "expected N = " + std::to_string(c.N) + " matrices");
            }
        } else {
            c.forcing.series = std::make_shared<TableSeries>(MatSeq(c.d, cols, 1), true);
        }
    }
    if (c.kind == ScenarioKind::verify && j.contains("random_suite")) {
        c.random_suite = parse_suite(j["random_suite"], join(field, "random_suite"));
    }
    if (c.kind == ScenarioKind::arch) {
        if (!j.contains("arch")) {
            throw ConfigError(join(field, "arch"), "missing");
        }
        c.arch = parse_arch(j["arch"], join(field, "arch"));
        if (!j.contains("horizons") || !j["horizons"].contains("n_max")) {
            c.n_max = 10000;
        }
        if (c.u_max < 4) {
            throw ConfigError(join(field, "horizons.u_max"), "must be at least 4");
        }
        if (c.n_max < 2 * c.u_max + 2) {
            throw ConfigError(join(field, "horizons.n_max"), "must be at least 2 u_max + 2");
        }
    }
    if (c.kind == ScenarioKind::weights) {
        const std::string wf = join(field, "weights");
        if (!j.contains("weights") || !j["weights"].is_array() || j["weights"].empty()) {
            throw ConfigError(wf, "expected a nonempty list of weights");
        }
        for (std::size_t i = 0; i < j["weights"].size(); ++i) {
            const json& w = j["weights"][i];
            const std::string f = at_index(wf, i);
            c.weights.emplace_back(get_string(object_at(w, f), "name", f, "w" + std::to_string(i)),
                                   parse_weight(w, f));
        }
        if (c.horizon < 256) {
            throw ConfigError(join(field, "horizons.horizon"), "must be at least 256");
        }
    }
    return c;
}

} // namespace

std::string_view to_string(ScenarioKind k) noexcept {
    switch (k) {
    case ScenarioKind::resolvent:
        return "resolvent";
    case ScenarioKind::solve:
        return "solve";
    case ScenarioKind::verify:
        return "verify";
    case ScenarioKind::arch:
        return "arch";
    case ScenarioKind::weights:
        return "weights";
    }
    return "unknown";
}

ScenarioKind parse_kind(const std::string& s, const std::string& field) {
    for (ScenarioKind k : {ScenarioKind::resolvent, ScenarioKind::solve, ScenarioKind::verify, ScenarioKind::arch,
                           ScenarioKind::weights}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ConfigError(field, "unknown scenario kind '" + s + "'");
}

std::vector<ScenarioConfig> parse_config(const std::string& text, const std::filesystem::path& base_dir,
                                         std::optional<ScenarioKind> expected) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    std::vector<ScenarioConfig> out;
    if (doc.is_object() && doc.contains("scenarios")) {
        if (doc.size() != 1) {
            throw ConfigError("config", "a scenario list document holds only 'scenarios'");
        }
        const json& list = doc["scenarios"];
        if (!list.is_array() || list.empty()) {
            throw ConfigError("scenarios", "expected a nonempty list");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            out.push_back(parse_scenario(list[i], at_index("scenarios", i), base_dir, expected, i + 1));
        }
    } else {
        out.push_back(parse_scenario(doc, "", base_dir, expected, 0));
    }
    std::set<std::string> names;
    for (const auto& c : out) {
        if (!names.insert(c.name).second) {
            throw ConfigError("name", "duplicate scenario name '" + c.name + "'");
        }
    }
    return out;
}

std::vector<ScenarioConfig> load_config(const std::filesystem::path& path, std::optional<ScenarioKind> expected) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("--config", "cannot read '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path(), expected);
}

} // namespace pervolt::cli
