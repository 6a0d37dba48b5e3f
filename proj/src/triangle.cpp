#include "dgr/triangle.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string_view>

namespace dgr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what)
{
    throw TriangleError("line " + std::to_string(line_no) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line_no)
{
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        fail(line_no, "non-numeric value '" + std::string(field) + "'");
    }
    return value;
}

int parse_index(std::string_view field, std::size_t line_no, const char* what)
{
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        fail(line_no, std::string("invalid ") + what + " '" + std::string(field) + "'");
    }
    return value;
}

struct RawCell {
    int accident;
    int lag;
    double value;
    std::size_t line;
};

Triangle assemble(const std::vector<RawCell>& cells, TriangleKind kind, const std::map<int, double>& exposure_map,
                  int min_lags = 0)
{
    if (cells.empty()) {
        throw TriangleError("no data rows");
    }
    int accident_years = 0;
    int lags = min_lags;
    for (const auto& c : cells) {
        accident_years = std::max(accident_years, c.accident);
        lags = std::max(lags, c.lag + 1);
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(accident_years, lags, kNaN);
    for (const auto& c : cells) {
        if (c.accident < 1) {
            fail(c.line, "accident year must be >= 1");
        }
        if (c.lag < 0) {
            fail(c.line, "lag must be >= 0");
        }
        if (c.accident + c.lag > accident_years) {
            fail(c.line, "future cell (" + std::to_string(c.accident) + "," + std::to_string(c.lag) +
                             ") beyond the valuation diagonal");
        }
        auto& slot = m(c.accident - 1, c.lag);
        if (!std::isnan(slot)) {
            fail(c.line, "duplicate cell (" + std::to_string(c.accident) + "," + std::to_string(c.lag) + ")");
        }
        slot = c.value;
    }
    for (int r = 0; r < accident_years; ++r) {
        for (int j = 0; j < lags && r + j <= accident_years - 1; ++j) {
            if (std::isnan(m(r, j))) {
                throw TriangleError("missing observed cell (" + std::to_string(r + 1) + "," + std::to_string(j) + ")");
            }
        }
    }
    std::optional<Eigen::VectorXd> exposures;
    if (!exposure_map.empty()) {
        Eigen::VectorXd e(accident_years);
        for (int r = 0; r < accident_years; ++r) {
            const auto it = exposure_map.find(r + 1);
            if (it == exposure_map.end()) {
                throw TriangleError("missing exposure for accident year " + std::to_string(r + 1));
            }
            e[r] = it->second;
        }
        exposures = e;
    }
    return Triangle(m, kind, exposures);
}

Triangle load_long(std::istream& in, TriangleKind kind)
{
    std::string line;
    std::size_t line_no = 0;
    bool has_exposure = false;
    bool header_seen = false;
    std::vector<RawCell> cells;
    std::map<int, double> exposures;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() < 3 || fields[0] != "accident" || fields[1] != "lag" || fields[2] != "value" ||
                fields.size() > 4 || (fields.size() == 4 && fields[3] != "exposure")) {
                fail(line_no, "expected header 'accident,lag,value[,exposure]'");
            }
            has_exposure = fields.size() == 4;
            continue;
        }
        const std::size_t expected = has_exposure ? 4 : 3;
        if (fields.size() != expected && !(has_exposure && fields.size() == 3)) {
            fail(line_no, "expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
        }
        RawCell c{parse_index(fields[0], line_no, "accident"), parse_index(fields[1], line_no, "lag"),
                  parse_number(fields[2], line_no), line_no};
        cells.push_back(c);
        if (has_exposure && fields.size() == 4 && !fields[3].empty()) {
            const double e = parse_number(fields[3], line_no);
            const auto [it, inserted] = exposures.emplace(c.accident, e);
            if (!inserted && it->second != e) {
                fail(line_no, "conflicting exposure for accident year " + std::to_string(c.accident));
            }
        }
    }
    if (!header_seen) {
        throw TriangleError("empty input");
    }
    return assemble(cells, kind, exposures);
}

Triangle load_wide(std::istream& in, TriangleKind kind)
{
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    std::vector<RawCell> cells;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (columns == 0) {
            if (fields.size() < 2 || fields[0] != "accident") {
                fail(line_no, "expected header 'accident,lag0,...'");
            }
            for (std::size_t k = 1; k < fields.size(); ++k) {
                if (fields[k] != "lag" + std::to_string(k - 1)) {
                    fail(line_no, "header column " + std::to_string(k) + " should be 'lag" + std::to_string(k - 1) + "'");
                }
            }
            columns = fields.size();
            continue;
        }
        if (fields.size() > columns) {
            fail(line_no, "ragged row: " + std::to_string(fields.size()) + " fields for " + std::to_string(columns) +
                              " header columns");
        }
        const int accident = parse_index(fields[0], line_no, "accident");
        bool future = false;
        for (std::size_t k = 1; k < fields.size(); ++k) {
            if (fields[k].empty()) {
                future = true;
                continue;
            }
            if (future) {
                fail(line_no, "ragged row: value after an empty (future) cell");
            }
            cells.push_back({accident, static_cast<int>(k - 1), parse_number(fields[k], line_no), line_no});
        }
    }
    if (columns == 0) {
        throw TriangleError("empty input");
    }
    // The lag count comes from the header, not from the populated cells.
    return assemble(cells, kind, {}, static_cast<int>(columns) - 1);
}

} // namespace

Triangle::Triangle(const Eigen::MatrixXd& incremental, TriangleKind kind, std::optional<Eigen::VectorXd> exposures)
    : values_(incremental), kind_(kind), exposures_(std::move(exposures))
{
    const auto I = values_.rows();
    const auto J = values_.cols();
    if (I < 1 || J < 1) {
        throw TriangleError("triangle needs at least one accident year and one lag");
    }
    for (Eigen::Index r = 0; r < I; ++r) {
        for (Eigen::Index j = 0; j < J; ++j) {
            if (r + j > I - 1) {
                values_(r, j) = kNaN;
                continue;
            }
            const double v = values_(r, j);
            if (!std::isfinite(v)) {
                throw TriangleError("observed cell (" + std::to_string(r + 1) + "," + std::to_string(j) + ") is not finite");
            }
            if (kind_ == TriangleKind::counts && (v < 0.0 || std::floor(v) != v)) {
                throw TriangleError("count cell (" + std::to_string(r + 1) + "," + std::to_string(j) +
                                    ") must be a non-negative integer");
            }
        }
    }
    if (exposures_) {
        if (exposures_->size() != I) {
            throw TriangleError("exposure vector length does not match accident years");
        }
        if (!exposures_->allFinite()) {
            throw TriangleError("exposures must be finite");
        }
    }
}

double Triangle::operator()(int row, int lag) const
{
    if (!observed(row, lag)) {
        throw std::out_of_range("cell (" + std::to_string(row + 1) + "," + std::to_string(lag) + ") is not observed");
    }
    return values_(row, lag);
}

Eigen::VectorXd Triangle::row_values(int row) const
{
    if (row < 0 || row >= accident_years()) {
        throw std::out_of_range("row out of range");
    }
    return values_.row(row).head(last_lag(row) + 1).transpose();
}

Triangle Triangle::with_exposures(const Eigen::VectorXd& exposures) const
{
    return Triangle(values_, kind_, exposures);
}

int Triangle::observed_cell_count() const noexcept
{
    int n = 0;
    for (int r = 0; r < accident_years(); ++r) {
        n += last_lag(r) + 1;
    }
    return n;
}

bool operator==(const Triangle& a, const Triangle& b)
{
    if (a.kind_ != b.kind_ || a.values_.rows() != b.values_.rows() || a.values_.cols() != b.values_.cols()) {
        return false;
    }
    for (int r = 0; r < a.accident_years(); ++r) {
        for (int j = 0; j <= a.last_lag(r); ++j) {
            if (a.values_(r, j) != b.values_(r, j)) {
                return false;
            }
        }
    }
    if (a.exposures_.has_value() != b.exposures_.has_value()) {
        return false;
    }
    return !a.exposures_ || *a.exposures_ == *b.exposures_;
}

Triangle load_triangle(std::istream& in, CsvLayout layout, TriangleKind kind)
{
    return layout == CsvLayout::long_format ? load_long(in, kind) : load_wide(in, kind);
}

Triangle load_triangle(const std::filesystem::path& path, CsvLayout layout, TriangleKind kind)
{
    std::ifstream in(path);
    if (!in) {
        throw TriangleError("cannot open " + path.string());
    }
    return load_triangle(in, layout, kind);
}

Eigen::VectorXd load_exposures(std::istream& in, int accident_years)
{
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::map<int, double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "accident" || fields[1] != "exposure") {
                fail(line_no, "expected header 'accident,exposure'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) {
            fail(line_no, "expected 2 fields");
        }
        const int a = parse_index(fields[0], line_no, "accident");
        if (!values.emplace(a, parse_number(fields[1], line_no)).second) {
            fail(line_no, "duplicate exposure for accident year " + std::to_string(a));
        }
    }
    Eigen::VectorXd e(accident_years);
    for (int r = 0; r < accident_years; ++r) {
        const auto it = values.find(r + 1);
        if (it == values.end()) {
            throw TriangleError("missing exposure for accident year " + std::to_string(r + 1));
        }
        e[r] = it->second;
    }
    return e;
}

Eigen::VectorXd load_exposures(const std::filesystem::path& path, int accident_years)
{
    std::ifstream in(path);
    if (!in) {
        throw TriangleError("cannot open " + path.string());
    }
    return load_exposures(in, accident_years);
}

Triangle cumulate(const Triangle& t)
{
    Eigen::MatrixXd m = t.dense();
    for (int r = 0; r < t.accident_years(); ++r) {
        for (int j = 1; j <= t.last_lag(r); ++j) {
            m(r, j) += m(r, j - 1);
        }
    }
    return Triangle(m, t.kind(), t.exposures());
}

Triangle decumulate(const Triangle& t)
{
    Eigen::MatrixXd m = t.dense();
    for (int r = 0; r < t.accident_years(); ++r) {
        for (int j = t.last_lag(r); j >= 1; --j) {
            m(r, j) -= t.dense()(r, j - 1);
        }
    }
    if (t.kind() == TriangleKind::counts) {
        for (int r = 0; r < t.accident_years(); ++r) {
            for (int j = 1; j <= t.last_lag(r); ++j) {
                if (m(r, j) < 0.0) {
                    throw TriangleError("cumulative counts decrease at (" + std::to_string(r + 1) + "," +
                                        std::to_string(j) + ")");
                }
            }
        }
    }
    return Triangle(m, t.kind(), t.exposures());
}

std::vector<CellIndex> negative_cells(const Triangle& t)
{
    std::vector<CellIndex> out;
    for (int r = 0; r < t.accident_years(); ++r) {
        for (int j = 0; j <= t.last_lag(r); ++j) {
            if (t(r, j) < 0.0) {
                out.push_back({r, j});
            }
        }
    }
    return out;
}

DiagonalSummary latest_diagonal(const Triangle& t)
{
    DiagonalSummary d;
    d.observed.resize(t.accident_years());
    d.dev_lag.resize(t.accident_years());
    for (int r = 0; r < t.accident_years(); ++r) {
        d.observed[r] = t.row_values(r).sum();
        d.dev_lag[r] = t.last_lag(r);
    }
    return d;
}

} // namespace dgr
