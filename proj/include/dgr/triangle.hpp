#pragma once

#include <algorithm>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dgr {

enum class TriangleKind { amounts, counts };

/// Raised for malformed triangle input. The message names the offending line.
class TriangleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CellIndex {
    int row; ///< 0-based accident-year row (accident year = row + 1)
    int lag; ///< 0-based development lag
    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Run-off triangle of incremental values.
///
/// Rows are accident years 1..I stored 0-based; columns are development lags
/// 0..J-1. Cell (r, j) is observed iff r + j <= I - 1. Future cells are not
/// stored: the dense backing matrix holds NaN there and every accessor refuses
/// to read them. Immutable after construction.
class Triangle {
public:
    /// Takes an I x J matrix; entries in future positions are ignored and
    /// replaced by NaN. Observed entries must be finite.
    explicit Triangle(const Eigen::MatrixXd& incremental, TriangleKind kind = TriangleKind::amounts,
                      std::optional<Eigen::VectorXd> exposures = std::nullopt);

    [[nodiscard]] int accident_years() const noexcept { return static_cast<int>(values_.rows()); }
    [[nodiscard]] int lags() const noexcept { return static_cast<int>(values_.cols()); }
    [[nodiscard]] TriangleKind kind() const noexcept { return kind_; }

    [[nodiscard]] bool observed(int row, int lag) const noexcept
    {
        return row >= 0 && lag >= 0 && row < accident_years() && lag < lags() && row + lag <= accident_years() - 1;
    }

    /// Last observed lag of a row, I-1-row capped at J-1.
    [[nodiscard]] int last_lag(int row) const noexcept { return std::min(accident_years() - 1 - row, lags() - 1); }

    /// Observed cell value; throws std::out_of_range for future cells.
    [[nodiscard]] double operator()(int row, int lag) const;

    /// Observed prefix of a row (length last_lag(row) + 1).
    [[nodiscard]] Eigen::VectorXd row_values(int row) const;

    /// Dense I x J view with NaN in future cells.
    [[nodiscard]] const Eigen::MatrixXd& dense() const noexcept { return values_; }

    [[nodiscard]] const std::optional<Eigen::VectorXd>& exposures() const noexcept { return exposures_; }
    [[nodiscard]] Triangle with_exposures(const Eigen::VectorXd& exposures) const;

    [[nodiscard]] int observed_cell_count() const noexcept;

    friend bool operator==(const Triangle& a, const Triangle& b);

private:
    Eigen::MatrixXd values_;
    TriangleKind kind_;
    std::optional<Eigen::VectorXd> exposures_;
};

/// Per-row observed totals X_obs_i and their development lag I - i.
struct DiagonalSummary {
    Eigen::VectorXd observed;
    Eigen::VectorXi dev_lag;
};

enum class CsvLayout { long_format, wide };

/// Parses a triangle from CSV text.
///
/// Long layout: header `accident,lag,value[,exposure]`.
/// Wide layout: header `accident,lag0,...,lag{J-1}`; an empty field or a
/// missing trailing field is a future cell, an explicit 0 is data.
Triangle load_triangle(std::istream& in, CsvLayout layout, TriangleKind kind = TriangleKind::amounts);
Triangle load_triangle(const std::filesystem::path& path, CsvLayout layout, TriangleKind kind = TriangleKind::amounts);

/// Sidecar exposure file with header `accident,exposure`.
Eigen::VectorXd load_exposures(std::istream& in, int accident_years);
Eigen::VectorXd load_exposures(const std::filesystem::path& path, int accident_years);

/// Incremental -> cumulative along each row.
Triangle cumulate(const Triangle& t);

/// Cumulative -> incremental. Decreases in an amounts triangle become negative
/// increments (see negative_cells); a decreasing counts triangle throws.
Triangle decumulate(const Triangle& t);

/// Observed cells holding a negative value.
std::vector<CellIndex> negative_cells(const Triangle& t);

DiagonalSummary latest_diagonal(const Triangle& t);

} // namespace dgr
