#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pegrisk/features.hpp"

namespace pegrisk {

/// count, mean, sample std (n - 1), min, quartiles, max.
struct SummaryRow {
    std::string name;
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

/// Quantile by linear interpolation between order statistics (position q * (n - 1)).
/// `sorted` must be ascending and non-empty.
double interpolated_quantile(std::span<const double> sorted, double q);

/// Throws Error(InsufficientData) on an empty series.
SummaryRow summary_stats(std::string name, std::span<const double> values);

enum class Significance { None, Ten, Five, One };

/// "***", "**", "*" or "".
std::string_view stars(Significance s) noexcept;

/// Two-sided normal critical values: 2.576 / 1.960 / 1.645.
Significance significance_of(double t_stat) noexcept;

/// Dense row-major design matrix with named columns.
class DesignMatrix {
public:
    DesignMatrix(std::size_t rows, std::vector<std::string> column_names);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return names_.size(); }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

private:
    std::size_t rows_;
    std::vector<std::string> names_;
    std::vector<double> data_;
};

struct RegressionResult {
    std::vector<std::string> names;
    std::vector<double> coefficient;
    std::vector<double> hc0_stderr;
    std::vector<double> t_stat;  // NaN where the stderr is zero
    std::vector<Significance> significance;
    std::vector<double> residuals;
    double r_squared = 0.0;  // centered
    std::size_t n = 0;

    /// Index of a named term; throws Error(Domain) if absent.
    [[nodiscard]] std::size_t index_of(std::string_view term) const;
};

/// OLS with White (HC0) robust standard errors. X carries its own intercept
/// column if one is wanted. Solved through a column-pivoted QR.
/// Throws Error(InsufficientData) when n <= k and Error(SingularDesign) on rank deficiency.
RegressionResult ols_hc0(std::span<const double> y, const DesignMatrix& x);

inline constexpr std::string_view kIntercept = "intercept";

/// Four specifications: P on sigma_btc (I), on sigma_usdt (II), on r_btc (III),
/// and on all three (IV). III and IV use only rows with a defined return.
std::array<RegressionResult, 4> run_table4(const FeaturePanel& panel);

/// Rows for s, f, f - s (bps) and untrimmed annualized P (bps).
std::vector<SummaryRow> table3_rows(const AlignedSeries& aligned, const ProbSeries& prob);

void write_table3_text(std::ostream& out, std::span<const SummaryRow> rows);
void write_table3_csv(std::ostream& out, std::span<const SummaryRow> rows);
void write_table4_text(std::ostream& out, const std::array<RegressionResult, 4>& columns);
void write_table4_csv(std::ostream& out, const std::array<RegressionResult, 4>& columns);

}  // namespace pegrisk
