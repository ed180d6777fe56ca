#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pegrisk/date.hpp"
#include "pegrisk/marketdata.hpp"

namespace pegrisk {

// ---------------------------------------------------------------------------
// AR(1) peg dynamics:  delta[t+1] = rho * delta[t] + eps[t+1]
// ---------------------------------------------------------------------------

/// Half-open index range [begin, end) of the deviation series used by a fit.
struct FitWindow {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool full_sample = true;
};

struct Ar1Fit {
    double rho = 0.0;
    double std_error = 0.0;
    std::vector<double> residuals;  // eps_hat[t+1] = delta[t+1] - rho * delta[t], length n - 1
    std::size_t n = 0;
    FitWindow window;

    /// Mean-reverting and non-explosive: 0 < rho < 1.
    [[nodiscard]] bool stable() const { return rho > 0.0 && rho < 1.0; }
    /// Standard deviation of the fitted innovations (n - 2 degrees of freedom).
    [[nodiscard]] double innovation_sd() const;
};

struct RollingAr1 {
    std::vector<Ar1Fit> fits;  // one per window, daily step
    double mean_rho = 0.0;
    std::size_t window = 0;
};

/// Least squares through the origin over the whole series. Needs >= 3 points;
/// throws Error(DegenerateRegressor) when every lagged deviation is zero.
Ar1Fit fit_ar1(std::span<const double> deviations);

/// One fit per length-`window` slice, stepping one day at a time.
/// Throws Error(Window) when window < 3 or window > series length.
RollingAr1 fit_ar1_rolling(std::span<const double> deviations, std::size_t window);

/// Days for a deviation to halve absent shocks: ln 2 / -ln rho. Requires 0 < rho < 1.
double half_life(double rho);

// ---------------------------------------------------------------------------
// Jump-to-default pricing under the expectations hypothesis
// ---------------------------------------------------------------------------

enum class Annualization { Linear, Compounded };

std::string_view to_string(Annualization method) noexcept;
Annualization parse_annualization(std::string_view text);

/// Model parameters shared by pricing, inversion and the probability series.
struct PegParams {
    double rho = 0.73;
    int horizon_days = 90;
    double recovery = 0.0;
    Annualization annualization = Annualization::Linear;

    /// Throws Error(Domain) unless rho in [0,1), horizon >= 1, recovery in [0,1).
    void validate() const;
};

/// Expected terminal spot: (1 - p)(1 + rho^h delta) + p * recovery.
double theoretical_futures(double delta, double rho, int horizon_days, double p_default, double recovery);

/// Default probability over the horizon implied by a spot/futures pair:
/// (1 + rho^h (s - 1) - f) / (1 + rho^h (s - 1) - recovery).
/// Throws Error(Inversion) when the denominator is not positive.
double implied_default_prob(double spot, double futures, double rho, int horizon_days, double recovery);

/// Rescales a horizon probability to a 365-day basis, in basis points.
/// Linear: p * 365/h * 1e4. Compounded: (1 - (1 - p)^(365/h)) * 1e4.
/// Negative inputs (untrimmed noise) are accepted so raw statistics stay signed.
double annualize(double p_horizon, int horizon_days, Annualization method = Annualization::Linear);

struct DefaultProbPoint {
    Date date;
    double p_horizon = 0.0;         // emitted value (clamped to >= 0 when trimming)
    double p_annualized_bps = 0.0;  // annualize(p_horizon)
    double raw_p_horizon = 0.0;     // before trimming
    double raw_annualized_bps = 0.0;
    int horizon_days = 90;
    double recovery = 0.0;
    bool trimmed = false;
};

struct ProbSeries {
    std::vector<DefaultProbPoint> points;
    /// Dates whose raw horizon probability fell below the diagnostic floor.
    std::vector<Date> quality_warnings;

    static constexpr double kDiagnosticFloor = -0.05;
};

/// Pointwise inversion and annualization. Inversion errors are re-thrown
/// with the offending date in the message.
ProbSeries prob_series(const AlignedSeries& aligned, const PegParams& params, bool trim);

/// Columns date,p_horizon,p_annualized_bps,trimmed.
void write_prob_series(std::ostream& out, const ProbSeries& series);

}  // namespace pegrisk
