#include "pegrisk/pegmodel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "pegrisk/csv.hpp"
#include "pegrisk/error.hpp"

namespace pegrisk {

namespace {

[[noreturn]] void domain_error(const std::string& what) { throw Error(ErrorKind::Domain, what); }

void check_probability_inputs(double rho, int horizon_days, double recovery, bool recovery_may_be_one) {
    if (!(rho >= 0.0 && rho < 1.0)) domain_error("rho must lie in [0, 1), got " + csv::format_double(rho));
    if (horizon_days < 1) domain_error("horizon must be at least 1 day, got " + std::to_string(horizon_days));
    const bool recovery_ok = recovery_may_be_one ? (recovery >= 0.0 && recovery <= 1.0)
                                                 : (recovery >= 0.0 && recovery < 1.0);
    if (!recovery_ok) domain_error("recovery out of range, got " + csv::format_double(recovery));
}

Ar1Fit fit_slice(std::span<const double> d, FitWindow window) {
    const std::size_t n = d.size();
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        sxx += d[t] * d[t];
        sxy += d[t] * d[t + 1];
    }
    if (sxx == 0.0) {
        throw Error(ErrorKind::DegenerateRegressor,
                    "AR(1) fit: lagged deviations are all zero in window [" + std::to_string(window.begin) + ", " +
                        std::to_string(window.end) + ")");
    }

    Ar1Fit fit;
    fit.rho = sxy / sxx;
    fit.n = n;
    fit.window = window;
    fit.residuals.reserve(n - 1);
    double ssr = 0.0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        const double e = d[t + 1] - fit.rho * d[t];
        fit.residuals.push_back(e);
        ssr += e * e;
    }
    // n - 1 regression pairs, one parameter.
    const double sigma2 = ssr / static_cast<double>(n - 2);
    fit.std_error = std::sqrt(sigma2 / sxx);
    return fit;
}

}  // namespace

double Ar1Fit::innovation_sd() const {
    if (residuals.size() < 2) return 0.0;
    double ssr = 0.0;
    for (double e : residuals) ssr += e * e;
    return std::sqrt(ssr / static_cast<double>(residuals.size() - 1));
}

Ar1Fit fit_ar1(std::span<const double> deviations) {
    if (deviations.size() < 3) {
        throw Error(ErrorKind::InsufficientData,
                    "AR(1) fit needs at least 3 observations, got " + std::to_string(deviations.size()));
    }
    return fit_slice(deviations, FitWindow{0, deviations.size(), true});
}

RollingAr1 fit_ar1_rolling(std::span<const double> deviations, std::size_t window) {
    if (window < 3) throw Error(ErrorKind::Window, "rolling window must be at least 3, got " + std::to_string(window));
    if (window > deviations.size()) {
        throw Error(ErrorKind::Window, "rolling window " + std::to_string(window) + " exceeds series length " +
                                           std::to_string(deviations.size()));
    }
    RollingAr1 out;
    out.window = window;
    out.fits.reserve(deviations.size() - window + 1);
    double sum = 0.0;
    for (std::size_t start = 0; start + window <= deviations.size(); ++start) {
        out.fits.push_back(fit_slice(deviations.subspan(start, window), FitWindow{start, start + window, false}));
        sum += out.fits.back().rho;
    }
    out.mean_rho = sum / static_cast<double>(out.fits.size());
    return out;
}

double half_life(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) domain_error("half-life needs 0 < rho < 1, got " + csv::format_double(rho));
    return std::numbers::ln2 / -std::log(rho);
}

std::string_view to_string(Annualization method) noexcept {
    return method == Annualization::Linear ? "linear" : "compounded";
}

Annualization parse_annualization(std::string_view text) {
    if (text == "linear") return Annualization::Linear;
    if (text == "compounded") return Annualization::Compounded;
    throw Error(ErrorKind::Config, "unknown annualization method '" + std::string(text) + "'");
}

void PegParams::validate() const { check_probability_inputs(rho, horizon_days, recovery, false); }

double theoretical_futures(double delta, double rho, int horizon_days, double p_default, double recovery) {
    check_probability_inputs(rho, horizon_days, recovery, true);
    if (!(p_default >= 0.0 && p_default <= 1.0)) {
        domain_error("default probability must lie in [0, 1], got " + csv::format_double(p_default));
    }
    const double survivor_mean = 1.0 + std::pow(rho, horizon_days) * delta;
    return (1.0 - p_default) * survivor_mean + p_default * recovery;
}

double implied_default_prob(double spot, double futures, double rho, int horizon_days, double recovery) {
    check_probability_inputs(rho, horizon_days, recovery, false);
    const double survivor_mean = 1.0 + std::pow(rho, horizon_days) * (spot - 1.0);
    const double denom = survivor_mean - recovery;
    if (!(denom > 0.0)) {
        throw Error(ErrorKind::Inversion, "non-positive denominator 1 + rho^h (s - 1) - R = " +
                                              csv::format_double(denom) + " for s = " + csv::format_double(spot));
    }
    return (survivor_mean - futures) / denom;
}

double annualize(double p_horizon, int horizon_days, Annualization method) {
    if (horizon_days < 1) domain_error("horizon must be at least 1 day, got " + std::to_string(horizon_days));
    if (!(p_horizon >= -1.0 && p_horizon <= 1.0)) {
        domain_error("horizon probability out of range: " + csv::format_double(p_horizon));
    }
    const double periods = 365.0 / horizon_days;
    if (method == Annualization::Linear) return p_horizon * periods * 1e4;
    return -std::expm1(periods * std::log1p(-p_horizon)) * 1e4;
}

ProbSeries prob_series(const AlignedSeries& aligned, const PegParams& params, bool trim) {
    params.validate();
    ProbSeries out;
    out.points.reserve(aligned.observations.size());
    for (const auto& obs : aligned.observations) {
        DefaultProbPoint pt;
        pt.date = obs.date;
        pt.horizon_days = params.horizon_days;
        pt.recovery = params.recovery;
        try {
            pt.raw_p_horizon =
                implied_default_prob(obs.s, obs.f, params.rho, params.horizon_days, params.recovery);
            pt.raw_annualized_bps = annualize(pt.raw_p_horizon, params.horizon_days, params.annualization);
        } catch (const Error& e) {
            throw Error(e.kind(), obs.date.iso() + ": " + e.what());
        }
        pt.trimmed = trim && pt.raw_p_horizon < 0.0;
        pt.p_horizon = pt.trimmed ? 0.0 : pt.raw_p_horizon;
        pt.p_annualized_bps = pt.trimmed ? annualize(0.0, params.horizon_days, params.annualization)
                                         : pt.raw_annualized_bps;
        if (pt.raw_p_horizon < ProbSeries::kDiagnosticFloor) out.quality_warnings.push_back(obs.date);
        out.points.push_back(pt);
    }
    return out;
}

void write_prob_series(std::ostream& out, const ProbSeries& series) {
    out << "date,p_horizon,p_annualized_bps,trimmed\n";
    for (const auto& p : series.points) {
        out << p.date.iso() << ',' << csv::format_double(p.p_horizon) << ','
            << csv::format_double(p.p_annualized_bps) << ',' << (p.trimmed ? 1 : 0) << '\n';
    }
}

}  // namespace pegrisk
