#include "pegrisk/econometrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "pegrisk/csv.hpp"
#include "pegrisk/error.hpp"

namespace pegrisk {

double interpolated_quantile(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SummaryRow summary_stats(std::string name, std::span<const double> values) {
    if (values.empty()) throw Error(ErrorKind::InsufficientData, "summary of '" + name + "': empty series");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    // Summing in sorted order makes the result independent of input order.
    const double n = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);

    SummaryRow row;
    row.name = std::move(name);
    row.count = sorted.size();
    row.mean = mean;
    row.std = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    row.min = sorted.front();
    row.q25 = interpolated_quantile(sorted, 0.25);
    row.q50 = interpolated_quantile(sorted, 0.50);
    row.q75 = interpolated_quantile(sorted, 0.75);
    row.max = sorted.back();
    return row;
}

std::string_view stars(Significance s) noexcept {
    switch (s) {
        case Significance::One: return "***";
        case Significance::Five: return "**";
        case Significance::Ten: return "*";
        case Significance::None: break;
    }
    return "";
}

Significance significance_of(double t_stat) noexcept {
    const double a = std::abs(t_stat);
    if (!(a >= 1.645)) return Significance::None;  // also catches NaN
    if (a >= 2.576) return Significance::One;
    if (a >= 1.960) return Significance::Five;
    return Significance::Ten;
}

DesignMatrix::DesignMatrix(std::size_t rows, std::vector<std::string> column_names)
    : rows_(rows), names_(std::move(column_names)), data_(rows * names_.size(), 0.0) {}

std::size_t RegressionResult::index_of(std::string_view term) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == term) return i;
    }
    throw Error(ErrorKind::Domain, "regression has no term '" + std::string(term) + "'");
}

RegressionResult ols_hc0(std::span<const double> y, const DesignMatrix& x) {
    const auto n = static_cast<Eigen::Index>(x.rows());
    const auto k = static_cast<Eigen::Index>(x.cols());
    if (y.size() != x.rows()) {
        throw Error(ErrorKind::Domain, "response has " + std::to_string(y.size()) + " rows, design has " +
                                           std::to_string(x.rows()));
    }
    if (k == 0 || n <= k) {
        throw Error(ErrorKind::InsufficientData, "OLS needs more rows than columns (n = " + std::to_string(n) +
                                                     ", k = " + std::to_string(k) + ")");
    }

    Eigen::MatrixXd X(n, k);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < k; ++c) X(r, c) = x(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    const Eigen::Map<const Eigen::VectorXd> Y(y.data(), n);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.rows(), X.cols());
    qr.setThreshold(1e-10);
    qr.compute(X);
    if (qr.rank() < k) {
        throw Error(ErrorKind::SingularDesign, "design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                                   " < " + std::to_string(k) + " columns)");
    }

    // beta = A y with A = P R^-1 Q1^T; the HC0 covariance is A diag(e^2) A^T.
    const Eigen::MatrixXd q1 = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv_q1t = r.triangularView<Eigen::Upper>().solve(q1.transpose());
    const Eigen::MatrixXd a = qr.colsPermutation() * rinv_q1t;

    const Eigen::VectorXd beta = a * Y;
    const Eigen::VectorXd e = Y - X * beta;
    const Eigen::MatrixXd cov = a * e.array().square().matrix().asDiagonal() * a.transpose();

    const double ybar = Y.mean();
    const double sst = (Y.array() - ybar).square().sum();
    const double ssr = e.squaredNorm();

    RegressionResult res;
    res.names = x.names();
    res.n = x.rows();
    res.r_squared = sst > 0.0 ? 1.0 - ssr / sst : (ssr == 0.0 ? 1.0 : 0.0);
    res.residuals.assign(e.data(), e.data() + n);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double se = std::sqrt(std::max(cov(j, j), 0.0));
        const double t = se > 0.0 ? beta(j) / se : std::numeric_limits<double>::quiet_NaN();
        res.coefficient.push_back(beta(j));
        res.hc0_stderr.push_back(se);
        res.t_stat.push_back(t);
        res.significance.push_back(significance_of(t));
    }
    return res;
}

namespace {

constexpr std::string_view kColumnLabels[4] = {"I", "II", "III", "IV"};

RegressionResult fit_column(const FeaturePanel& panel, int column) {
    const bool needs_returns = column >= 2;
    std::vector<std::string> names;
    if (column == 0 || column == 3) names.emplace_back("sigma_btc_bps");
    if (column == 1 || column == 3) names.emplace_back("sigma_usdt_bps");
    if (column == 2 || column == 3) names.emplace_back("r_btc_bps");
    names.emplace_back(kIntercept);

    std::vector<const FeaturePoint*> rows;
    for (const auto& row : panel.rows) {
        if (!needs_returns || row.r_btc_bps) rows.push_back(&row);
    }

    DesignMatrix x(rows.size(), names);
    std::vector<double> y;
    y.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const FeaturePoint& fp = *rows[i];
        y.push_back(fp.p_annualized_bps);
        for (std::size_t c = 0; c < names.size(); ++c) {
            const auto& nm = names[c];
            x(i, c) = nm == "sigma_btc_bps"    ? fp.sigma_btc_bps
                      : nm == "sigma_usdt_bps" ? fp.sigma_usdt_bps
                      : nm == "r_btc_bps"      ? *fp.r_btc_bps
                                               : 1.0;
        }
    }
    try {
        return ols_hc0(y, x);
    } catch (const Error& err) {
        throw Error(err.kind(), "table 4 column " + std::string(kColumnLabels[column]) + ": " + err.what());
    }
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

}  // namespace

std::array<RegressionResult, 4> run_table4(const FeaturePanel& panel) {
    return {fit_column(panel, 0), fit_column(panel, 1), fit_column(panel, 2), fit_column(panel, 3)};
}

std::vector<SummaryRow> table3_rows(const AlignedSeries& aligned, const ProbSeries& prob) {
    std::vector<double> s, f, basis, p;
    for (const auto& o : aligned.observations) {
        s.push_back(o.s);
        f.push_back(o.f);
        basis.push_back(o.basis_bps);
    }
    for (const auto& pt : prob.points) p.push_back(pt.raw_annualized_bps);
    return {summary_stats("s", s), summary_stats("f", f), summary_stats("basis_bps", basis),
            summary_stats("p_annualized_bps", p)};
}

void write_table3_text(std::ostream& out, std::span<const SummaryRow> rows) {
    constexpr std::size_t w = 12;
    std::size_t name_w = 4;
    for (const auto& r : rows) name_w = std::max(name_w, r.name.size() + 2);
    out << std::string(name_w, ' ');
    for (const char* h : {"count", "mean", "std", "min", "25%", "50%", "75%", "max"}) out << pad(h, w);
    out << '\n';
    for (const auto& r : rows) {
        std::string name = r.name;
        name.resize(name_w, ' ');
        out << name << pad(std::to_string(r.count), w);
        for (double v : {r.mean, r.std, r.min, r.q25, r.q50, r.q75, r.max}) out << pad(fixed4(v), w);
        out << '\n';
    }
}

void write_table3_csv(std::ostream& out, std::span<const SummaryRow> rows) {
    out << "name,count,mean,std,min,q25,q50,q75,max\n";
    for (const auto& r : rows) {
        out << r.name << ',' << r.count;
        for (double v : {r.mean, r.std, r.min, r.q25, r.q50, r.q75, r.max}) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

void write_table4_text(std::ostream& out, const std::array<RegressionResult, 4>& columns) {
    constexpr std::size_t w = 18;
    constexpr std::size_t name_w = 18;
    const std::string_view terms[] = {"sigma_btc_bps", "sigma_usdt_bps", "r_btc_bps", kIntercept};

    out << std::string(name_w, ' ');
    for (auto label : kColumnLabels) out << pad(std::string(label), w);
    out << '\n' << std::string(name_w, ' ');
    for (std::size_t i = 0; i < 4; ++i) out << pad("P", w);
    out << '\n';

    for (auto term : terms) {
        std::string coef_line(term);
        coef_line.resize(name_w, ' ');
        std::string se_line(name_w, ' ');
        for (const auto& col : columns) {
            const auto it = std::find(col.names.begin(), col.names.end(), term);
            if (it == col.names.end()) {
                coef_line += std::string(w, ' ');
                se_line += std::string(w, ' ');
                continue;
            }
            const auto j = static_cast<std::size_t>(it - col.names.begin());
            coef_line += pad(fixed4(col.coefficient[j]) + std::string(stars(col.significance[j])), w);
            se_line += pad("(" + fixed4(col.hc0_stderr[j]) + ")", w);
        }
        out << coef_line << '\n' << se_line << '\n';
    }
    std::string r2 = "R-squared";
    r2.resize(name_w, ' ');
    std::string nobs = "No. observations";
    nobs.resize(name_w, ' ');
    for (const auto& col : columns) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", col.r_squared);
        r2 += pad(buf, w);
        nobs += pad(std::to_string(col.n), w);
    }
    out << r2 << '\n' << nobs << '\n';
}

void write_table4_csv(std::ostream& out, const std::array<RegressionResult, 4>& columns) {
    out << "column,term,coefficient,hc0_stderr,t_stat,stars,r_squared,n\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = columns[c];
        for (std::size_t j = 0; j < col.names.size(); ++j) {
            out << kColumnLabels[c] << ',' << col.names[j] << ',' << csv::format_double(col.coefficient[j]) << ','
                << csv::format_double(col.hc0_stderr[j]) << ',' << csv::format_double(col.t_stat[j]) << ','
                << stars(col.significance[j]) << ',' << csv::format_double(col.r_squared) << ',' << col.n << '\n';
        }
    }
}

}  // namespace pegrisk
