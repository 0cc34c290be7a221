// stats.hpp -- accumulators and small fitting helpers for experiment reductions.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ssep {

// Mean / variance accumulator (Welford).
class RunningStats {
  public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double stderr_mean() const {
        return n_ > 1 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }
    // Standard error of the sample variance under approximate normality.
    double stderr_variance() const {
        return n_ > 1 ? variance() * std::sqrt(2.0 / static_cast<double>(n_ - 1)) : 0.0;
    }
    void merge(const RunningStats& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double d = o.mean_ - mean_;
        const double nt = static_cast<double>(n_ + o.n_);
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / nt;
        mean_ += d * static_cast<double>(o.n_) / nt;
        n_ += o.n_;
    }

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;  // from the supplied weights
};

// Weighted least squares y = intercept + slope*x with weights w = 1/var(y).
inline LineFit wls_line(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
        throw std::invalid_argument("wls_line: need >= 2 points of equal length");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (det <= 0) throw std::runtime_error("wls_line: singular system");
    LineFit f;
    f.slope = (sw * swxy - swx * swy) / det;
    f.intercept = (swxx * swy - swx * swxy) / det;
    f.slope_se = std::sqrt(sw / det);
    return f;
}

// Unweighted least-squares slope (log-log growth fits).
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> w(x.size(), 1.0);
    return wls_line(x, y, w).slope;
}

struct TailEstimate {
    std::size_t trials = 0;
    std::size_t successes = 0;
    double p_hat = 0.0;
    double log_p = 0.0;      // log p_hat; -inf when successes == 0
    double log_p_se = 0.0;   // delta-method SE of log p_hat
};

inline TailEstimate tail_estimate(std::size_t successes, std::size_t trials) {
    TailEstimate e;
    e.trials = trials;
    e.successes = successes;
    e.p_hat = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
    if (successes == 0) {
        e.log_p = -std::numeric_limits<double>::infinity();
        e.log_p_se = std::numeric_limits<double>::infinity();
    } else {
        e.log_p = std::log(e.p_hat);
        e.log_p_se = std::sqrt((1.0 - e.p_hat) / (e.p_hat * static_cast<double>(trials)));
    }
    return e;
}

}  // namespace ssep
