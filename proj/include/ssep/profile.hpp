// profile.hpp -- macroscopic density profiles with constant tails.
//
// A profile is rho_* on (-inf, x_lo], rho^* on (x_hi, inf), and piecewise
// linear in between (segments may jump at their shared endpoints, so step
// profiles are exact). Values live in [0,1].
#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssep {

class Profile {
  public:
    struct Segment {
        double x0, x1;  // x0 < x1
        double y0, y1;  // linear between the endpoints
    };

    static Profile constant(double rho) {
        Profile p;
        p.check_density(rho);
        p.left_ = p.right_ = rho;
        p.x_lo_ = p.x_hi_ = 0.0;
        return p;
    }

    static Profile step(double rho_l, double rho_r) {
        Profile p;
        p.check_density(rho_l);
        p.check_density(rho_r);
        p.left_ = rho_l;
        p.right_ = rho_r;
        p.x_lo_ = p.x_hi_ = 0.0;
        return p;
    }

    // 1 on [a,b], 0 outside (the degenerate block profile).
    static Profile indicator(double a, double b) {
        if (!(a < b)) throw std::invalid_argument("indicator: need a < b");
        Profile p;
        p.left_ = p.right_ = 0.0;
        p.x_lo_ = a;
        p.x_hi_ = b;
        p.segments_.push_back({a, b, 1.0, 1.0});
        return p;
    }

    // Piecewise-linear interpolation through (x,y) samples, constant tails.
    static Profile table(double left_tail, double right_tail, std::vector<double> xs,
                         std::vector<double> ys) {
        if (xs.size() != ys.size() || xs.size() < 2)
            throw std::invalid_argument("table: need >= 2 samples");
        Profile p;
        p.check_density(left_tail);
        p.check_density(right_tail);
        for (double y : ys) p.check_density(y);
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i - 1] < xs[i])) throw std::invalid_argument("table: x not increasing");
        p.left_ = left_tail;
        p.right_ = right_tail;
        p.x_lo_ = xs.front();
        p.x_hi_ = xs.back();
        for (std::size_t i = 1; i < xs.size(); ++i)
            p.segments_.push_back({xs[i - 1], xs[i], ys[i - 1], ys[i]});
        return p;
    }

    // "constant r" | "step rl rr" | "indicator a b" | "table rl rr x0 y0 x1 y1 ..."
    static Profile parse(const std::string& spec) {
        std::istringstream in(spec);
        std::string kind;
        in >> kind;
        auto need = [&](int n) {
            std::vector<double> v(n);
            for (auto& x : v)
                if (!(in >> x)) throw std::invalid_argument("profile: bad spec '" + spec + "'");
            return v;
        };
        if (kind == "constant") {
            auto v = need(1);
            return constant(v[0]);
        }
        if (kind == "step") {
            auto v = need(2);
            return step(v[0], v[1]);
        }
        if (kind == "indicator") {
            auto v = need(2);
            return indicator(v[0], v[1]);
        }
        if (kind == "table") {
            auto tails = need(2);
            std::vector<double> xs, ys;
            double x, y;
            while (in >> x >> y) {
                xs.push_back(x);
                ys.push_back(y);
            }
            return table(tails[0], tails[1], std::move(xs), std::move(ys));
        }
        throw std::invalid_argument("profile: unknown kind '" + kind + "'");
    }

    double operator()(double x) const {
        if (x <= x_lo_) return left_;
        if (x > x_hi_) return right_;
        for (const auto& s : segments_) {
            if (x <= s.x1) {
                const double t = (x - s.x0) / (s.x1 - s.x0);
                return s.y0 + t * (s.y1 - s.y0);
            }
        }
        return right_;
    }

    // Exact integral of the profile over [a,b].
    double integrate(double a, double b) const {
        if (a > b) return -integrate(b, a);
        double total = 0.0;
        // left tail part
        const double la = std::min(a, x_lo_), lb = std::min(b, x_lo_);
        total += left_ * (lb - la);
        // right tail part
        const double ra = std::max(a, x_hi_), rb = std::max(b, x_hi_);
        total += right_ * (rb - ra);
        for (const auto& s : segments_) {
            const double c = std::max(a, s.x0), d = std::min(b, s.x1);
            if (c >= d) continue;
            const double slope = (s.y1 - s.y0) / (s.x1 - s.x0);
            auto anti = [&](double x) {
                const double u = x - s.x0;
                return s.y0 * u + 0.5 * slope * u * u;
            };
            total += anti(d) - anti(c);
        }
        return total;
    }

    Profile shifted(double a) const {
        Profile p(*this);
        p.x_lo_ -= a;
        p.x_hi_ -= a;
        for (auto& s : p.segments_) {
            s.x0 -= a;
            s.x1 -= a;
        }
        return p;
    }

    Profile reflected() const {
        Profile p;
        p.left_ = right_;
        p.right_ = left_;
        p.x_lo_ = -x_hi_;
        p.x_hi_ = -x_lo_;
        for (auto it = segments_.rbegin(); it != segments_.rend(); ++it)
            p.segments_.push_back({-it->x1, -it->x0, it->y1, it->y0});
        return p;
    }

    double left_tail() const { return left_; }
    double right_tail() const { return right_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    const std::vector<Segment>& segments() const { return segments_; }

    double min_value() const {
        double m = std::min(left_, right_);
        for (const auto& s : segments_) m = std::min({m, s.y0, s.y1});
        return m;
    }
    double max_value() const {
        double m = std::max(left_, right_);
        for (const auto& s : segments_) m = std::max({m, s.y0, s.y1});
        return m;
    }

    // Strictly interior everywhere; required for local-equilibrium sampling.
    bool strictly_interior() const { return min_value() > 0.0 && max_value() < 1.0; }

  private:
    static void check_density(double v) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("profile: density outside [0,1]");
    }

    double left_ = 0.5, right_ = 0.5;
    double x_lo_ = 0.0, x_hi_ = 0.0;
    std::vector<Segment> segments_;  // ordered, abutting, covering [x_lo, x_hi]
};

}  // namespace ssep
