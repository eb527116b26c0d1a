#pragma once

#include <cmath>
#include <vector>

#include "stripelab/errors.hpp"

namespace stripelab {

/// Truncated Taylor series about a point: c[k] holds f^(k)/k!.
/// Arithmetic propagates derivatives exactly (to rounding), which is how the
/// hypothesis constants get derivative bounds without symbolic algebra.
class Jet {
  public:
    explicit Jet(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {}

    static Jet constant(double value, int order) {
        Jet j(order);
        j.c_[0] = value;
        return j;
    }

    static Jet variable(double value, int order) {
        Jet j(order);
        j.c_[0] = value;
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double coeff(int k) const { return c_[static_cast<std::size_t>(k)]; }
    double& coeff(int k) { return c_[static_cast<std::size_t>(k)]; }
    double value() const { return c_[0]; }

    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return coeff(k) * f;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r = a;
        for (int k = 0; k <= r.order(); ++k) r.c_[k] += b.c_[k];
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet r = a;
        for (int k = 0; k <= r.order(); ++k) r.c_[k] -= b.c_[k];
        return r;
    }
    friend Jet operator-(const Jet& a) {
        Jet r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend Jet operator*(const Jet& a, double s) {
        Jet r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    friend Jet operator*(double s, const Jet& a) { return a * s; }
    friend Jet operator+(const Jet& a, double s) {
        Jet r = a;
        r.c_[0] += s;
        return r;
    }
    friend Jet operator+(double s, const Jet& a) { return a + s; }
    friend Jet operator-(const Jet& a, double s) { return a + (-s); }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const int n = a.order();
        Jet r(n);
        for (int k = 0; k <= n; ++k) {
            double acc = 0.0;
            for (int j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
            r.c_[k] = acc;
        }
        return r;
    }

    Jet reciprocal() const {
        if (c_[0] == 0.0) throw InvalidParameterError("Jet: reciprocal of series with zero constant term");
        const int n = order();
        Jet r(n);
        r.c_[0] = 1.0 / c_[0];
        for (int k = 1; k <= n; ++k) {
            double acc = 0.0;
            for (int j = 1; j <= k; ++j) acc += c_[j] * r.c_[k - j];
            r.c_[k] = -r.c_[0] * acc;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }
    friend Jet operator/(double s, const Jet& b) { return b.reciprocal() * s; }
    friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

    friend Jet exp(const Jet& u) {
        const int n = u.order();
        Jet r(n);
        r.c_[0] = std::exp(u.c_[0]);
        for (int k = 1; k <= n; ++k) {
            double acc = 0.0;
            for (int j = 1; j <= k; ++j) acc += j * u.c_[j] * r.c_[k - j];
            r.c_[k] = acc / k;
        }
        return r;
    }

    // sin and cos propagate as a coupled pair.
    friend void sincos(const Jet& u, Jet& s, Jet& c) {
        const int n = u.order();
        s = Jet(n);
        c = Jet(n);
        s.c_[0] = std::sin(u.c_[0]);
        c.c_[0] = std::cos(u.c_[0]);
        for (int k = 1; k <= n; ++k) {
            double as = 0.0, ac = 0.0;
            for (int j = 1; j <= k; ++j) {
                as += j * u.c_[j] * c.c_[k - j];
                ac += j * u.c_[j] * s.c_[k - j];
            }
            s.c_[k] = as / k;
            c.c_[k] = -ac / k;
        }
    }

    friend Jet cos(const Jet& u) {
        Jet s(u.order()), c(u.order());
        sincos(u, s, c);
        return c;
    }
    friend Jet sin(const Jet& u) {
        Jet s(u.order()), c(u.order());
        sincos(u, s, c);
        return s;
    }

  private:
    std::vector<double> c_;
};

}  // namespace stripelab
