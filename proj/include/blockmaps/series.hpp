#pragma once

#include "blockmaps/bigfixed.hpp"
#include "blockmaps/bigrat.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace blockmaps {

// Raised when two series of different truncation orders meet in a binary
// operation. Orders never coerce silently; the caller must truncate.
struct SeriesOrderMismatch : std::logic_error {
    SeriesOrderMismatch() : std::logic_error("series truncation orders differ") {}
};

// Power series truncated at z^order (inclusive). The coefficient type C needs
// value-initialization to zero, construction from long, ring operators and
// equality. Instantiated with BigRat and with UPoly (series in z whose
// coefficients are polynomials in a second variable).
template <class C>
class TSeries {
public:
    explicit TSeries(int order) : order_(order), c_(static_cast<size_t>(order) + 1) {
        if (order < 0) throw std::invalid_argument("series order must be >= 0");
    }

    static TSeries from_coeffs(std::vector<C> coeffs, int order) {
        TSeries s(order);
        if (coeffs.size() > s.c_.size())
            coeffs.resize(s.c_.size());
        for (size_t i = 0; i < coeffs.size(); ++i) s.c_[i] = std::move(coeffs[i]);
        return s;
    }

    int order() const { return order_; }

    const C& operator[](int k) const { return c_.at(static_cast<size_t>(k)); }
    C& at(int k) { return c_.at(static_cast<size_t>(k)); }

    bool is_zero() const {
        for (const C& x : c_)
            if (!(x == C())) return false;
        return true;
    }

    TSeries operator+(const TSeries& o) const {
        check(o);
        TSeries r(order_);
        for (int k = 0; k <= order_; ++k) r.c_[k] = c_[k] + o.c_[k];
        return r;
    }

    TSeries operator-(const TSeries& o) const {
        check(o);
        TSeries r(order_);
        for (int k = 0; k <= order_; ++k) r.c_[k] = c_[k] - o.c_[k];
        return r;
    }

    TSeries operator-() const {
        TSeries r(order_);
        for (int k = 0; k <= order_; ++k) r.c_[k] = -c_[k];
        return r;
    }

    TSeries operator*(const TSeries& o) const {
        check(o);
        TSeries r(order_);
        for (int i = 0; i <= order_; ++i) {
            if (c_[i] == C()) continue;
            for (int j = 0; i + j <= order_; ++j) {
                if (o.c_[j] == C()) continue;
                r.c_[i + j] = r.c_[i + j] + c_[i] * o.c_[j];
            }
        }
        return r;
    }

    TSeries scaled(const C& f) const {
        TSeries r(order_);
        for (int k = 0; k <= order_; ++k) r.c_[k] = c_[k] * f;
        return r;
    }

    // Formal derivative; the result is one order shorter.
    TSeries derive() const {
        if (order_ == 0) return TSeries(0);
        TSeries r(order_ - 1);
        for (int k = 1; k <= order_; ++k) r.c_[k - 1] = c_[k] * C(static_cast<long>(k));
        return r;
    }

    TSeries truncated(int new_order) const {
        if (new_order > order_)
            throw std::invalid_argument("cannot extend a truncated series");
        TSeries r(new_order);
        for (int k = 0; k <= new_order; ++k) r.c_[k] = c_[k];
        return r;
    }

private:
    int order_;
    std::vector<C> c_;

    void check(const TSeries& o) const {
        if (order_ != o.order_) throw SeriesOrderMismatch();
    }
};

// outer(inner(z)), both truncated at the same order; inner must have zero
// constant term or composition is not defined on truncations.
template <class C>
TSeries<C> compose(const TSeries<C>& outer, const TSeries<C>& inner) {
    if (outer.order() != inner.order()) throw SeriesOrderMismatch();
    if (!(inner[0] == C()))
        throw std::invalid_argument("compose: inner series needs zero constant term");
    int n = outer.order();
    TSeries<C> r(n);
    for (int k = n; k >= 0; --k) {
        r = r * inner;
        r.at(0) = r[0] + outer[k];
    }
    return r;
}

using TruncSeries = TSeries<BigRat>;

struct EvalResult {
    BigFixed value;
    // Crude remainder proxy: |a_N x^N| * N. Meaningful only well inside the
    // disc of convergence; the analytics layer has sharper, model-based
    // bounds for the series it owns.
    BigFixed bound;
};

// Horner evaluation of the truncation at a fixed-point x.
EvalResult eval_real(const TruncSeries& s, const BigFixed& x);

} // namespace blockmaps
