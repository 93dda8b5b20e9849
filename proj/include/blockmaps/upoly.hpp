#pragma once

#include "blockmaps/bigrat.hpp"
#include "blockmaps/series.hpp"

#include <vector>

namespace blockmaps {

// Dense polynomial in one variable u over BigRat, kept trimmed (no trailing
// zero coefficients; the zero polynomial has an empty vector). Serves as the
// coefficient ring for bivariate series.
class UPoly {
public:
    UPoly() = default;
    UPoly(long v) {
        if (v != 0) c_.assign(1, BigRat(v));
    }

    static UPoly constant(const BigRat& a) {
        UPoly p;
        if (a != 0) p.c_.assign(1, a);
        return p;
    }

    static UPoly var() {
        UPoly p;
        p.c_ = {BigRat(0), BigRat(1)};
        return p;
    }

    static UPoly from_coeffs(std::vector<BigRat> coeffs) {
        UPoly p;
        p.c_ = std::move(coeffs);
        p.trim();
        return p;
    }

    // Degree of the zero polynomial is -1 by convention.
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    BigRat coeff(int k) const {
        if (k < 0 || k >= static_cast<int>(c_.size())) return BigRat(0);
        return c_[static_cast<size_t>(k)];
    }

    BigRat eval(const BigRat& u) const {
        BigRat acc(0);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * u + c_[i];
        return acc;
    }

    UPoly operator+(const UPoly& o) const {
        UPoly r;
        size_t n = std::max(c_.size(), o.c_.size());
        r.c_.resize(n);
        for (size_t i = 0; i < n; ++i) r.c_[i] = coeff(static_cast<int>(i)) + o.coeff(static_cast<int>(i));
        r.trim();
        return r;
    }

    UPoly operator-(const UPoly& o) const { return *this + (-o); }

    UPoly operator-() const {
        UPoly r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    UPoly operator*(const UPoly& o) const {
        UPoly r;
        if (c_.empty() || o.c_.empty()) return r;
        r.c_.assign(c_.size() + o.c_.size() - 1, BigRat(0));
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            for (size_t j = 0; j < o.c_.size(); ++j)
                r.c_[i + j] += c_[i] * o.c_[j];
        }
        r.trim();
        return r;
    }

    bool operator==(const UPoly& o) const { return c_ == o.c_; }

    const std::vector<BigRat>& raw() const { return c_; }

private:
    std::vector<BigRat> c_;

    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
};

// Series in z with polynomial-in-u coefficients.
using BiSeries = TSeries<UPoly>;

} // namespace blockmaps
