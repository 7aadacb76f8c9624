// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "ibpcert/errors.hpp"

namespace ibpcert {

/// Scalar arithmetic backend. Exact rationals are the default everywhere a
/// strict inequality carries proof weight; binary64 exists for large sweeps.
enum class Backend { rational, binary64 };

inline const char* backend_name(Backend b) {
    return b == Backend::rational ? "rational" : "float";
}

/// One real number, tagged by backend. Rational values are kept canonical
/// (denominator > 0, lowest terms); all comparisons are exact within a
/// backend and throw BackendMismatch across backends.
class Scalar {
public:
    Scalar() : rep_(mpq_class(0)) {}

    static Scalar rational(long num, long den = 1) {
        if (den == 0)
            throw DivisionByZero("rational with zero denominator");
        mpq_class q(num, den);
        q.canonicalize();
        return Scalar(std::move(q));
    }
    static Scalar rational(mpq_class q) {
        q.canonicalize();
        return Scalar(std::move(q));
    }
    static Scalar real(double v) { return Scalar(v); }

    static Scalar zero(Backend b) { return from_int(0, b); }
    static Scalar one(Backend b) { return from_int(1, b); }
    static Scalar from_int(long v, Backend b) {
        return b == Backend::rational ? rational(v) : real(static_cast<double>(v));
    }

    Backend backend() const {
        return std::holds_alternative<mpq_class>(rep_) ? Backend::rational
                                                       : Backend::binary64;
    }
    bool is_rational() const { return backend() == Backend::rational; }

    const mpq_class& rat() const {
        if (!is_rational())
            throw BackendMismatch("expected a rational-backend scalar");
        return std::get<mpq_class>(rep_);
    }
    double flt() const {
        if (is_rational())
            throw BackendMismatch("expected a float-backend scalar");
        return std::get<double>(rep_);
    }

    /// Lossy for rationals whose exact value is not representable.
    double to_double() const {
        return is_rational() ? rat().get_d() : flt();
    }

    /// binary64 -> rational conversion is exact; the reverse rounds to
    /// nearest.
    Scalar to_backend(Backend b) const {
        if (b == backend())
            return *this;
        if (b == Backend::rational) {
            double v = flt();
            if (!std::isfinite(v))
                throw Error("cannot convert non-finite float to rational");
            return rational(mpq_class(v));
        }
        return real(to_double());
    }

    int sign() const {
        if (is_rational())
            return sgn(rat());
        double v = flt();
        return (v > 0.0) - (v < 0.0);
    }

    /// Three-way comparison, exact within the backend.
    int cmp(const Scalar& o) const {
        require_same(o);
        if (is_rational())
            return ::cmp(rat(), o.rat());
        double a = flt(), b = o.flt();
        return (a > b) - (a < b);
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        a.require_same(b);
        if (a.is_rational())
            return rational(mpq_class(a.rat() + b.rat()));
        return real(a.flt() + b.flt());
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        a.require_same(b);
        if (a.is_rational())
            return rational(mpq_class(a.rat() - b.rat()));
        return real(a.flt() - b.flt());
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        a.require_same(b);
        if (a.is_rational())
            return rational(mpq_class(a.rat() * b.rat()));
        return real(a.flt() * b.flt());
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        a.require_same(b);
        if (b.sign() == 0)
            throw DivisionByZero("scalar division by zero");
        if (a.is_rational())
            return rational(mpq_class(a.rat() / b.rat()));
        return real(a.flt() / b.flt());
    }
    Scalar operator-() const {
        if (is_rational())
            return rational(mpq_class(-rat()));
        return real(-flt());
    }

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.cmp(b) == 0; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return a.cmp(b) != 0; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return a.cmp(b) < 0; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return a.cmp(b) <= 0; }
    friend bool operator>(const Scalar& a, const Scalar& b) { return a.cmp(b) > 0; }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return a.cmp(b) >= 0; }

    /// Rationals print as "p/q" ("p" when the denominator is 1); floats as
    /// the shortest round-trip decimal.
    std::string str() const {
        if (is_rational()) {
            const mpq_class& q = rat();
            if (q.get_den() == 1)
                return q.get_num().get_str();
            return q.get_num().get_str() + "/" + q.get_den().get_str();
        }
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), flt());
        return std::string(buf, res.ptr);
    }

    /// Accepts "p", "p/q" and plain decimals ("-0.25"); decimals are exact
    /// under the rational backend.
    static Scalar parse(std::string_view text, Backend b) {
        if (text.empty())
            throw ParseError("empty scalar literal");
        if (b == Backend::binary64) {
            if (auto slash = text.find('/'); slash != std::string_view::npos) {
                Scalar num = parse(text.substr(0, slash), b);
                Scalar den = parse(text.substr(slash + 1), b);
                return num / den;
            }
            double v = 0;
            auto res = std::from_chars(text.data(), text.data() + text.size(), v);
            if (res.ec != std::errc() || res.ptr != text.data() + text.size())
                throw ParseError("bad float literal: " + std::string(text));
            return real(v);
        }
        if (auto slash = text.find('/'); slash != std::string_view::npos)
            return parse_ratio(text.substr(0, slash), text.substr(slash + 1));
        if (auto dot = text.find('.'); dot != std::string_view::npos)
            return parse_decimal(text, dot);
        return parse_ratio(text, "1");
    }

private:
    explicit Scalar(mpq_class q) : rep_(std::move(q)) {}
    explicit Scalar(double v) : rep_(v) {}

    void require_same(const Scalar& o) const {
        if (backend() != o.backend())
            throw BackendMismatch("mixed rational/float operands");
    }

    static Scalar parse_ratio(std::string_view num, std::string_view den) {
        mpz_class n = parse_integer(num);
        mpz_class d = parse_integer(den);
        if (d == 0)
            throw ParseError("zero denominator");
        mpq_class q(n, d);
        q.canonicalize();
        return Scalar(std::move(q));
    }

    static Scalar parse_decimal(std::string_view text, size_t dot) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty())
            throw ParseError("bad decimal literal: " + std::string(text));
        bool neg = !whole.empty() && whole.front() == '-';
        if (neg || (!whole.empty() && whole.front() == '+'))
            whole.remove_prefix(1);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        mpz_class n = (whole.empty() ? mpz_class(0) : parse_integer(whole)) * scale
                      + parse_integer(frac);
        if (neg)
            n = -n;
        mpq_class q(n, scale);
        q.canonicalize();
        return Scalar(std::move(q));
    }

    static mpz_class parse_integer(std::string_view text) {
        if (text.empty())
            throw ParseError("empty integer literal");
        mpz_class z;
        if (mpz_set_str(z.get_mpz_t(), std::string(text).c_str(), 10) != 0)
            throw ParseError("bad integer literal: " + std::string(text));
        return z;
    }

    std::variant<mpq_class, double> rep_;
};

inline Scalar relu(const Scalar& a) {
    return a.sign() > 0 ? a : Scalar::zero(a.backend());
}

inline Scalar abs(const Scalar& a) {
    return a.sign() < 0 ? -a : a;
}

inline const Scalar& min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
inline const Scalar& max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }

/// Smallest integer >= a, as a machine integer. Rational backend only.
inline long ceil_to_long(const Scalar& a) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), a.rat().get_num().get_mpz_t(), a.rat().get_den().get_mpz_t());
    if (!q.fits_slong_p())
        throw Error("ceil out of machine range");
    return q.get_si();
}

/// A point in R^d.
using Point = std::vector<Scalar>;

inline Backend point_backend(const Point& p) {
    if (p.empty())
        throw DimensionError("empty point");
    Backend b = p.front().backend();
    for (const Scalar& s : p)
        if (s.backend() != b)
            throw BackendMismatch("point mixes scalar backends");
    return b;
}

inline Point to_backend(const Point& p, Backend b) {
    Point out;
    out.reserve(p.size());
    for (const Scalar& s : p)
        out.push_back(s.to_backend(b));
    return out;
}

} // namespace ibpcert
