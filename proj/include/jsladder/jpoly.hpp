#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace jsladder {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Univariate polynomial in the symbol ĵ with exact rational coefficients.
///
/// coefficients()[k] multiplies ĵ^k. Trailing zeros are never stored, so the
/// zero polynomial has no coefficients and degree -1.
class JPoly {
public:
    JPoly() = default;

    explicit JPoly(std::vector<Rational> coefficients) : c_(std::move(coefficients)) { trim(); }

    JPoly(std::initializer_list<Rational> coefficients) : JPoly(std::vector<Rational>(coefficients)) {}

    static JPoly constant(const Rational& a) { return JPoly(std::vector<Rational>{a}); }
    static JPoly constant(long long a) { return constant(Rational(a)); }

    /// The monomial ĵ.
    static JPoly variable() { return JPoly(std::vector<Rational>{Rational(0), Rational(1)}); }

    const std::vector<Rational>& coefficients() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }

    Rational coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    JPoly& operator+=(const JPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    JPoly& operator-=(const JPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    JPoly& operator*=(const Rational& a) {
        for (auto& x : c_) x *= a;
        trim();
        return *this;
    }
    JPoly& operator/=(const Rational& a) {
        if (a == 0) throw std::domain_error("JPoly: division by zero");
        for (auto& x : c_) x /= a;
        return *this;
    }

    friend JPoly operator+(JPoly a, const JPoly& b) { return a += b; }
    friend JPoly operator-(JPoly a, const JPoly& b) { return a -= b; }
    friend JPoly operator-(JPoly a) { return a *= Rational(-1); }
    friend JPoly operator*(JPoly a, const Rational& k) { return a *= k; }
    friend JPoly operator*(const Rational& k, JPoly a) { return a *= k; }
    friend JPoly operator/(JPoly a, const Rational& k) { return a /= k; }

    friend JPoly operator*(const JPoly& a, const JPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            for (std::size_t k = 0; k < b.c_.size(); ++k) out[i + k] += a.c_[i] * b.c_[k];
        }
        return JPoly(std::move(out));
    }

    /// Exact division by a nonzero constant polynomial.
    JPoly divided_by_constant(const JPoly& d) const {
        if (!d.is_constant() || d.is_zero()) {
            throw std::domain_error("JPoly: divisor is not a nonzero constant: " + d.to_string());
        }
        return *this / d.c_[0];
    }

    Rational evaluate(const Rational& x) const {
        Rational acc(0);
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
        return acc;
    }

    double evaluate(double x) const {
        double acc = 0.0;
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + static_cast<double>(c_[k]);
        return acc;
    }

    /// Human-readable form in the variable `j`, highest power first.
    std::string to_string() const {
        if (c_.empty()) return "0";
        std::string out;
        for (std::size_t k = c_.size(); k-- > 0;) {
            const Rational& a = c_[k];
            if (a == 0) continue;
            const bool negative = a < 0;
            const Rational mag = negative ? Rational(-a) : a;
            if (out.empty()) {
                if (negative) out += "-";
            } else {
                out += negative ? " - " : " + ";
            }
            const bool unit = (mag == 1);
            if (!unit || k == 0) out += mag.str();
            if (k >= 1) {
                if (!unit) out += "*";
                out += "j";
                if (k >= 2) out += "^" + std::to_string(k);
            }
        }
        return out;
    }

    bool operator==(const JPoly& o) const { return c_ == o.c_; }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

/// θ(θ + 2ĵ + 1): the J² shift produced by a ladder operator that moves j by θ.
inline JPoly casimir_shift(int theta) {
    return JPoly{Rational(theta) * Rational(theta + 1), Rational(2 * theta)};
}

namespace detail {

inline nlohmann::json bigint_to_json(const BigInt& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
        return static_cast<std::int64_t>(v);
    }
    return v.str();
}

inline BigInt bigint_from_json(const nlohmann::json& j) {
    if (j.is_string()) return BigInt(j.get<std::string>());
    if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
    throw std::invalid_argument("expected an integer or an integer string");
}

}  // namespace detail

/// [[numerator, denominator], ...], lowest power first. Integers beyond
/// 64 bits are written as decimal strings.
inline nlohmann::json jpoly_to_json(const JPoly& p) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : p.coefficients()) {
        out.push_back({detail::bigint_to_json(boost::multiprecision::numerator(c)),
                       detail::bigint_to_json(boost::multiprecision::denominator(c))});
    }
    return out;
}

inline JPoly jpoly_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("JPoly JSON must be an array");
    std::vector<Rational> c;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2) {
            throw std::invalid_argument("JPoly JSON coefficient must be [numerator, denominator]");
        }
        const BigInt den = detail::bigint_from_json(pair[1]);
        if (den == 0) throw std::invalid_argument("JPoly JSON: zero denominator");
        c.emplace_back(detail::bigint_from_json(pair[0]), den);
    }
    return JPoly(std::move(c));
}

}  // namespace jsladder
