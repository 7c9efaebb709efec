#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace oblivkand {

/// Exact rational number. All weights, biases and certificate arithmetic
/// run on this type; doubles appear only inside the LP solver and the
/// Monte-Carlo paths.
using Rat = mpq_class;

/// Raised on malformed user input (files, flags). CLI maps it to exit code 2.
struct UserError : std::runtime_error {
    explicit UserError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on numerical failure inside the LP solver. CLI exit code 3.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

inline double to_double(const Rat& q) { return q.get_d(); }

/// Exact rational equal to the binary double d.
inline Rat rat_from_double(double d) {
    Rat r;
    mpq_set_d(r.get_mpq_t(), d);
    return r;
}

/// num/den in canonical form. The raw two-argument mpq_class constructor
/// skips canonicalization, which breaks exact comparison.
inline Rat make_rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// base^e for integer e (negative allowed, base != 0). 0^0 = 1.
inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    bool invert = e < 0;
    unsigned long n = invert ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    if (invert && base == 0) throw std::domain_error("rat_pow: 0 to a negative power");
    Rat r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), n);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), n);
    r.canonicalize();
    if (invert) r = 1 / r;
    return r;
}

/// Parses "p/q", an integer, or a decimal like "0.25" / "1.5e-3".
inline Rat rat_from_string(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw UserError("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (num.empty() || den.empty()) throw UserError("malformed rational: " + text);
        try {
            mpz_class n(num, 10), d(den, 10);  // explicit base: leading zeros must not mean octal
            if (d == 0) throw UserError("zero denominator: " + text);
            Rat r(n, d);
            r.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            throw UserError("malformed rational: " + text);
        }
    }

    // decimal: [+-]digits[.digits][e[+-]digits]
    std::string mant = s;
    long exp10 = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = s.substr(0, epos);
        try {
            exp10 = std::stol(s.substr(epos + 1));
        } catch (...) {
            throw UserError("malformed number: " + text);
        }
    }
    std::string digits;
    long frac_len = 0;
    bool seen_dot = false, seen_digit = false;
    size_t i = 0;
    if (i < mant.size() && (mant[i] == '+' || mant[i] == '-')) {
        if (mant[i] == '-') digits += '-';
        ++i;
    }
    for (; i < mant.size(); ++i) {
        char c = mant[i];
        if (c == '.') {
            if (seen_dot) throw UserError("malformed number: " + text);
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            seen_digit = true;
            if (seen_dot) ++frac_len;
        } else {
            throw UserError("malformed number: " + text);
        }
    }
    if (!seen_digit) throw UserError("malformed number: " + text);
    Rat r(mpz_class(digits, 10), 1);
    long shift = exp10 - frac_len;
    if (shift > 0)
        r *= rat_pow(Rat(10), shift);
    else if (shift < 0)
        r /= rat_pow(Rat(10), -shift);
    r.canonicalize();
    return r;
}

/// "p/q", or just "p" when the denominator is 1.
inline std::string rat_to_string(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Decimal rendering with the given number of significant digits.
inline std::string rat_to_decimal(const Rat& q, int sig_digits = 12) {
    if (q == 0) return "0";
    mp_exp_t exp = 0;
    mpf_class f(q, 512);
    std::string m = f.get_str(exp, 10, static_cast<size_t>(sig_digits));
    bool neg = !m.empty() && m[0] == '-';
    if (neg) m = m.substr(1);
    std::string out = neg ? "-" : "";
    if (exp <= 0) {
        out += "0.";
        out.append(static_cast<size_t>(-exp), '0');
        out += m;
    } else if (static_cast<size_t>(exp) >= m.size()) {
        out += m;
        out.append(static_cast<size_t>(exp) - m.size(), '0');
    } else {
        out += m.substr(0, static_cast<size_t>(exp)) + "." + m.substr(static_cast<size_t>(exp));
    }
    return out;
}

}  // namespace oblivkand
