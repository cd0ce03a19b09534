#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <type_traits>

namespace iet {

using Integer = mpz_class;
using Rational = mpq_class;
using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;

// Working mantissa for BigFloat values created from now on.
void set_precision_bits(unsigned bits);
unsigned precision_bits();

// Reads IET_PRECISION_BITS if set, otherwise 256.
unsigned default_precision_bits();

class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

// 2^e as a BigFloat at the current precision.
BigFloat pow2(long e);

// "p/q", "p", or a finite decimal such as "-0.125".
Rational parse_rational(const std::string& s);
std::string format_rational(const Rational& q);

// Decimal string with enough digits to round-trip the current precision.
std::string format_decimal(const BigFloat& x, int digits = 0);
BigFloat parse_bigfloat(const std::string& s);

// Hex mantissa/exponent form: "0x1.8p-3" style, exact for the stored value.
std::string format_hex(const BigFloat& x);
BigFloat parse_hex(const std::string& s);

BigFloat to_bigfloat(const Rational& q);
double to_double(const Rational& q);
double to_double(const BigFloat& x);
double to_double(const Integer& z);
// Exact value of a big-float.
Rational to_rational(const BigFloat& x);

// log of a positive integer, valid far beyond double range.
double log_abs(const Integer& z);

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static Rational from_rational(const Rational& q) { return q; }
    static Rational from_integer(const Integer& z) { return Rational(z); }
    static int sign(const Rational& x) { return sgn(x); }
    static Rational abs(const Rational& x) { return ::abs(x); }
    static std::string str(const Rational& x) { return format_rational(x); }
};

template <>
struct scalar_traits<BigFloat> {
    static constexpr bool exact = false;
    static BigFloat from_rational(const Rational& q) { return to_bigfloat(q); }
    static BigFloat from_integer(const Integer& z) { return BigFloat(z.get_str()); }
    static int sign(const BigFloat& x) { return x.sign(); }
    static BigFloat abs(const BigFloat& x) { return boost::multiprecision::abs(x); }
    static std::string str(const BigFloat& x) { return format_decimal(x); }
};

}  // namespace iet
