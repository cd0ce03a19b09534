#include "iet/scalar.hpp"

#include "iet/errors.hpp"

#include <mpfr.h>

#include <cmath>
#include <cstdlib>
#include <ios>

namespace iet {

namespace {
unsigned g_bits = 0;

unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}
}  // namespace

void set_precision_bits(unsigned bits) {
    if (bits < 24) throw DomainError("precision below 24 bits");
    g_bits = bits;
    BigFloat::default_precision(bits_to_digits10(bits));
}

unsigned precision_bits() {
    if (g_bits == 0) set_precision_bits(default_precision_bits());
    return g_bits;
}

unsigned default_precision_bits() {
    if (const char* env = std::getenv("IET_PRECISION_BITS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 24 || v > 1 << 20)
            throw ParseError("IET_PRECISION_BITS must be an integer in [24, 2^20]");
        return static_cast<unsigned>(v);
    }
    return 256;
}

PrecisionScope::PrecisionScope(unsigned bits) : saved_(precision_bits()) {
    set_precision_bits(bits);
}

PrecisionScope::~PrecisionScope() { set_precision_bits(saved_); }

BigFloat pow2(long e) {
    precision_bits();
    BigFloat x;
    mpfr_set_ui_2exp(x.backend().data(), 1, e, MPFR_RNDN);
    return x;
}

Rational parse_rational(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (c != ' ' && c != '_') s.push_back(c);
    if (s.empty()) throw ParseError("empty number");
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            Rational q(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
            if (q.get_den() == 0) throw ParseError("zero denominator in '" + raw + "'");
            q.canonicalize();
            return q;
        }
        std::string mant = s;
        long exp10 = 0;
        auto epos = s.find_first_of("eE");
        if (epos != std::string::npos) {
            mant = s.substr(0, epos);
            exp10 = std::stol(s.substr(epos + 1));
        }
        auto dot = mant.find('.');
        if (dot != std::string::npos) {
            exp10 -= static_cast<long>(mant.size() - dot - 1);
            mant.erase(dot, 1);
        }
        if (mant.empty() || mant == "-" || mant == "+") throw ParseError("bad number '" + raw + "'");
        if (mant[0] == '+') mant.erase(0, 1);
        Rational q{Integer(mant)};
        Integer p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
        if (exp10 >= 0)
            q *= p10;
        else
            q /= p10;
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw ParseError("bad number '" + raw + "'");
    } catch (const std::out_of_range&) {
        throw ParseError("bad number '" + raw + "'");
    }
}

std::string format_rational(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string format_decimal(const BigFloat& x, int digits) {
    if (digits <= 0) digits = static_cast<int>(bits_to_digits10(precision_bits()));
    return x.str(digits, std::ios_base::scientific);
}

BigFloat parse_bigfloat(const std::string& s) {
    precision_bits();
    BigFloat x;
    char* end = nullptr;
    mpfr_strtofr(x.backend().data(), s.c_str(), &end, 0, MPFR_RNDN);
    if (end == s.c_str() || *end != '\0')
        throw ParseError("bad floating-point number '" + s + "'");
    return x;
}

std::string format_hex(const BigFloat& x) {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%Ra", x.backend().data());
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
}

BigFloat parse_hex(const std::string& s) { return parse_bigfloat(s); }

BigFloat to_bigfloat(const Rational& q) {
    precision_bits();
    BigFloat x;
    mpfr_set_q(x.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return x;
}

double to_double(const Rational& q) { return mpq_get_d(q.get_mpq_t()); }

double to_double(const BigFloat& x) { return mpfr_get_d(x.backend().data(), MPFR_RNDN); }

double to_double(const Integer& z) { return mpz_get_d(z.get_mpz_t()); }

Rational to_rational(const BigFloat& x) {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), x.backend().data());
    return q;
}

double log_abs(const Integer& z) {
    if (z == 0) return -INFINITY;
    long e = 0;
    double m = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

}  // namespace iet
