#include "meadowprob/stalk.hpp"

#include "meadowprob/errors.hpp"

#include <cctype>
#include <ostream>

namespace meadowprob {

Stalk::Stalk(long num, long den) {
    if (den == 0) throw Error("rational constructed with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Stalk::Stalk(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Stalk Stalk::from_string(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) throw Error("invalid rational literal: '" + std::string(text) + "'");

    mpq_class value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw Error("invalid rational literal: '" + std::string(text) + "'");
        mpz_class d{std::string(den)};
        if (sgn(d) == 0) throw Error("rational literal with zero denominator: '" + std::string(text) + "'");
        value = mpq_class(mpz_class{std::string(num)}, d);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view whole = s.substr(0, dot), frac = s.substr(dot + 1);
        if (!all_digits(whole) || !all_digits(frac))
            throw Error("invalid rational literal: '" + std::string(text) + "'");
        mpz_class scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        mpz_class numerator = mpz_class{std::string(whole)} * scale + mpz_class{std::string(frac)};
        value = mpq_class(numerator, scale);
    } else {
        if (!all_digits(s)) throw Error("invalid rational literal: '" + std::string(text) + "'");
        value = mpq_class(mpz_class{std::string(s)});
    }
    if (negative) value = -value;
    return Stalk(std::move(value));
}

std::string Stalk::str() const {
    if (den() == 1) return num().get_str();
    return num().get_str() + "/" + den().get_str();
}

Stalk inv(const Stalk& a) {
    if (a.is_zero()) return Stalk();
    return Stalk(mpq_class(a.den(), a.num()));
}

Stalk div(const Stalk& a, const Stalk& b) { return a * inv(b); }

Stalk sign(const Stalk& a) { return Stalk(a.signum()); }

Stalk one_ind(const Stalk& a) { return a * inv(a); }

Stalk zero_ind(const Stalk& a) { return Stalk(1) - one_ind(a); }

bool le(const Stalk& a, const Stalk& b) {
    return sign(add(sign(sub(b, a)), Stalk(1))) == Stalk(1);
}

bool lt(const Stalk& a, const Stalk& b) { return sign(sub(b, a)) == Stalk(1); }

std::ostream& operator<<(std::ostream& os, const Stalk& s) { return os << s.str(); }

} // namespace meadowprob
