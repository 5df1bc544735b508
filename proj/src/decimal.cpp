#include "fairtransport/decimal.hpp"

#include <array>
#include <cctype>

namespace fairtransport {

namespace {

constexpr std::array<std::int64_t, 19> kPow10 = {
    1LL,
    10LL,
    100LL,
    1000LL,
    10000LL,
    100000LL,
    1000000LL,
    10000000LL,
    100000000LL,
    1000000000LL,
    10000000000LL,
    100000000000LL,
    1000000000000LL,
    10000000000000LL,
    100000000000000LL,
    1000000000000000LL,
    10000000000000000LL,
    100000000000000000LL,
    1000000000000000000LL,
};

constexpr std::int64_t kMantLimit = 1000000000000000000LL;  // 10^18

}  // namespace

Decimal::Decimal(std::int64_t mantissa, std::int32_t scale) : mant_(mantissa), scale_(scale) {
    if (scale < 0 || scale > 18) {
        throw ValidationError("decimal scale out of range");
    }
    normalize();
}

void Decimal::normalize() {
    if (mant_ == 0) {
        scale_ = 0;
        return;
    }
    while (scale_ > 0 && mant_ % 10 == 0) {
        mant_ /= 10;
        --scale_;
    }
}

Decimal Decimal::parse(std::string_view text) {
    const auto fail = [&] { throw ValidationError("malformed decimal '" + std::string(text) + "'"); };

    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = (text[i] == '-');
        ++i;
    }

    std::int64_t mant = 0;
    std::int32_t scale = 0;
    int digit_count = 0;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            if (seen_dot) fail();
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) fail();
        ++digit_count;
        if (mant >= kMantLimit / 10) {
            throw ValidationError("decimal exceeds 18 significant digits: '" + std::string(text) + "'");
        }
        mant = mant * 10 + (c - '0');
        if (seen_dot) ++scale;
    }
    if (digit_count == 0) fail();
    if (negative) mant = -mant;

    Decimal d;
    d.mant_ = mant;
    d.scale_ = scale;
    d.normalize();
    return d;
}

int Decimal::cmp(const Decimal& a, const Decimal& b) {
    // Cross-scale compare without rounding: widen to 128 bits.
    const __int128 lhs = static_cast<__int128>(a.mant_) * kPow10[static_cast<std::size_t>(b.scale_)];
    const __int128 rhs = static_cast<__int128>(b.mant_) * kPow10[static_cast<std::size_t>(a.scale_)];
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

std::string Decimal::to_string() const {
    std::string digits = std::to_string(mant_ < 0 ? -mant_ : mant_);
    if (scale_ > 0) {
        if (static_cast<std::int32_t>(digits.size()) <= scale_) {
            digits.insert(0, static_cast<std::size_t>(scale_) + 1 - digits.size(), '0');
        }
        digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
    }
    return (mant_ < 0 ? "-" : "") + digits;
}

double Decimal::to_double() const {
    return static_cast<double>(mant_) / static_cast<double>(kPow10[static_cast<std::size_t>(scale_)]);
}

}  // namespace fairtransport
