#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fairtransport/errors.hpp"

namespace fairtransport {

/// Exact decimal rational: value = mantissa * 10^-scale.
///
/// Thresholds and data facts are compared exactly, so entailment results do
/// not depend on binary-float rounding. Normalized form: scale is minimal
/// (mantissa has no trailing zeros unless the value is 0, which is {0, 0}).
/// At most 18 significant digits; parsing rejects anything longer.
class Decimal {
public:
    Decimal() = default;
    Decimal(std::int64_t mantissa, std::int32_t scale);

    static Decimal parse(std::string_view text);  // throws ValidationError

    std::int64_t mantissa() const { return mant_; }
    std::int32_t scale() const { return scale_; }

    std::string to_string() const;  // canonical: "-12.5", "30000", "0"
    double to_double() const;

    friend bool operator==(const Decimal& a, const Decimal& b) {
        return a.mant_ == b.mant_ && a.scale_ == b.scale_;
    }
    friend bool operator!=(const Decimal& a, const Decimal& b) { return !(a == b); }
    friend bool operator<(const Decimal& a, const Decimal& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const Decimal& a, const Decimal& b) { return cmp(a, b) <= 0; }
    friend bool operator>(const Decimal& a, const Decimal& b) { return cmp(a, b) > 0; }
    friend bool operator>=(const Decimal& a, const Decimal& b) { return cmp(a, b) >= 0; }

private:
    static int cmp(const Decimal& a, const Decimal& b);
    void normalize();

    std::int64_t mant_ = 0;
    std::int32_t scale_ = 0;
};

}  // namespace fairtransport
