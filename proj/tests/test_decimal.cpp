#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fairtransport/decimal.hpp"
#include "fairtransport/errors.hpp"

using fairtransport::Decimal;
using fairtransport::ValidationError;

TEST_CASE("parse and canonical print") {
    CHECK(Decimal::parse("30000").to_string() == "30000");
    CHECK(Decimal::parse("30000.0").to_string() == "30000");
    CHECK(Decimal::parse("29999.5").to_string() == "29999.5");
    CHECK(Decimal::parse("-12.50").to_string() == "-12.5");
    CHECK(Decimal::parse("0").to_string() == "0");
    CHECK(Decimal::parse("-0").to_string() == "0");
    CHECK(Decimal::parse("0.001").to_string() == "0.001");
    CHECK(Decimal::parse(".5").to_string() == "0.5");
    CHECK(Decimal::parse("+7.").to_string() == "7");
}

TEST_CASE("exact comparison across scales") {
    CHECK(Decimal::parse("29999.5") < Decimal::parse("30000"));
    CHECK(Decimal::parse("30000") >= Decimal::parse("30000.000"));
    CHECK(Decimal::parse("30000") == Decimal::parse("30000.000"));
    CHECK(Decimal::parse("-1.5") < Decimal::parse("-1.4999"));
    CHECK(Decimal::parse("0.1") > Decimal::parse("0.09999999"));
    CHECK(Decimal::parse("0.3") == Decimal::parse("0.30"));
}

TEST_CASE("rejects malformed input") {
    CHECK_THROWS_AS(Decimal::parse(""), ValidationError);
    CHECK_THROWS_AS(Decimal::parse("-"), ValidationError);
    CHECK_THROWS_AS(Decimal::parse("."), ValidationError);
    CHECK_THROWS_AS(Decimal::parse("1.2.3"), ValidationError);
    CHECK_THROWS_AS(Decimal::parse("1e5"), ValidationError);
    CHECK_THROWS_AS(Decimal::parse("12a"), ValidationError);
    CHECK_THROWS_AS(Decimal::parse("12345678901234567890"), ValidationError);
}

TEST_CASE("round-trip parse(print(x)) is identity") {
    for (const char* text : {"1", "-1", "0.5", "123.456", "-0.0001", "999999999999999999"}) {
        const Decimal d = Decimal::parse(text);
        CHECK(Decimal::parse(d.to_string()) == d);
    }
}
