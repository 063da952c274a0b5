#include <doctest.h>

#include <wsnperf/error.hpp>
#include <wsnperf/rational.hpp>
#include <wsnperf/registry.hpp>

#include <cmath>
#include <random>

using namespace wsnperf;

TEST_SUITE("registry") {

TEST_CASE("rational parsing and arithmetic") {
    CHECK(Rational::parse("158/8") == Rational(79, 4));
    CHECK(Rational::parse("19.75") == Rational(79, 4));
    CHECK(Rational::parse("31") == Rational(31));
    CHECK(Rational::parse("158/8").to_string() == "79/4");
    CHECK(Rational(79, 4) * Rational(30) == Rational(1185, 2));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK_THROWS(Rational::parse("1/0"));
    CHECK_THROWS(Rational::parse("abc"));
}

TEST_CASE("default registry contents") {
    const auto reg = load_registry();
    REQUIRE(reg.size() == 6);
    const auto& z = reg.protocol("ZigBee");
    CHECK(z.max_payload_bytes == 102);
    CHECK(z.overhead_bytes == Rational(31));
    CHECK(z.bit_time_us == 4.0);
    CHECK(reg.protocol("Bluetooth").overhead_bytes.to_double() == 19.75);
    CHECK(reg.protocol("GPRS").max_data_rate_mbps == 0.168);
    CHECK(reg.names() == std::vector<std::string>{"Bluetooth", "UWB", "ZigBee", "Wi-Fi", "Wi-Max", "GPRS"});
    for (const auto& e : reg.entries()) {
        CHECK_NOTHROW(validate(e.protocol));
        REQUIRE(e.chipset.has_value());
        CHECK_NOTHROW(validate(*e.chipset));
    }
}

TEST_CASE("lookup is case-insensitive and lists names on failure") {
    const auto reg = load_registry();
    CHECK(get_protocol(reg, "zigbee").name == "ZigBee");
    CHECK(get_protocol(reg, "wifi").name == "Wi-Fi");
    CHECK(get_protocol(reg, "GPRS").max_data_rate_mbps == 0.168);
    try {
        get_protocol(reg, "LoRa");
        FAIL("expected UnknownNameError");
    } catch (const UnknownNameError& e) {
        CHECK(std::string(e.what()).find("ZigBee") != std::string::npos);
    }
}

TEST_CASE("reciprocity violation is rejected") {
    const char* doc = "[protocols]\nFoo\t0.5\t1\t100\t10\t2.4e9\t0.1\t8\tStar\tMesh\n";
    CHECK_THROWS_AS(parse_registry(doc), ValidationError);
}

TEST_CASE("parse errors carry the line") {
    const char* doc = "[protocols]\nFoo\t0.5\t2\tnot-a-number\t10\t2.4e9\t0.1\t8\tStar\tMesh\n";
    try {
        parse_registry(doc);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("serialize and reload round trip") {
    const auto reg = load_registry();
    CHECK(parse_registry(serialize_registry(reg)) == reg);
}

TEST_CASE("overriding one protocol leaves the others bit-identical") {
    const auto base = load_registry();
    const auto reg = load_registry("[protocols]\nZigBee\t0.25\t4\t127\t31\t2.4e9\t0.001\t65000\tStar\tMesh\n");
    REQUIRE(reg.size() == 6);
    CHECK(reg.protocol("ZigBee").max_payload_bytes == 127);
    for (const auto& e : base.entries()) {
        if (e.protocol.name == "ZigBee") continue;
        CHECK(reg.entry(e.protocol.name) == e);
    }
    const auto extended = load_registry("[protocols]\nLoRa\t0.005\t200\t222\t13\t868e6\t0.025\t1000\tStar\tStar of stars\n");
    CHECK(extended.size() == 7);
}

TEST_CASE("property: random valid protocols round trip through the document format") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rate(0.01, 500.0);
    std::uniform_int_distribution<int> payload(1, 5000), overhead(0, 200);
    for (int i = 0; i < 50; ++i) {
        ProtocolRegistry reg;
        ProtocolSpec p;
        p.name = "P" + std::to_string(i);
        p.max_data_rate_mbps = rate(rng);
        p.bit_time_us = 1.0 / p.max_data_rate_mbps;
        p.max_payload_bytes = payload(rng);
        p.overhead_bytes = Rational(overhead(rng), 1 + i % 8);
        p.carrier_frequency_hz = 2.4e9;
        p.tx_power_w = 0.1;
        p.max_cell_nodes = 8;
        p.basic_cell = "Star";
        p.cell_extension = "Mesh";
        reg.upsert(p);
        CHECK(parse_registry(serialize_registry(reg)) == reg);
    }
}

}
