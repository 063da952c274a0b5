#include <doctest.h>

#include <wsnperf/advisor.hpp>
#include <wsnperf/energymodel.hpp>
#include <wsnperf/error.hpp>
#include <wsnperf/registry.hpp>

#include <algorithm>
#include <random>
#include <set>

using namespace wsnperf;

namespace {

ApplicationProfile profile(double rate, double range, bool battery) {
    ApplicationProfile p;
    p.required_data_rate_bps = rate;
    p.required_range_m = range;
    p.battery_constrained = battery;
    return p;
}

std::vector<std::string> order(const Recommendation& r) {
    std::vector<std::string> out;
    for (const auto& x : r.ranking) out.push_back(x.name);
    return out;
}

}  // namespace

TEST_SUITE("advisor") {

TEST_CASE("low rate battery node: ZigBee and Bluetooth on top") {
    const auto reg = load_registry();
    for (double rate : {1000.0, 20000.0, 250000.0}) {
        for (double range : {5.0, 10.0, 20.0}) {
            const auto names = order(recommend(profile(rate, range, true), reg));
            const std::set<std::string> top(names.begin(), names.begin() + 2);
            CHECK_MESSAGE((top == std::set<std::string>{"ZigBee", "Bluetooth"}), rate, " b/s ", range, " m");
        }
    }
}

TEST_CASE("high rate: only UWB, Wi-Fi, Wi-Max survive") {
    const auto rec = recommend(profile(50e6, 30, false), load_registry());
    const std::set<std::string> top{rec.ranking[0].name, rec.ranking[1].name, rec.ranking[2].name};
    CHECK(top == std::set<std::string>{"UWB", "Wi-Fi", "Wi-Max"});
    for (const auto& r : rec.ranking) {
        const bool fast = top.contains(r.name);
        CHECK(r.rate_feasible == fast);
        if (!fast) CHECK(r.score == 0.0);
    }
}

TEST_CASE("wide area low rate: GPRS first") {
    for (double range : {5000.0, 10000.0, 30000.0}) {
        CHECK(recommend(profile(20000, range, false), load_registry()).ranking.front().name == "GPRS");
    }
}

TEST_CASE("profile validation and notes") {
    const auto reg = load_registry();
    CHECK_THROWS_AS(recommend(profile(0, 10, false), reg), ValidationError);
    CHECK_THROWS_AS(recommend(profile(10, 0, false), reg), ValidationError);
    auto p = profile(1000, 10, true);
    p.data_size_per_message = 0;
    CHECK_THROWS_AS(recommend(p, reg), ValidationError);
    CHECK_THROWS(recommend(profile(1000, 10, true), ProtocolRegistry{}));
    p = profile(1000, 10, true);
    p.application_class = ApplicationClass::tracking;
    CHECK_FALSE(recommend(p, reg).notes.empty());
    CHECK(parse_application_class("event-detection") == ApplicationClass::event_detection);
}

TEST_CASE("property: structure, hard filter and determinism over random profiles") {
    const auto reg = load_registry();
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> lograte(2, 8.5), logrange(0, 4.5);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 300; ++i) {
        auto p = profile(std::pow(10.0, lograte(rng)), std::pow(10.0, logrange(rng)), coin(rng));
        const auto rec = recommend(p, reg);
        REQUIRE(rec.ranking.size() == reg.size());
        std::set<std::string> seen;
        for (std::size_t k = 0; k < rec.ranking.size(); ++k) {
            const auto& r = rec.ranking[k];
            seen.insert(r.name);
            CHECK(r.score >= 0.0);
            CHECK(r.score <= 1.0);
            if (k) CHECK(rec.ranking[k - 1].score >= r.score);
            if (r.score > 0) CHECK(reg.protocol(r.name).max_data_rate_bps() >= p.required_data_rate_bps);
        }
        CHECK(seen.size() == reg.size());
        CHECK(order(recommend(p, reg)) == order(rec));
    }
}

TEST_CASE("property: among otherwise identical protocols, lower normalized energy ranks higher") {
    auto reg = load_registry();
    const auto base = reg.protocol("ZigBee");
    const auto chip = *reg.chipset("ZigBee");
    for (int i = 0; i < 3; ++i) {
        ProtocolSpec p = base;
        p.name = "Clone" + std::to_string(i);
        reg.upsert(p);
        ChipsetSpec c = chip;
        c.protocol_name = p.name;
        c.tx_current_ma = chip.tx_current_ma * (1.5 + i);
        c.rx_current_ma = chip.rx_current_ma * (1.5 + i);
        reg.attach_chipset(c);
    }
    for (bool battery : {true, false}) {
        const auto names = order(recommend(profile(20000, 10, battery), reg));
        auto pos = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) - names.begin(); };
        CHECK(pos("ZigBee") < pos("Clone0"));
        CHECK(pos("Clone0") < pos("Clone1"));
        CHECK(pos("Clone1") < pos("Clone2"));
    }
}

}
