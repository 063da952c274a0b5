#include <doctest.h>

#include <wsnperf/cli.hpp>
#include <wsnperf/error.hpp>
#include <wsnperf/metric_table.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace wsnperf;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("wsnperf_test_" + name);
}

double first_value(const std::string& text) {
    const auto eq = text.find(" = ");
    return std::stod(text.substr(eq + 3));
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int count_lines_starting(const std::string& text, const std::vector<std::string>& prefixes) {
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        for (const auto& p : prefixes) {
            if (line.rfind(p, 0) == 0) ++n;
        }
    }
    return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("unit parsing") {
    CHECK(cli::parse_quantity("100m", cli::Quantity::length) == 100);
    CHECK(cli::parse_quantity("2 km", cli::Quantity::length) == 2000);
    CHECK(cli::parse_quantity("250kbps", cli::Quantity::rate) == 250000);
    CHECK(cli::parse_quantity("54 Mbps", cli::Quantity::rate) == 54e6);
    CHECK(cli::parse_quantity("2.4GHz", cli::Quantity::frequency) == 2.4e9);
    CHECK(cli::parse_quantity("11.39ms", cli::Quantity::time) == doctest::Approx(11.39e-3).epsilon(1e-15));
    CHECK(cli::parse_quantity("0.67nF", cli::Quantity::capacitance) == doctest::Approx(0.67e-9).epsilon(1e-15));
    CHECK(cli::parse_quantity("1e-3", cli::Quantity::none) == 1e-3);
    CHECK(cli::parse_quantity("50nJ", cli::Quantity::energy) == doctest::Approx(50e-9).epsilon(1e-15));
    CHECK_THROWS_AS(cli::parse_quantity("10 parsecs", cli::Quantity::length), ValidationError);
    CHECK_THROWS_AS(cli::parse_quantity("abc", cli::Quantity::length), ValidationError);
    CHECK_THROWS_AS(cli::parse_quantity("5m", cli::Quantity::none), ValidationError);
    CHECK(cli::unit_table().find("kbps") != std::string::npos);
}

TEST_CASE("list") {
    const auto r = run({"list"});
    CHECK(r.code == 0);
    const std::vector<std::string> names{"Bluetooth ", "UWB ", "ZigBee ", "Wi-Fi ", "Wi-Max ", "GPRS "};
    CHECK(count_lines_starting(r.out.substr(0, r.out.find("\n\n")), names) == 6);
    std::istringstream in(r.out);
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
        if (line.rfind("ZigBee ", 0) == 0 && line.find("0.25 Mb/s") != std::string::npos &&
            line.find("102") != std::string::npos && line.find("31") != std::string::npos) {
            found = true;
            break;
        }
    }
    CHECK(found);
    const auto j = nlohmann::json::parse(run({"list", "--json"}).out);
    CHECK(j["protocols"].size() == 6);
}

TEST_CASE("list with a custom registry, by flag and by environment") {
    const auto path = temp_file("custom.tsv");
    std::ofstream(path) << "[protocols]\nLoRa\t0.005\t200\t222\t13\t868e6\t0.025\t1000\tStar\tStar of stars\n";
    auto r = run({"list", "--registry", path.string()});
    CHECK(r.code == 0);
    CHECK(count_lines_starting(r.out.substr(0, r.out.find("\n\n")),
                               {"Bluetooth ", "UWB ", "ZigBee ", "Wi-Fi ", "Wi-Max ", "GPRS ", "LoRa "}) == 7);
    ::setenv("WSNPERF_REGISTRY", path.string().c_str(), 1);
    CHECK(nlohmann::json::parse(run({"list", "--json"}).out)["protocols"].size() == 7);
    CHECK(run({"list", "--registry", "/nonexistent/missing.tsv"}).code == 2);
    ::unsetenv("WSNPERF_REGISTRY");
    r = run({"list", "--registry", "/nonexistent/missing.tsv"});
    CHECK(r.code == 2);
    CHECK(r.err.find("missing.tsv") != std::string::npos);
    std::ofstream(path) << "[protocols]\nBroken\tx\n";
    CHECK(run({"list", "--registry", path.string()}).code == 2);
    std::filesystem::remove(path);
}

TEST_CASE("metric examples") {
    auto r = run({"metric", "coding-eff", "--protocol", "bluetooth", "--size", "10000"});
    CHECK(r.code == 0);
    CHECK(std::abs(first_value(r.out) - 94.41) < 0.005);
    CHECK(r.out.find("%") != std::string::npos);
    r = run({"metric", "packet-error", "--ber", "0", "--length", "1000"});
    CHECK(r.code == 0);
    CHECK(first_value(r.out) == 0.0);
    r = run({"metric", "tx-energy", "--k", "1000", "--distance", "100"});
    CHECK(r.code == 0);
    CHECK(first_value(r.out) == doctest::Approx(1.8e-4).epsilon(1e-12));
    CHECK(r.out.find(" J\n") != std::string::npos);
    r = run({"metric", "tx-energy", "--k", "1000", "--distance", "0.1km"});
    CHECK(first_value(r.out) == doctest::Approx(1.8e-4).epsilon(1e-12));
}

TEST_CASE("every metric evaluates") {
    const std::vector<std::vector<std::string>> calls{
        {"metric", "tx-time", "--protocol", "uwb", "--size", "10000"},
        {"metric", "friis-power", "--distance", "100m"},
        {"metric", "friis-range", "--sensitivity", "1nW", "--frequency", "2.4GHz"},
        {"metric", "rx-power", "--protocol", "zigbee", "--distance", "300"},
        {"metric", "chipset-power", "--protocol", "gprs", "--direction", "rx"},
        {"metric", "norm-energy", "--protocol", "uwb"},
        {"metric", "energy-index", "--length", "1016", "--ber", "1e-3"},
        {"metric", "optimal-length", "--ber", "1e-3"},
        {"metric", "mcu-energy", "--cycles", "1000000"},
        {"metric", "ber", "--modulation", "8dpsk", "--ebn0", "4"},
        {"metric", "required-ebn0", "--modulation", "gmsk"},
        {"metric", "throughput", "--size", "512", "--frame-time", "11.39ms"},
    };
    for (const auto& c : calls) {
        const auto r = run(c);
        CHECK_MESSAGE(r.code == 0, c[1], ": ", r.err);
    }
    CHECK(std::abs(first_value(run(calls.back()).out) - 44951) < 1);
    CHECK(std::abs(first_value(run(calls[2]).out) - 314.3) < 0.1);
}

TEST_CASE("metric json echoes inputs and matches csv") {
    const std::vector<std::string> base{"metric", "mcu-energy", "--cycles", "1000000", "--clock", "8MHz"};
    auto json_args = base;
    json_args.push_back("--json");
    auto csv_args = base;
    csv_args.insert(csv_args.end(), {"--format", "csv"});
    const auto j = nlohmann::json::parse(run(json_args).out);
    CHECK(j["inputs"]["metric"] == "mcu-energy");
    CHECK(j["inputs"]["clock"] == "8MHz");
    const auto t = parse_csv(run(csv_args).out);
    for (std::size_t c = 0; c < t.columns.size(); ++c) CHECK(j["rows"][0][c].get<double>() == t.rows[0][c]);
}

TEST_CASE("usage errors exit 2, domain errors exit 1") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    auto r = run({"metric", "coding-eff", "--protocol", "bluetooth"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--size") != std::string::npos);
    CHECK(run({"metric", "coding-eff", "--protocol", "bluetooth", "--size", "10", "--bogus", "1"}).code == 2);
    CHECK(run({"metric", "coding-eff", "--protocol", "bluetooth", "--size", "10", "--distance", "1"}).code == 2);
    CHECK(run({"metric", "nonsense"}).code == 2);
    CHECK(run({"metric", "coding-eff", "--protocol", "lora", "--size", "10"}).code == 2);
    CHECK(run({"metric", "friis-power", "--distance", "10 parsecs"}).code == 2);
    CHECK(run({"metric", "friis-power", "--distance", "0"}).code == 1);
    CHECK(run({"metric", "required-ebn0", "--modulation", "fsk", "--target", "0.7"}).code == 1);
    r = run({"sweep", "fig99"});
    CHECK(r.code == 2);
    CHECK(r.err.find("fig13") != std::string::npos);
    CHECK(run({"sweep", "fig8", "--monte-carlo"}).code == 2);
    CHECK(run({"sweep", "fig10", "--set", "tx_power=1"}).code == 2);
    CHECK(run({"recommend", "--rate", "1000"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"sweep", "--help"}).code == 0);
}

TEST_CASE("sweep output, round trip and json agreement") {
    const auto path = temp_file("fig9.csv");
    auto r = run({"sweep", "fig9", "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const std::string csv = slurp(path);
    CHECK(csv.rfind("# figure: fig9\n", 0) == 0);
    const auto t = parse_csv(csv);
    CHECK(to_csv(t) == csv);
    const auto sizes = t.column("data_size");
    const auto row = static_cast<std::size_t>(std::find(sizes.begin(), sizes.end(), 10000.0) - sizes.begin());
    REQUIRE(row < sizes.size());
    CHECK(std::abs(t.column("Bluetooth")[row] - 94.41) < 0.005);
    const auto j = nlohmann::json::parse(run({"sweep", "fig9", "--json"}).out);
    REQUIRE(j["rows"].size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) CHECK(j["rows"][i][c].get<double>() == t.rows[i][c]);
    }
    CHECK(j["columns"][1]["name"] == "Bluetooth");
    CHECK(j["columns"][1]["unit"] == "%");
    std::filesystem::remove(path);
}

TEST_CASE("sweep axis and parameter flags") {
    auto t = parse_csv(run({"sweep", "fig4", "--start", "10m", "--stop", "20m", "--step", "5", "--set",
                            "packet_bits=1000"}).out);
    CHECK(t.column("distance") == std::vector<double>{10, 15, 20});
    REQUIRE(t.columns.size() == 2);
    t = parse_csv(run({"sweep", "fig12", "--values", "0,5ms,50ms", "--set", "data_bytes=512"}).out);
    CHECK(t.rows.size() == 3);
    CHECK(t.rows[2][1] < t.rows[1][1]);
    t = parse_csv(run({"sweep", "fig5", "--points", "4", "--select", "zigbee,gprs"}).out);
    CHECK(t.rows.size() == 4);
    CHECK(t.columns.size() == 3);
    CHECK(run({"sweep", "fig6", "--start", "1"}).code == 2);
}

TEST_CASE("fig8 Monte Carlo output is byte-identical across runs and thread counts") {
    const auto a = run({"sweep", "fig8", "--monte-carlo", "--seed", "7", "--set", "mc_bits=20000"});
    const auto b = run({"sweep", "fig8", "--monte-carlo", "--seed", "7", "--set", "mc_bits=20000", "--threads", "3"});
    const auto c = run({"sweep", "fig8", "--monte-carlo", "--seed", "7", "--set", "mc_bits=20000", "--isa", "scalar"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(a.out.find("# seed: 7") != std::string::npos);
}

TEST_CASE("compare") {
    const auto golden = temp_file("golden.csv");
    const auto actual = temp_file("actual.csv");
    std::ofstream(golden) << run({"sweep", "fig10"}).out;
    CHECK(run({"compare", golden.string()}).code == 0);
    auto t = parse_csv(slurp(golden));
    t.rows[5][1] *= 1.01;
    std::ofstream(actual) << to_csv(t);
    auto r = run({"compare", golden.string(), actual.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL row 6") != std::string::npos);
    CHECK(run({"compare", golden.string(), actual.string(), "--tol", "0.02"}).code == 0);
    CHECK(run({"compare", golden.string(), actual.string(), "--tol-column",
               t.columns[1].name + "=0.02"}).code == 0);
    t.rows.pop_back();
    std::ofstream(actual) << to_csv(t);
    CHECK(run({"compare", golden.string(), actual.string()}).code == 2);
    std::filesystem::remove(golden);
    std::filesystem::remove(actual);
}

TEST_CASE("recommend examples") {
    auto first = [](const std::string& json) {
        return nlohmann::json::parse(json)["ranking"][0]["protocol"].get<std::string>();
    };
    auto r = run({"recommend", "--rate", "20000", "--range", "50", "--battery", "--json"});
    CHECK(r.code == 0);
    const auto top = first(r.out);
    CHECK((top == "ZigBee" || top == "Bluetooth"));
    const auto j = nlohmann::json::parse(run({"recommend", "--rate", "50000000", "--range", "30", "--json"}).out);
    std::set<std::string> three;
    for (int i = 0; i < 3; ++i) three.insert(j["ranking"][i]["protocol"].get<std::string>());
    CHECK(three == std::set<std::string>{"UWB", "Wi-Fi", "Wi-Max"});
    CHECK(first(run({"recommend", "--rate", "20kbps", "--range", "10km", "--json"}).out) == "GPRS");
    r = run({"recommend", "--rate", "20000", "--range", "50", "--battery", "--class", "tracking", "--size", "64B"});
    CHECK(r.code == 0);
    CHECK(r.out.find("note:") != std::string::npos);
    CHECK(run({"recommend", "--rate", "20000", "--range", "50", "--class", "gardening"}).code == 2);
}

}
