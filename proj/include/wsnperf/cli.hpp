#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wsnperf::cli {

enum class Quantity {
    none, length, frequency, rate, time, power, energy, bytes, voltage, current, capacitance
};

/// "100m", "250kbps", "2.4 GHz", "1e-3"; returns SI base units.
/// Throws ValidationError for an unknown suffix or a malformed number.
double parse_quantity(std::string_view text, Quantity quantity);

/// Human-readable suffix table, as shown in --help.
std::string unit_table();

/// Runs one invocation; `args` excludes the program name. Returns the exit code:
/// 0 success, 1 domain or computation error, 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsnperf::cli
