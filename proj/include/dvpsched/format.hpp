#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dvpsched {

/// Shortest decimal that round-trips to the same double.
std::string format_real(double v);

/// Probability rendering used in reports and CSV: 10 significant digits,
/// scientific notation below 1e-4.
std::string format_probability(double v);

/// 12 significant digits, used by the policy table file.
std::string format_value12(double v);

std::string join_ints(std::span<const int> values, std::string_view sep = ",");
std::string join_reals(std::span<const double> values, std::string_view sep = ",");

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Strict parsers: the whole token must be consumed.
bool parse_int(std::string_view token, int& out);
bool parse_u64(std::string_view token, unsigned long long& out);
bool parse_double(std::string_view token, double& out);

/// Integer list "2,2,3" or "2 2 3"; throws DomainError on junk.
std::vector<int> parse_int_list(std::string_view text);

}  // namespace dvpsched
