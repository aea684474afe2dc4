#pragma once

#include <map>
#include <string>

namespace heis {

/// Parse a `key = value` config file.  Lines starting with '#' and blank
/// lines are ignored.  Throws std::invalid_argument naming the offending line.
std::map<std::string, std::string> parse_kv_file(const std::string& path);

/// Parse `key = value` text given directly (used by tests).
std::map<std::string, std::string> parse_kv_text(const std::string& text, const std::string& origin);

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key, double fallback);
long long kv_int(const std::map<std::string, std::string>& kv, const std::string& key, long long fallback);

}  // namespace heis
