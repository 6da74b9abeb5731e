#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "edcps/sim.hpp"

namespace edcps::cli {

/// Parses a TOML scenario. Every value the TOML leaves out takes the
/// library default. Failures throw Error(kParse) with the source line and
/// the dotted field path, e.g. "s2.toml:41: lines[1].converter.r_dc: must be > 0".
MidcScenario parse_scenario(std::string_view text, std::string_view source_name = "<input>");
MidcScenario load_scenario(const std::filesystem::path& path);

/// Writes every field explicitly, so parse(serialize(s)) == s.
std::string serialize_scenario(const MidcScenario& scenario);

/// Returns a copy of the scenario with one numeric field overridden.
/// Paths follow the TOML layout ("receiving.k_gov", "lines.2.droop.k_droop");
/// a "*" array index applies the value to every element. A value of the
/// form "30:25:29" assigns element-wise over a "*" index.
MidcScenario with_field(const MidcScenario& scenario, std::string_view path,
                        std::string_view value);

}  // namespace edcps::cli
