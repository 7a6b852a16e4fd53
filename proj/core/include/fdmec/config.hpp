#pragma once

#include "fdmec/admm.hpp"
#include "fdmec/baselines.hpp"
#include "fdmec/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdmec {

// Optional [sweep] block of a run configuration.
struct SweepSection {
    bool present = false;
    SweepParam param = SweepParam::UserPairs;
    std::vector<double> grid = {2, 4, 6, 8, 10, 12};
    std::size_t seeds = 20;
    std::uint64_t base_seed = 1;
    std::vector<SchemeId> schemes = {SchemeId::Proposed, SchemeId::Scheme1FdOnly,
                                     SchemeId::Scheme2CacheOnly};
};

struct RunConfig {
    ScenarioConfig scenario;
    AdmmConfig solver;
    SweepSection sweep;
};

// Parses TOML-style text: [section] headers, key = value lines, # comments.
// Values are numbers, booleans, quoted strings, or flat arrays. Unknown
// sections or keys and malformed values raise ValidationError carrying
// <source>:<line> positions.
RunConfig parse_config(const std::string& text, const std::string& source_name = "config");

// Reads and parses a file; missing or unreadable files raise IoError.
RunConfig load_config(const std::string& path);

// Every setting with its default value, as parseable config text.
std::string default_config_text();

} // namespace fdmec
