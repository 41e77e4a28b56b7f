// Deterministic, seeded generators for the three benchmark log families.
#pragma once

#include <cstdint>
#include <stdexcept>

#include "ptdmon/model.hpp"

namespace ptdmon::benchgen {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Benchmark { Copy, Dominant, Periodic };

struct GenConfig {
    Benchmark benchmark = Benchmark::Copy;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    // dominant
    unsigned users = 3;
    long min_amount = 1, max_amount = 100;
    // copy
    unsigned max_gap = 5;          // base update gaps, uniform on {1..max_gap}
    unsigned max_echo_delay = 3;   // echo to "b" after uniform {1..max_echo_delay}
    unsigned echo_percent = 90;    // chance that a non-b update is echoed
};

model::TimedDataWord generate(const GenConfig& cfg);

}  // namespace ptdmon::benchgen
