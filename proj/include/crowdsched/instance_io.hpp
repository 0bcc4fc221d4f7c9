#pragma once

#include <filesystem>
#include <iosfwd>

#include "crowdsched/core.hpp"

namespace crowdsched {

// Instance files are JSON objects:
//   {"m": 2, "n": 3, "phi": [1, 2], "weights": [4, 1, 1],
//    "rst": [[4, 2, 3], [4, 2, 3]]}
// `m` and `n` must agree with the array lengths. Numbers are written with
// the shortest representation that parses back to the same double.

Instance read_instance(std::istream& in);
void write_instance(std::ostream& out, const Instance& instance);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const Instance& instance);

}  // namespace crowdsched
