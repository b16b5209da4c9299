// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace spkaug {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
/// captured and rethrown (first by index) after all tasks finish, so partial
/// failures cannot tear down sibling tasks.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

unsigned default_workers();

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

/// Alpha rendered at the 2-decimal precision used in pseudo-speaker ids.
std::string format_alpha2(double alpha);

/// Shortest %g-style rendering with enough digits to round-trip curve CSVs.
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace spkaug
