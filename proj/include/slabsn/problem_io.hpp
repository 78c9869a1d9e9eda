#pragma once

#include <filesystem>
#include <string>

#include "slabsn/problem.hpp"

namespace slabsn {

/// Reads and validates a problem file. The format is JSON (comments allowed)
/// with top-level sections "geometry", "materials" and "solver"; see
/// docs/input_format.md for every field.
Problem load_problem(const std::filesystem::path& path);

/// Same as load_problem, from an in-memory document.
Problem parse_problem(const std::string& text);

/// Canonical JSON form; parse_problem(serialize_problem(p)) == p.
std::string serialize_problem(const Problem& problem);

}  // namespace slabsn
