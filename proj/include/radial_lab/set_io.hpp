#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "radial_lab/dyadic_core.hpp"
#include "radial_lab/incidence.hpp"

namespace radial_lab {

// Text formats: a header line "DSET1 n=<level>" (cubes) or "TSET1 n=<level>"
// (tubes, by parameter cell), then one "i j" pair per line. Blank lines are
// ignored. Writers emit members in canonical order so a load/save round trip
// reproduces the file byte for byte.

void write_cube_set(std::ostream& out, const CubeSet& s);
void write_tube_set(std::ostream& out, const TubeSet& ts);

/// Throws ParseError (with the 1-based line) on a bad header, malformed or
/// out-of-range pairs, or duplicates.
CubeSet read_cube_set(std::istream& in);
TubeSet read_tube_set(std::istream& in);

void save_set(const std::filesystem::path& path, const CubeSet& s);
void save_set(const std::filesystem::path& path, const TubeSet& ts);
CubeSet load_cube_set(const std::filesystem::path& path);
TubeSet load_tube_set(const std::filesystem::path& path);

}  // namespace radial_lab
