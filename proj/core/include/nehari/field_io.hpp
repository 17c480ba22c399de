#pragma once

#include <filesystem>

#include "nehari/grid.hpp"

namespace nehari {

// Writes one row per interior node in lexicographic node order:
// coordinates then value, all with 17 significant digits.  The header is
// "x,value", "x,y,value", or "x,y,z,value" depending on the dimension.
void write_field_csv(const Field& u, const std::filesystem::path& file);

}  // namespace nehari
