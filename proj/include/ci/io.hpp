#pragma once

#include <iosfwd>
#include <string>

#include "ci/field.hpp"

namespace ci {

/// Flat binary layout: uint32 n, k, R; float64 period; then row-major
/// little-endian float64 samples (node-major, component-contiguous).
void write_field(const PeriodicField& f, std::ostream& os);
PeriodicField read_field(std::istream& is);
void save_field(const PeriodicField& f, const std::string& path);
PeriodicField load_field(const std::string& path);

/// CSV with one row per node: coords then components. Intended for small fields.
void write_field_csv(const PeriodicField& f, std::ostream& os);

/// PLY export: 2n-dimensional vertex coordinates as named properties
/// x0..x{2n-1}; quad faces with toroidal connectivity when n = 2.
void write_ply(const PeriodicField& u, std::ostream& os);
/// OBJ export of the 3-D orthogonal projection (first three coordinates).
void write_obj_projection(const PeriodicField& u, std::ostream& os);

}  // namespace ci
