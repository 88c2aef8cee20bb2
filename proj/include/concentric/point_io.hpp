#pragma once

#include <concentric/design_matrices.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace concentric {

/// Parses a headered `x,y,ring` CSV with 1-based ring indices. Rings must
/// form a contiguous set 1..K and the file must hold at least 6 + K rows.
/// Throws InputError (or InsufficientPoints) with a line-numbered message.
DataSet read_points(std::istream& in, double f0);
DataSet read_points(const std::filesystem::path& path, double f0);

void write_points(std::ostream& out, const DataSet& data);

/// %.17g, enough for an exact round trip through text.
std::string format_number(double value);

}  // namespace concentric
