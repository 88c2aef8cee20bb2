#include <concentric/point_io.hpp>

#include <concentric/errors.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <vector>

namespace concentric {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

double parse_real(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size() || field.empty()) {
    throw InputError(where(line_no) + "cannot parse '" + std::string(field) + "' as a number");
  }
  if (!std::isfinite(value)) throw InputError(where(line_no) + "non-finite coordinate");
  return value;
}

long parse_ring(std::string_view field, std::size_t line_no) {
  long value = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size() || field.empty()) {
    throw InputError(where(line_no) + "ring must be an integer, got '" + std::string(field) + "'");
  }
  if (value < 1) throw InputError(where(line_no) + "ring indices start at 1");
  return value;
}

}  // namespace

DataSet read_points(std::istream& in, double f0) {
  if (!(f0 > 0.0)) throw InputError("f0 must be positive");
  std::string line;
  std::size_t line_no = 0;

  // Header, skipping a UTF-8 byte order mark and leading blank lines.
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split(view);
    if (fields.size() != 3 || fields[0] != "x" || fields[1] != "y" || fields[2] != "ring") {
      throw InputError(where(line_no) + "expected header 'x,y,ring'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw InputError("empty point file");

  std::map<long, std::vector<Point>> by_ring;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 3) {
      throw InputError(where(line_no) + "expected 3 fields, got " + std::to_string(fields.size()));
    }
    const Point p{parse_real(fields[0], line_no), parse_real(fields[1], line_no)};
    by_ring[parse_ring(fields[2], line_no)].push_back(p);
    ++rows;
  }

  const auto k = by_ring.size();
  if (k == 0) throw InsufficientPoints("insufficient points: the file has no data rows");
  if (by_ring.rbegin()->first != static_cast<long>(k)) {
    throw InputError("non-contiguous ring indices: expected 1.." + std::to_string(k) +
                     ", largest is " + std::to_string(by_ring.rbegin()->first));
  }
  if (rows < 6 + k) {
    throw InsufficientPoints("insufficient points: need at least " + std::to_string(6 + k) +
                             " rows for " + std::to_string(k) + " ring(s), got " +
                             std::to_string(rows));
  }

  DataSet data;
  data.f0 = f0;
  for (auto& [ring, points] : by_ring) data.rings.push_back(std::move(points));
  validate(data);
  return data;
}

DataSet read_points(const std::filesystem::path& path, double f0) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_points(in, f0);
}

void write_points(std::ostream& out, const DataSet& data) {
  out << "x,y,ring\n";
  for (std::size_t i = 0; i < data.ring_count(); ++i) {
    for (const auto& p : data.rings[i]) {
      out << format_number(p.x) << ',' << format_number(p.y) << ',' << (i + 1) << '\n';
    }
  }
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace concentric
