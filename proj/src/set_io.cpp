#include "radial_lab/set_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <utility>
#include <vector>

#include "radial_lab/errors.hpp"

namespace radial_lab {
namespace {

using Pairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

// Reads the header and the member pairs, checking range and uniqueness.
std::pair<int, Pairs> read_pairs(std::istream& in, std::string_view magic) {
  std::string line;
  std::size_t line_no = 0;
  int level = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const std::string prefix = std::string(magic) + " n=";
    std::uint64_t n = 0;
    if (t.substr(0, prefix.size()) != prefix || !parse_u64(t.substr(prefix.size()), n) ||
        n > static_cast<std::uint64_t>(kMaxLevel)) {
      throw ParseError(line_no, "expected header '" + prefix + "<level>'");
    }
    level = static_cast<int>(n);
    break;
  }
  if (level < 0) throw ParseError(line_no, "missing header");
  const std::uint64_t side = std::uint64_t{1} << level;
  Pairs pairs;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto gap = t.find_first_of(" \t");
    std::uint64_t i = 0, j = 0;
    if (gap == std::string_view::npos || !parse_u64(t.substr(0, gap), i) || !parse_u64(trim(t.substr(gap)), j)) {
      throw ParseError(line_no, "expected 'i j'");
    }
    if (i >= side || j >= side) throw ParseError(line_no, "index out of range for level " + std::to_string(level));
    const std::pair<std::uint32_t, std::uint32_t> ij{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
    if (!seen.insert(ij).second) throw ParseError(line_no, "duplicate entry");
    pairs.push_back(ij);
  }
  return {level, std::move(pairs)};
}

template <class Range>
void write_pairs(std::ostream& out, std::string_view magic, int level, const Range& cubes) {
  out << magic << " n=" << level << '\n';
  for (const auto& c : cubes) out << c.i << ' ' << c.j << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

}  // namespace

void write_cube_set(std::ostream& out, const CubeSet& s) {
  write_pairs(out, "DSET1", s.level(), s.cubes());
}

void write_tube_set(std::ostream& out, const TubeSet& ts) {
  std::vector<DyadicCube> params;
  params.reserve(ts.size());
  for (const auto& t : ts.tubes()) params.push_back(t.param);
  write_pairs(out, "TSET1", ts.level(), params);
}

CubeSet read_cube_set(std::istream& in) {
  auto [level, pairs] = read_pairs(in, "DSET1");
  return CubeSet::from_indices(level, pairs);
}

TubeSet read_tube_set(std::istream& in) {
  auto [level, pairs] = read_pairs(in, "TSET1");
  std::vector<Tube> tubes;
  tubes.reserve(pairs.size());
  for (auto [i, j] : pairs) tubes.push_back(Tube{DyadicCube{level, i, j}});
  return TubeSet(level, std::move(tubes));
}

void save_set(const std::filesystem::path& path, const CubeSet& s) {
  auto out = open_out(path);
  write_cube_set(out, s);
}

void save_set(const std::filesystem::path& path, const TubeSet& ts) {
  auto out = open_out(path);
  write_tube_set(out, ts);
}

CubeSet load_cube_set(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_cube_set(in);
}

TubeSet load_tube_set(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_tube_set(in);
}

}  // namespace radial_lab
