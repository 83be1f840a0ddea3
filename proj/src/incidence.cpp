#include "radial_lab/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "radial_lab/bounds.hpp"
#include "radial_lab/errors.hpp"
#include "radial_lab/parallel.hpp"

namespace radial_lab {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void require_same_level(int a, int b) {
  if (a != b) {
    throw ArgumentError("level mismatch: cubes at " + std::to_string(a) + ", tubes at " + std::to_string(b));
  }
}

}  // namespace

TubeSet::TubeSet(int level, std::vector<Tube> tubes) : level_(level), tubes_(std::move(tubes)) {
  if (level < 0 || level > kMaxLevel) throw ArgumentError("tube level out of range");
  const std::uint64_t side = std::uint64_t{1} << level;
  for (const auto& t : tubes_) {
    if (t.param.level != level) throw ArgumentError("tube " + to_string(t.param) + " has the wrong level");
    if (t.param.i >= side || t.param.j >= side) throw ArgumentError("tube " + to_string(t.param) + " out of range");
  }
  std::sort(tubes_.begin(), tubes_.end());
  if (auto dup = std::adjacent_find(tubes_.begin(), tubes_.end()); dup != tubes_.end()) {
    throw ArgumentError("duplicate tube " + to_string(dup->param));
  }
  for (std::size_t k = 0; k < tubes_.size(); ++k) {
    if (columns_.empty() || columns_.back() != tubes_[k].param.i) {
      columns_.push_back(tubes_[k].param.i);
      column_offsets_.push_back(k);
    }
  }
  column_offsets_.push_back(tubes_.size());
}

TubeSet TubeSet::full(int level) {
  const auto grid = CubeSet::full_grid(level);
  std::vector<Tube> tubes;
  tubes.reserve(grid.size());
  for (const auto& c : grid.cubes()) tubes.push_back(Tube{c});
  return TubeSet(level, std::move(tubes));
}

CubeSet TubeSet::parameter_set() const {
  std::vector<DyadicCube> cubes;
  cubes.reserve(tubes_.size());
  for (const auto& t : tubes_) cubes.push_back(t.param);
  return CubeSet(level_, std::move(cubes));
}

void TubeSet::for_each_meeting(const DyadicCube& q, const std::function<void(std::size_t)>& visit) const {
  require_same_level(q.level, level_);
  const std::int64_t side = std::int64_t{1} << level_;
  const std::int64_t ix = q.i;
  const std::int64_t iy = q.j;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const std::int64_t ia = columns_[c];
    // a0 x0 + b0 <= y1  and  a1 x1 + b1 >= y0, solved for the intercept cell.
    const std::int64_t lo = std::max<std::int64_t>(0, ceil_div(iy * side - (ia + 1) * (ix + 1), side) - 1);
    const std::int64_t hi = std::min<std::int64_t>(side - 1, floor_div((iy + 1) * side - ia * ix, side));
    if (lo > hi) continue;
    const auto first = tubes_.begin() + static_cast<std::ptrdiff_t>(column_offsets_[c]);
    const auto last = tubes_.begin() + static_cast<std::ptrdiff_t>(column_offsets_[c + 1]);
    auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(lo),
                               [](const Tube& t, std::uint32_t b) { return t.param.j < b; });
    for (; it != last && static_cast<std::int64_t>(it->param.j) <= hi; ++it) {
      if (tube_meets_cube(*it, q)) visit(static_cast<std::size_t>(it - tubes_.begin()));
    }
  }
}

std::string IncidenceRecord::csv_header() {
  return "n,cubes,M,s,t,eps,union_size,incidences,exponent_hat,exponent_floor";
}

std::string IncidenceRecord::csv_row() const {
  return std::to_string(level) + "," + std::to_string(cube_count) + "," + format_double(family_size) + "," +
         format_double(s) + "," + format_double(t) + "," + format_double(eps) + "," + std::to_string(union_size) +
         "," + std::to_string(incidences) + "," + format_double(exponent_hat) + "," + format_double(exponent_floor);
}

std::uint64_t count_tubes_through_cube(const TubeSet& ts, const DyadicCube& q) {
  require_same_level(q.level, ts.level());
  std::uint64_t n = 0;
  ts.for_each_meeting(q, [&](std::size_t) { ++n; });
  return n;
}

IncidenceRecord count_incidences(const CubeSet& p, const TubeSet& ts, IncidenceOptions options) {
  require_same_level(p.level(), ts.level());
  IncidenceRecord rec;
  rec.level = p.level();
  rec.cube_count = p.size();
  rec.per_cube.assign(p.size(), 0);

  const auto cubes = p.cubes();
  const std::size_t chunks = std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, p.size() / 64));
  std::vector<std::vector<char>> touched(std::max<std::size_t>(1, chunks));
  parallel_chunks(p.size(), chunks, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    auto& mark = touched[chunk];
    mark.assign(ts.size(), 0);
    for (std::size_t k = begin; k < end; ++k) {
      std::uint64_t n = 0;
      ts.for_each_meeting(cubes[k], [&](std::size_t idx) {
        ++n;
        mark[idx] = 1;
      });
      rec.per_cube[k] = n;
    }
  });

  for (auto n : rec.per_cube) rec.incidences += n;
  std::vector<char> any(ts.size(), 0);
  for (const auto& mark : touched) {
    for (std::size_t k = 0; k < mark.size(); ++k) any[k] |= mark[k];
  }
  rec.union_size = static_cast<std::uint64_t>(std::count(any.begin(), any.end(), 1));

  if (options.cross_check && p.level() <= 6) {
    const auto brute = count_incidences_brute_force(p, ts);
    if (brute.per_cube != rec.per_cube || brute.union_size != rec.union_size) {
      throw std::logic_error("indexed incidence count disagrees with brute force");
    }
    rec.brute_force_checked = true;
  }
  return rec;
}

IncidenceRecord count_incidences_brute_force(const CubeSet& p, const TubeSet& ts) {
  require_same_level(p.level(), ts.level());
  IncidenceRecord rec;
  rec.level = p.level();
  rec.cube_count = p.size();
  std::vector<char> any(ts.size(), 0);
  for (const auto& q : p.cubes()) {
    std::uint64_t n = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (tube_meets_cube(ts.tubes()[k], q)) {
        ++n;
        any[k] = 1;
      }
    }
    rec.per_cube.push_back(n);
    rec.incidences += n;
  }
  rec.union_size = static_cast<std::uint64_t>(std::count(any.begin(), any.end(), 1));
  rec.brute_force_checked = true;
  return rec;
}

CubeSet dual_cubes(const TubeSet& ts) {
  std::vector<DyadicCube> cubes;
  cubes.reserve(ts.size());
  for (const auto& t : ts.tubes()) cubes.push_back(dual_cube_of_tube(t));
  return CubeSet(ts.level(), std::move(cubes));
}

TubeSet dual_tubes(const CubeSet& p) {
  std::vector<Tube> tubes;
  tubes.reserve(p.size());
  for (const auto& q : p.cubes()) tubes.push_back(dual_tube_of_cube(q));
  return TubeSet(p.level(), std::move(tubes));
}

// ---------------------------------------------------------------------------

namespace {

void validate_certificate(const FrostmanCertificate& cert, const CubeSet& set, const Rational& required,
                          const std::string& what) {
  if (cert.kind != CertificateKind::dyadic) throw ValidationError(what + ": certificate is not dyadic");
  if (!cert.verified) throw ValidationError(what + ": certificate not verified; refused");
  if (cert.s < required) {
    throw ValidationError(what + ": certified exponent " + to_string(cert.s) + " below required " +
                          to_string(required));
  }
  if (cert.level != set.level() || cert.set_size != set.size() ||
      !check_dyadic_frostman(set, cert.s, cert.C).verified) {
    throw ValidationError(what + ": certificate does not re-verify against its set");
  }
}

}  // namespace

IncidenceRecord renwang_harness(const HarnessInput& in) {
  const auto& p = in.cubes.set;
  if (p.empty()) throw ValidationError("harness needs a nonempty cube set");
  if (in.family_size <= 0) throw ValidationError("family size M must be positive");
  const int n = p.level();
  if (n == 0) throw ValidationError("harness needs level >= 1");
  validate_certificate(in.cubes.certificate, p, in.t, "cube set");
  if (in.families.size() != p.size()) {
    throw ValidationError("missing tube family for some cube; refused");
  }

  IncidenceRecord rec;
  rec.level = n;
  rec.cube_count = p.size();
  rec.family_size = in.family_size;
  rec.s = to_double(in.s);
  rec.t = to_double(in.t);
  rec.eps = in.eps;
  rec.eta_cubes = std::log2(to_double(in.cubes.certificate.C)) / n;

  std::vector<std::uint64_t> keys;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& q = p.cubes()[k];
    const auto& fam = in.families[k];
    const std::string where = "family of cube " + to_string(q);
    if (fam.tubes.level() != n) throw ValidationError(where + ": level mismatch");
    const double size = static_cast<double>(fam.tubes.size());
    if (size < in.family_size / 2 || size > in.family_size * 2) {
      throw ValidationError(where + ": |T(Q)| = " + std::to_string(fam.tubes.size()) +
                            " not within a factor 2 of M");
    }
    validate_certificate(fam.certificate, fam.tubes.parameter_set(), in.s, where);
    rec.eta_tubes = std::max(rec.eta_tubes, std::log2(to_double(fam.certificate.C)) / n);
    for (const auto& t : fam.tubes.tubes()) {
      if (!tube_meets_cube(t, q)) throw ValidationError(where + ": tube " + to_string(t.param) + " misses its cube");
      keys.push_back((std::uint64_t{t.param.i} << 32) | t.param.j);
    }
    rec.per_cube.push_back(fam.tubes.size());
    rec.incidences += fam.tubes.size();
  }
  std::sort(keys.begin(), keys.end());
  rec.union_size = static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  rec.exponent_hat = std::log2(static_cast<double>(rec.union_size) / in.family_size) / n;
  rec.exponent_floor = incidence_exponent(rec.s, rec.t) - in.eps;
  return rec;
}

std::uint64_t nominal_family_size(int level, const Rational& s) {
  return static_cast<std::uint64_t>(std::llround(std::exp2(to_double(s) * level)));
}

CertifiedTubeFamily tube_family_through_cube(const DyadicCube& q, const Rational& s, std::uint64_t seed) {
  if (s <= 0 || s > 1) throw ArgumentError("family exponent must lie in (0, 1]");
  const int n = q.level;
  std::mt19937_64 rng(mix_seed(seed, morton_encode(q.i, q.j)));

  // Binary tree over slope cells with a quota of round(2^{s m}) nodes at
  // depth m; the nodes that split are drawn uniformly.
  std::vector<std::uint32_t> nodes{0};
  for (int m = 1; m <= n; ++m) {
    const std::size_t quota = std::clamp<std::size_t>(nominal_family_size(m, s), nodes.size(), 2 * nodes.size());
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[uniform_below(rng, k)]);
    std::vector<char> splits(nodes.size(), 0);
    for (std::size_t k = 0; k < quota - nodes.size(); ++k) splits[order[k]] = 1;
    std::vector<std::uint32_t> next;
    next.reserve(quota);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (splits[k]) {
        next.push_back(2 * nodes[k]);
        next.push_back(2 * nodes[k] + 1);
      } else {
        next.push_back(2 * nodes[k] + static_cast<std::uint32_t>(uniform_below(rng, 2)));
      }
    }
    nodes = std::move(next);
  }
  std::sort(nodes.begin(), nodes.end());

  const std::int64_t side = std::int64_t{1} << n;
  const std::int64_t ix = q.i;
  const std::int64_t iy = q.j;
  std::vector<Tube> tubes;
  tubes.reserve(nodes.size());
  for (std::uint32_t a : nodes) {
    const std::int64_t ia = a;
    const std::int64_t lo = std::max<std::int64_t>(0, ceil_div(iy * side - (ia + 1) * (ix + 1), side) - 1);
    const std::int64_t hi = std::min<std::int64_t>(side - 1, floor_div((iy + 1) * side - ia * ix, side));
    if (lo > hi) continue;  // every line of this slope cell through q leaves the window
    const auto b = lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
    tubes.push_back(Tube{DyadicCube{n, a, static_cast<std::uint32_t>(b)}});
  }
  if (tubes.empty()) throw GenerationError("no tube through " + to_string(q) + " inside the parameter window");
  CertifiedTubeFamily fam{TubeSet(n, std::move(tubes)), {}};
  fam.certificate = certify_with_min_constant(fam.tubes.parameter_set(), s);
  return fam;
}

}  // namespace radial_lab
