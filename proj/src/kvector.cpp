#include "kvrand/kvector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kvrand/error.hpp"

namespace kvrand {

SortedDatabase build_sorted_database(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::TooFewElements,
                "sorted database needs at least 2 elements, got " +
                    std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFiniteValue,
                  "non-finite value at index " + std::to_string(i));
    }
  }

  SortedDatabase db;
  db.original_.assign(values.begin(), values.end());
  db.sort_index_.resize(values.size());
  std::iota(db.sort_index_.begin(), db.sort_index_.end(), std::size_t{0});
  std::stable_sort(db.sort_index_.begin(), db.sort_index_.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  db.values_.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    db.values_[i] = values[db.sort_index_[i]];
  }
  return db;
}

KVectorIndex build_kvector(const SortedDatabase& db) {
  const std::size_t n = db.size();
  const double y_min = db.min();
  const double y_max = db.max();
  const double scale = std::max({1.0, std::abs(y_min), std::abs(y_max)});

  KVectorIndex kv;
  kv.machine_eps = std::numeric_limits<double>::epsilon();
  // At least four ulps of padding on each side, so the end levels sit
  // strictly outside the data even for tiny databases.
  kv.delta_eps = static_cast<double>(std::max<std::size_t>(n - 1, 4)) * kv.machine_eps * scale;
  kv.slope = (y_max - y_min + 2.0 * kv.delta_eps) / static_cast<double>(n - 1);
  kv.intercept = y_min - kv.delta_eps;

  const auto s = db.values();
  kv.k.resize(n);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double level = kv.line(i);
    while (j < n && s[j] <= level) ++j;
    kv.k[i] = j;
  }
  return kv;
}

namespace {

// Line index (0-based) ceil(t) clamped to [0, n-1], computed in floating
// point before the integer conversion so far-away queries cannot overflow.
std::size_t clamped_ceil(double t, std::size_t n) {
  const double c = std::ceil(t);
  if (!(c > 0.0)) return 0;
  if (c >= static_cast<double>(n - 1)) return n - 1;
  return static_cast<std::size_t>(c);
}

}  // namespace

std::pair<std::size_t, std::size_t> sorted_range(const KVectorIndex& kv,
                                                 const SortedDatabase& db,
                                                 double lo, double hi,
                                                 bool strict) {
  const std::size_t n = db.size();
  const auto s = db.values();
  if (hi < s[0] || lo > s[n - 1]) return {0, 0};

  // Bin just below lo and bin just above hi; 1-based line indices
  // ceil((lo - q) / m) and ceil((hi - q) / m) + 1.
  const std::size_t j_lo = clamped_ceil((lo - kv.intercept) / kv.slope - 1.0, n);
  const std::size_t j_hi = clamped_ceil((hi - kv.intercept) / kv.slope, n);
  std::size_t begin = kv.k[j_lo];
  std::size_t end = kv.k[j_hi];

  // Values sitting exactly on a rounded line level.
  while (begin > 0 && s[begin - 1] >= lo) --begin;
  while (end < n && s[end] <= hi) ++end;

  if (strict) {
    while (begin < end && s[begin] < lo) ++begin;
    while (end > begin && s[end - 1] > hi) --end;
  }
  if (end < begin) end = begin;
  return {begin, end};
}

RangeResult range_query(const KVectorIndex& kv, const SortedDatabase& db,
                        double lo, double hi, bool strict) {
  if (!(lo <= hi)) {
    throw Error(ErrorCode::InvalidRange, "range query with lower bound " +
                                             std::to_string(lo) + " above upper bound " +
                                             std::to_string(hi));
  }
  RangeResult result;
  std::tie(result.begin, result.end) = sorted_range(kv, db, lo, hi, strict);
  const auto idx = db.sort_index();
  result.indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(result.begin),
                        idx.begin() + static_cast<std::ptrdiff_t>(result.end));
  return result;
}

}  // namespace kvrand
