#ifndef KVRAND_KVECTOR_HPP
#define KVRAND_KVECTOR_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace kvrand {

/**
 * Ascending copy of a value array together with the permutation that maps
 * sorted positions back to the caller's original order.
 *
 * Indices are 0-based: values()[i] == original()[sort_index()[i]].
 * Equal values keep their original relative order.
 */
class SortedDatabase {
 public:
  SortedDatabase() = default;

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::size_t> sort_index() const noexcept { return sort_index_; }
  std::span<const double> original() const noexcept { return original_; }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }

 private:
  friend SortedDatabase build_sorted_database(std::span<const double> values);

  std::vector<double> values_;
  std::vector<std::size_t> sort_index_;
  std::vector<double> original_;
};

/// Requires at least two finite values.
SortedDatabase build_sorted_database(std::span<const double> values);

/**
 * The k-vector of a sorted database.
 *
 * k[i] is the number of sorted values that are <= line(i), where
 * line(i) = slope * i + intercept for i in [0, n). The line runs from just
 * below the minimum to just above the maximum, so k.front() == 0 and
 * k.back() == n.
 */
struct KVectorIndex {
  std::vector<std::size_t> k;
  double slope = 0.0;
  double intercept = 0.0;
  double machine_eps = 0.0;
  double delta_eps = 0.0;

  std::size_t size() const noexcept { return k.size(); }
  double line(std::size_t i) const noexcept {
    return slope * static_cast<double>(i) + intercept;
  }
};

KVectorIndex build_kvector(const SortedDatabase& db);

/**
 * Result of a range search. [begin, end) are positions in the sorted array;
 * indices are the matching positions in the original array, in sorted
 * order. begin == end means nothing was found.
 */
struct RangeResult {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<std::size_t> indices;

  bool empty() const noexcept { return begin == end; }
  std::size_t size() const noexcept { return end - begin; }
};

/**
 * Sorted positions [begin, end) of the elements in [lo, hi].
 *
 * Non-strict mode may include the neighbours of the range that share a
 * k-vector bin with its boundaries; strict mode trims them. Does not
 * allocate.
 */
std::pair<std::size_t, std::size_t> sorted_range(const KVectorIndex& kv,
                                                 const SortedDatabase& db,
                                                 double lo, double hi,
                                                 bool strict);

/// Throws InvalidRange when lo > hi.
RangeResult range_query(const KVectorIndex& kv, const SortedDatabase& db,
                        double lo, double hi, bool strict);

}  // namespace kvrand

#endif  // KVRAND_KVECTOR_HPP
