#pragma once

// Weighted compositions Omega(k, n): k-tuples of nonnegative integers
// (n_1, ..., n_k) with sum_j j * n_j = n. These index every jump-combination
// sum in the counting-process formulas.
//
// Enumeration order is fixed and documented: ascending in the count of the
// largest jump size, then the next largest, and so on (the smallest size
// absorbs the remainder). All downstream sums are therefore reproducible.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mgcp {

// Enumeration is exponential in k; anything past this is a configuration
// mistake, not a use case.
inline constexpr int kMaxCompositionParts = 16;

struct Composition {
  std::vector<int> parts;  // parts[j-1] = n_j, the count of size-j jumps
  int weight = 0;          // sum_j j * n_j
  int eta = 0;             // sum_j n_j, total number of jumps
};

namespace detail {

inline void check_composition_args(int k, int n) {
  if (k < 1 || k > kMaxCompositionParts)
    throw std::invalid_argument(
        "compositions: jump-size count k must be in 1.." +
        std::to_string(kMaxCompositionParts));
  if (n < 0)
    throw std::invalid_argument("compositions: weight n must be >= 0");
}

template <typename Visitor>
void visit_compositions(std::vector<int>& parts, int size, int rem, int eta,
                        Visitor& visit) {
  if (size == 1) {
    parts[0] = rem;
    visit(std::as_const(parts), eta + rem);
    parts[0] = 0;
    return;
  }
  for (int c = 0; c * size <= rem; ++c) {
    parts[size - 1] = c;
    visit_compositions(parts, size - 1, rem - c * size, eta + c, visit);
  }
  parts[size - 1] = 0;
}

}  // namespace detail

// Calls visit(parts, eta) once per element of Omega(k, n), in the documented
// order. parts is reused between calls; copy it if it must outlive the visit.
template <typename Visitor>
void for_each_composition(int k, int n, Visitor&& visit) {
  detail::check_composition_args(k, n);
  std::vector<int> parts(static_cast<std::size_t>(k), 0);
  detail::visit_compositions(parts, k, n, 0, visit);
}

inline std::vector<Composition> enumerate_compositions(int k, int n) {
  std::vector<Composition> out;
  for_each_composition(k, n, [&](const std::vector<int>& parts, int eta) {
    out.push_back(Composition{parts, n, eta});
  });
  return out;
}

// Number of solutions, by the partition recurrence: appending jump size j to
// the allowed sizes adds ways[m - j] paths to each weight m.
inline std::uint64_t count_compositions(int k, int n) {
  detail::check_composition_args(k, n);
  // With only size-1 jumps every weight has exactly one representation.
  std::vector<std::uint64_t> ways(static_cast<std::size_t>(n) + 1, 1);
  for (int j = 2; j <= k; ++j)
    for (std::size_t m = static_cast<std::size_t>(j);
         m <= static_cast<std::size_t>(n); ++m)
      ways[m] += ways[m - static_cast<std::size_t>(j)];
  return ways[static_cast<std::size_t>(n)];
}

// Materialized per-(k,n) lists for evaluators that revisit the same Omega set
// many times (the h-series do). Not synchronized: use one instance per
// evaluation or per thread.
class CompositionCache {
 public:
  const std::vector<Composition>& get(int k, int n) {
    const auto key = std::make_pair(k, n);
    auto it = lists_.find(key);
    if (it == lists_.end())
      it = lists_.emplace(key, enumerate_compositions(k, n)).first;
    return it->second;
  }

 private:
  std::map<std::pair<int, int>, std::vector<Composition>> lists_;
};

}  // namespace mgcp
