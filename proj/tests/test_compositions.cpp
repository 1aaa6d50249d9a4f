#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "mgcp/compositions.hpp"

using mgcp::Composition;
using mgcp::count_compositions;
using mgcp::enumerate_compositions;

namespace {

// Brute-force oracle: scan the whole box 0..n per coordinate, keep the
// solutions of sum_j j*n_j = n, and order them the documented way (ascending
// in the largest jump count, then the next largest, ...).
std::vector<std::vector<int>> brute_force(int k, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> v(k, 0);
  while (true) {
    int w = 0;
    for (int j = 0; j < k; ++j) w += (j + 1) * v[j];
    if (w == n) out.push_back(v);
    int pos = 0;
    while (pos < k && v[pos] == n) v[pos++] = 0;
    if (pos == k) break;
    ++v[pos];
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    for (int j = static_cast<int>(a.size()) - 1; j >= 0; --j)
      if (a[j] != b[j]) return a[j] < b[j];
    return false;
  });
  return out;
}

}  // namespace

TEST_CASE("enumerate_compositions matches the worked examples") {
  const auto two_two = enumerate_compositions(2, 2);
  REQUIRE(two_two.size() == 2);
  CHECK(two_two[0].parts == std::vector<int>{2, 0});
  CHECK(two_two[1].parts == std::vector<int>{0, 1});

  const auto zero = enumerate_compositions(3, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].parts == std::vector<int>{0, 0, 0});
  CHECK(zero[0].eta == 0);

  const auto three_four = enumerate_compositions(3, 4);
  REQUIRE(three_four.size() == 4);
  CHECK(three_four[0].parts == std::vector<int>{4, 0, 0});
  CHECK(three_four[1].parts == std::vector<int>{2, 1, 0});
  CHECK(three_four[2].parts == std::vector<int>{0, 2, 0});
  CHECK(three_four[3].parts == std::vector<int>{1, 0, 1});
}

TEST_CASE("single jump size leaves one composition") {
  for (int n : {0, 1, 7, 23}) {
    const auto got = enumerate_compositions(1, n);
    REQUIRE(got.size() == 1);
    CHECK(got[0].parts == std::vector<int>{n});
    CHECK(got[0].eta == n);
    CHECK(count_compositions(1, n) == 1);
  }
}

TEST_CASE("enumeration agrees with the box brute force, order included") {
  for (int k = 1; k <= 4; ++k) {
    for (int n = 0; n <= 12; ++n) {
      const auto expect = brute_force(k, n);
      const auto got = enumerate_compositions(k, n);
      INFO("k = " << k << " n = " << n);
      REQUIRE(got.size() == expect.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].parts == expect[i]);
        int w = 0, eta = 0;
        for (int j = 0; j < k; ++j) {
          w += (j + 1) * got[i].parts[j];
          eta += got[i].parts[j];
        }
        CHECK(w == n);
        CHECK(got[i].weight == n);
        CHECK(got[i].eta == eta);
      }
    }
  }
}

TEST_CASE("count_compositions worked examples") {
  CHECK(count_compositions(2, 5) == 3);  // (5,0), (3,1), (1,2)
  CHECK(count_compositions(3, 4) == 4);
  CHECK(count_compositions(4, 0) == 1);
}

TEST_CASE("count matches enumeration size exhaustively") {
  for (int k = 1; k <= 6; ++k) {
    for (int n = 0; n <= 40; ++n) {
      INFO("k = " << k << " n = " << n);
      std::size_t seen = 0;
      mgcp::for_each_composition(k, n,
                                 [&](const std::vector<int>&, int) { ++seen; });
      CHECK(count_compositions(k, n) == seen);
    }
  }
}

TEST_CASE("jump-size bound is a configuration error") {
  CHECK_THROWS_AS(enumerate_compositions(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_compositions(17, 3), std::invalid_argument);
  CHECK_THROWS_AS(count_compositions(-1, 3), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_compositions(2, -1), std::invalid_argument);
}

TEST_CASE("composition cache hands back stable, correct lists") {
  mgcp::CompositionCache cache;
  const auto& first = cache.get(3, 4);
  const auto& second = cache.get(3, 4);
  CHECK(&first == &second);  // same materialized list
  CHECK(first.size() == 4);
  CHECK(cache.get(2, 2).size() == 2);
  const auto fresh = enumerate_compositions(3, 4);
  REQUIRE(first.size() == fresh.size());
  for (std::size_t i = 0; i < fresh.size(); ++i)
    CHECK(first[i].parts == fresh[i].parts);
}
