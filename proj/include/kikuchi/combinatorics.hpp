#pragma once

#include "kikuchi/vertex_set.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace kikuchi {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact C(n, k); zero when k < 0 or k > n.
[[nodiscard]] BigInt binomial(std::int64_t n, std::int64_t k);

/// C(n, k) as uint64, throwing std::overflow_error if it does not fit.
[[nodiscard]] std::uint64_t binomial_u64(std::int64_t n, std::int64_t k);

[[nodiscard]] std::uint64_t to_u64(const BigInt& x);

/// Rank of a subset of {0..ground-1} in colexicographic order (combinatorial
/// number system): rank = sum_j C(c_j, j+1) over the sorted elements c_j.
[[nodiscard]] std::uint64_t rank_subset(Mask subset);
[[nodiscard]] Mask unrank_subset(std::uint64_t rank, int size, int ground);

/// Calls f(mask) for every `size`-subset of the bits set in `pool`, in
/// increasing colex order of the selected positions.
void for_each_subset_of(Mask pool, int size, const std::function<void(Mask)>& f);

/// All `size`-subsets of a vertex set, lexicographic.
[[nodiscard]] std::vector<VertexSet> subsets_of_size(const VertexSet& s, std::size_t size);

[[nodiscard]] inline Mask full_mask(int ground) {
    return ground >= 64 ? ~Mask{0} : ((Mask{1} << ground) - 1);
}

/// Deposits the low bits of `bits` into the positions set in `pool` (pdep).
[[nodiscard]] Mask deposit_bits(std::uint64_t bits, Mask pool);

} // namespace kikuchi
