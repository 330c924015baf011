#include "kikuchi/combinatorics.hpp"

#include <array>
#include <limits>
#include <stdexcept>

namespace kikuchi {

BigInt binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

std::uint64_t to_u64(const BigInt& x) {
    if (x < 0 || x > std::numeric_limits<std::uint64_t>::max()) {
        throw std::overflow_error("integer " + x.str() + " does not fit in 64 bits");
    }
    return x.convert_to<std::uint64_t>();
}

std::uint64_t binomial_u64(std::int64_t n, std::int64_t k) { return to_u64(binomial(n, k)); }

namespace {

// Pascal table for the ranking hot path; ground sets are at most 64 wide.
struct SmallBinomials {
    std::array<std::array<std::uint64_t, 65>, 65> table{};
    SmallBinomials() {
        for (int n = 0; n <= 64; ++n) {
            table[n][0] = 1;
            for (int k = 1; k <= n; ++k) {
                const auto a = table[n - 1][k - 1];
                const auto b = k <= n - 1 ? table[n - 1][k] : 0;
                // saturate; entries this large are never valid ranks
                table[n][k] = a > std::numeric_limits<std::uint64_t>::max() - b
                                  ? std::numeric_limits<std::uint64_t>::max()
                                  : a + b;
            }
        }
    }
};

const SmallBinomials& small_binomials() {
    static const SmallBinomials b;
    return b;
}

} // namespace

std::uint64_t rank_subset(Mask subset) {
    const auto& t = small_binomials().table;
    std::uint64_t rank = 0;
    int j = 1;
    while (subset != 0) {
        const int c = __builtin_ctzll(subset);
        rank += c >= j ? t[c][j] : 0;
        subset &= subset - 1;
        ++j;
    }
    return rank;
}

Mask unrank_subset(std::uint64_t rank, int size, int ground) {
    const auto& t = small_binomials().table;
    Mask m = 0;
    int c = ground - 1;
    for (int j = size; j >= 1; --j) {
        while (c >= j && t[c][j] > rank) {
            --c;
        }
        if (c < j) {
            c = j - 1;
        }
        const std::uint64_t contrib = c >= j ? t[c][j] : 0;
        rank -= contrib;
        m |= Mask{1} << c;
        --c;
    }
    if (rank != 0) {
        throw std::out_of_range("subset rank out of range");
    }
    return m;
}

Mask deposit_bits(std::uint64_t bits, Mask pool) {
    Mask out = 0;
    while (pool != 0 && bits != 0) {
        const Mask low = pool & (~pool + 1);
        if ((bits & 1U) != 0) {
            out |= low;
        }
        bits >>= 1U;
        pool &= pool - 1;
    }
    return out;
}

void for_each_subset_of(Mask pool, int size, const std::function<void(Mask)>& f) {
    const int width = popcount(pool);
    if (size < 0 || size > width) {
        return;
    }
    if (size == 0) {
        f(0);
        return;
    }
    // Gosper's hack over compressed positions, then scatter into the pool.
    std::uint64_t x = (size == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << size) - 1);
    const std::uint64_t limit = width == 64 ? 0 : (std::uint64_t{1} << width);
    while (true) {
        f(deposit_bits(x, pool));
        if (size == width) {
            return;
        }
        const std::uint64_t c = x & (~x + 1);
        const std::uint64_t r = x + c;
        if (r == 0) {
            return;
        }
        x = (((r ^ x) >> 2U) / c) | r;
        if (limit != 0 && x >= limit) {
            return;
        }
    }
}

std::vector<VertexSet> subsets_of_size(const VertexSet& s, std::size_t size) {
    std::vector<VertexSet> out;
    if (size > s.size()) {
        return out;
    }
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) {
        idx[i] = i;
    }
    const std::size_t n = s.size();
    while (true) {
        std::vector<Vertex> pick;
        pick.reserve(size);
        for (auto i : idx) {
            pick.push_back(s[i]);
        }
        out.emplace_back(std::move(pick));
        // advance to the next combination in lexicographic order
        std::size_t pos = size;
        while (pos > 0 && idx[pos - 1] == n - size + pos - 1) {
            --pos;
        }
        if (pos == 0) {
            break;
        }
        ++idx[pos - 1];
        for (std::size_t j = pos; j < size; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

} // namespace kikuchi
