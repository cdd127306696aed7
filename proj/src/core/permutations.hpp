#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

namespace bohmex {

struct SignedPermutation {
    std::vector<int> p;
    int sign; // parity, +1 or -1
};

inline std::vector<SignedPermutation> permutations_with_sign(int n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<SignedPermutation> out;
    do {
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (idx[i] > idx[j]) ++inv;
        out.push_back({idx, (inv % 2 == 0) ? 1 : -1});
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

inline std::vector<int> inverse_permutation(const std::vector<int>& p) {
    std::vector<int> inv(p.size());
    for (size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
    return inv;
}

} // namespace bohmex
