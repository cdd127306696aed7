#include "core/cofactor.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/permutations.hpp"

namespace bohmex {

namespace {

constexpr int kDpLimit = 14;

inline int popcount(uint32_t m) { return std::popcount(m); }

// --- closed forms, n <= 3 -------------------------------------------------
// These are spelled out, not dispatched to the generic path: relabeling two
// particles must map the computed cofactors onto exact negations/copies of
// each other at the bit level, and fixed expressions guarantee that.

void cof1(const cplx*, cplx* a) { a[0] = cplx(1.0, 0.0); }

void cof2(const cplx* t, Species sp, cplx* a) {
    const double s = sp == Species::Fermion ? -1.0 : 1.0;
    a[0 * 2 + 0] = t[1 * 2 + 1];
    a[0 * 2 + 1] = s * t[1 * 2 + 0];
    a[1 * 2 + 0] = s * t[0 * 2 + 1];
    a[1 * 2 + 1] = t[0 * 2 + 0];
}

void cof3(const cplx* t, Species sp, cplx* a) {
    const double s = sp == Species::Fermion ? -1.0 : 1.0;
    auto m2 = [&](int r1, int r2, int c1, int c2) {
        return t[r1 * 3 + c1] * t[r2 * 3 + c2] + s * t[r1 * 3 + c2] * t[r2 * 3 + c1];
    };
    static const int ex[3][2] = {{1, 2}, {0, 2}, {0, 1}};
    for (int l = 0; l < 3; ++l) {
        for (int c = 0; c < 3; ++c) {
            const double par = (sp == Species::Fermion && ((l + c) & 1)) ? -1.0 : 1.0;
            a[l * 3 + c] = par * m2(ex[l][0], ex[l][1], ex[c][0], ex[c][1]);
        }
    }
}

// --- subset pass, mid n -----------------------------------------------------
// F[S]: rows S fill columns 0..|S|-1; B[S]: rows S fill the trailing |S|
// columns. A minor drops one row and one column, so it splits into a leading
// F block and a trailing B block; for determinants the block-crossing
// inversions contribute the remaining sign.

struct DpScratch {
    std::vector<cplx> f, b;
    std::vector<int> x0;
};
thread_local DpScratch g_dp;

void cof_dp(const cplx* t, int n, Species sp, cplx* a) {
    const bool fermion = sp == Species::Fermion;
    const uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1u);
    auto& f = g_dp.f;
    auto& b = g_dp.b;
    auto& x0 = g_dp.x0;
    f.assign(full + 1u, cplx(0, 0));
    b.assign(full + 1u, cplx(0, 0));
    x0.assign(full + 1u, 0);
    f[0] = cplx(1, 0);
    b[0] = cplx(1, 0);

    for (uint32_t mask = 1; mask <= full; ++mask) {
        const int k = popcount(mask);
        cplx accf(0, 0), accb(0, 0);
        uint32_t rem = mask;
        while (rem) {
            const int r = std::countr_zero(rem);
            rem &= rem - 1;
            const uint32_t sub = mask & ~(1u << r);
            double sf = 1.0, sb = 1.0;
            if (fermion) {
                sf = (popcount(mask >> (r + 1)) & 1) ? -1.0 : 1.0;
                sb = (popcount(mask & ((1u << r) - 1u)) & 1) ? -1.0 : 1.0;
            }
            accf += sf * f[sub] * t[r * n + (k - 1)];
            accb += sb * b[sub] * t[r * n + (n - k)];
        }
        f[mask] = accf;
        b[mask] = accb;
        // cross-inversions of S against its complement: for each member, the
        // number of absent smaller rows
        int x = 0;
        uint32_t m2 = mask;
        int rank = 0;
        while (m2) {
            const int bit = std::countr_zero(m2);
            m2 &= m2 - 1;
            x += bit - rank;
            ++rank;
        }
        x0[mask] = x;
    }

    for (int l = 0; l < n; ++l)
        for (int c = 0; c < n; ++c) a[l * n + c] = cplx(0, 0);

    for (uint32_t mask = 0; mask <= full; ++mask) {
        const int col = popcount(mask);
        const cplx fv = f[mask];
        if (fv == cplx(0, 0) && mask != 0) continue;
        uint32_t rest = full & ~mask;
        while (rest) {
            const int l = std::countr_zero(rest);
            rest &= rest - 1;
            const uint32_t q = full & ~mask & ~(1u << l);
            double sign = 1.0;
            if (fermion) {
                const int x = x0[mask] - popcount(mask >> (l + 1));
                sign = ((x + l + col) & 1) ? -1.0 : 1.0;
            }
            a[l * n + col] += sign * fv * b[q];
        }
    }
}

// --- LU adjugate, large fermionic n ----------------------------------------

struct LuScratch {
    std::vector<cplx> lu, inv;
    std::vector<int> piv;
};
thread_local LuScratch g_lu;

void cof_lu(const cplx* t, int n, cplx* a) {
    auto& lu = g_lu.lu;
    auto& inv = g_lu.inv;
    auto& piv = g_lu.piv;
    lu.assign(t, t + static_cast<size_t>(n) * n);
    piv.resize(n);
    cplx det(1, 0);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(lu[k * n + k]);
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(lu[i * n + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        piv[k] = p;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[p * n + j]);
            det = -det;
        }
        const cplx pivot = lu[k * n + k];
        if (pivot == cplx(0, 0)) {
            // singular trajectory matrix: the adjugate is still finite but an
            // exactly singular pivot cannot be inverted; perturb detection is
            // left to the caller via NullAssembly on the assembled field
            for (int i = 0; i < n * n; ++i) a[i] = cplx(0, 0);
            return;
        }
        det *= pivot;
        for (int i = k + 1; i < n; ++i) {
            const cplx m = lu[i * n + k] / pivot;
            lu[i * n + k] = m;
            for (int j = k + 1; j < n; ++j) lu[i * n + j] -= m * lu[k * n + j];
        }
    }
    // invert by solving for unit columns
    inv.assign(static_cast<size_t>(n) * n, cplx(0, 0));
    std::vector<cplx> col(n);
    for (int e = 0; e < n; ++e) {
        for (int i = 0; i < n; ++i) col[i] = (i == e) ? cplx(1, 0) : cplx(0, 0);
        for (int k = 0; k < n; ++k)
            if (piv[k] != k) std::swap(col[k], col[piv[k]]);
        for (int i = 1; i < n; ++i)
            for (int k = 0; k < i; ++k) col[i] -= lu[i * n + k] * col[k];
        for (int i = n - 1; i >= 0; --i) {
            for (int k = i + 1; k < n; ++k) col[i] -= lu[i * n + k] * col[k];
            col[i] /= lu[i * n + i];
        }
        for (int i = 0; i < n; ++i) inv[i * n + e] = col[i];
    }
    // cofactor(l, c) = det * inv[c][l]
    for (int l = 0; l < n; ++l)
        for (int c = 0; c < n; ++c) a[l * n + c] = det * inv[c * n + l];
}

} // namespace

void cofactor_matrix(const cplx* t, int n, Species species, cplx* a) {
    if (species == Species::Distinguishable)
        throw Error("cofactor_matrix: no symmetrization for distinguishable particles");
    if (n < 1) throw Error("cofactor_matrix: empty matrix");
    if (n == 1) {
        cof1(t, a);
        return;
    }
    if (n == 2) {
        cof2(t, species, a);
        return;
    }
    if (n == 3) {
        cof3(t, species, a);
        return;
    }
    if (n <= kDpLimit) {
        cof_dp(t, n, species, a);
        return;
    }
    if (species == Species::Fermion) {
        cof_lu(t, n, a);
        return;
    }
    throw TooManyParticles("permanental cofactors limited to N <= " +
                           std::to_string(kDpLimit));
}

void cofactor_matrix_reference(const cplx* t, int n, Species species, cplx* a) {
    if (n > 6) throw TooManyParticles("reference cofactors limited to N <= 6");
    for (int i = 0; i < n * n; ++i) a[i] = cplx(0, 0);
    const auto perms = permutations_with_sign(n);
    for (const auto& sp : perms) {
        // sp.p maps column -> row
        for (int c = 0; c < n; ++c) {
            cplx prod(permutation_weight(species, sp.sign), 0.0);
            for (int k = 0; k < n; ++k) {
                if (k == c) continue;
                prod *= t[sp.p[k] * n + k];
            }
            a[sp.p[c] * n + c] += prod;
        }
    }
}

cplx matrix_function(const cplx* t, int n, Species species) {
    if (n == 0) return cplx(1, 0);
    std::vector<cplx> a(static_cast<size_t>(n) * n);
    cofactor_matrix(t, n, species, a.data());
    cplx v(0, 0);
    for (int l = 0; l < n; ++l) v += t[l * n] * a[l * n];
    return v;
}

} // namespace bohmex
