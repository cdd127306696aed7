#pragma once

#include <vector>

#include "core/grid.hpp"
#include "core/manybody.hpp"

namespace bohmex {

// Cofactors of the determinant (fermions) or permanent (bosons) of an n x n
// complex matrix T: A[l][a] = d det(T) / d T[l][a], row-major output.
// sum_l T[l][a] A[l][a] reproduces det/perm for every column a.
//
// n <= 3 uses fixed closed forms (bit-stable under relabeling, which the
// trajectory swap-symmetry checks rely on), mid-size n a subset-convolution
// pass, and large fermionic n an LU adjugate.
void cofactor_matrix(const cplx* t, int n, Species species, cplx* a);

// reference N!-enumeration, n <= 6; test oracle and property-suite cross-check
void cofactor_matrix_reference(const cplx* t, int n, Species species, cplx* a);

// determinant or permanent itself (same dispatch)
cplx matrix_function(const cplx* t, int n, Species species);

} // namespace bohmex
