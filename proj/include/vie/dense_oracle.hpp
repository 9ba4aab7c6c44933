// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_DENSE_ORACLE_HPP
#define VIE_DENSE_ORACLE_HPP

#include <cstdint>
#include "vie/greens_kernel.hpp"
#include "vie/medium.hpp"

namespace vie
{

// Largest system the dense oracle will assemble by default (d n^d unknowns).
constexpr std::int64_t kDenseOracleLimit = 20000;

// The full system matrix, entry by entry from the tables (no FFTs):
//   A[(a,i),(c,j)] = delta_ac delta_ij + delta_ac k^2 G(i-j) m_j + G^a(i-j) p^c_j.
CMatrix DenseAssemble(const ConvTable &table, const MediumFields &medium,
                      std::int64_t limit = kDenseOracleLimit);

// LU with partial pivoting; throws NumericalError if the reciprocal condition estimate
// falls below `min_rcond`.
CVector DenseSolve(const CMatrix &a, const CVector &b, double min_rcond = 1e-14);

}  // namespace vie

#endif  // VIE_DENSE_ORACLE_HPP
