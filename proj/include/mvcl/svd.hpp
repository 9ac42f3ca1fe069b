#pragma once

#include <cstddef>
#include <vector>

namespace mvcl {

// Singular values of a dense row-major rows x cols matrix, sorted in
// descending order. One-sided Jacobi orthogonalization of the columns;
// throws SvdFailure if the off-diagonal mass has not vanished after the
// sweep limit (does not happen for the sizes used here).
std::vector<double> singular_values(const std::vector<double>& a,
                                    std::size_t rows, std::size_t cols);

}  // namespace mvcl
