#include "promo/linalg.hpp"

#include <Eigen/SparseLU>

namespace promo {

namespace {

template <typename Rhs>
Rhs solve_impl(const SpMat& A, const Rhs& b) {
    Eigen::SparseMatrix<double> C(A);
    C.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(C);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("sparse factorization failed: " + lu.lastErrorMessage());
    Rhs x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse solve failed");
    return x;
}

} // namespace

Vec sparse_solve(const SpMat& A, const Vec& b) { return solve_impl(A, b); }
Mat sparse_solve(const SpMat& A, const Mat& B) { return solve_impl(A, B); }

} // namespace promo
