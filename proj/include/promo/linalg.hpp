#ifndef PROMO_LINALG_HPP
#define PROMO_LINALG_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace promo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Per-step discounting of a chain sampled every `delta` units of time.
/// A flow f held for one step is worth f * weight, so a perpetual unit flow
/// is worth exactly 1 / r.
template <typename Scalar>
struct StepDiscount {
    Scalar r;
    Scalar delta;
    Scalar beta;
    Scalar weight;
};

template <typename Scalar>
StepDiscount<Scalar> step_discount(Scalar r, Scalar delta) {
    if (!(r > 0) || !(delta > 0))
        throw std::invalid_argument("discount rate and step must be positive");
    const Scalar beta = std::exp(-r * delta);
    // -expm1 keeps the weight accurate when r * delta is tiny
    return {r, delta, beta, -std::expm1(-r * delta) / r};
}

using Discount = StepDiscount<double>;

/// Row-wise cumulative sums of a kernel.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
row_cdf(const Eigen::MatrixBase<Derived>& K) {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> F(K.rows(), K.cols());
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        typename Derived::Scalar acc = 0;
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            acc += K(i, j);
            F(i, j) = acc;
        }
    }
    return F;
}

/// Largest |row sum - 1| over the rows of K.
template <typename Derived>
typename Derived::Scalar stochastic_defect(const Eigen::MatrixBase<Derived>& K) {
    return (K.rowwise().sum().array() - 1).abs().maxCoeff();
}

/// Solves (I - beta K) v = f for a dense kernel.
template <typename DerivedK, typename DerivedF>
Eigen::Matrix<typename DerivedK::Scalar, Eigen::Dynamic, 1>
discounted_resolvent(const Eigen::MatrixBase<DerivedK>& K, const Eigen::MatrixBase<DerivedF>& f,
                     typename DerivedK::Scalar beta) {
    using M = Eigen::Matrix<typename DerivedK::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    M A = M::Identity(K.rows(), K.cols()) - beta * K;
    return A.partialPivLu().solve(f);
}

/// Prefix minima of a sequence.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
prefix_min(const Eigen::MatrixBase<Derived>& v) {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out(i) = i == 0 ? v(0) : std::min(out(i - 1), v(i));
    return out;
}

template <typename Derived>
SpMat to_sparse(const Eigen::MatrixBase<Derived>& K, double drop = 0.0) {
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        for (Eigen::Index j = 0; j < K.cols(); ++j)
            if (std::abs(K(i, j)) > drop) t.emplace_back(int(i), int(j), double(K(i, j)));
    SpMat S(K.rows(), K.cols());
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

/// Sparse LU solve of A x = b; throws on a singular factorization.
Vec sparse_solve(const SpMat& A, const Vec& b);
Mat sparse_solve(const SpMat& A, const Mat& B);

} // namespace promo

#endif // PROMO_LINALG_HPP
