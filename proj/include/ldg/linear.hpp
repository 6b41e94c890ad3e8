#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <stdexcept>

#ifdef LDG_HAVE_SUITESPARSE
#include <Eigen/CholmodSupport>
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#endif

#include "ldg/residual.hpp"

namespace ldg {

/// Raised when a sparse factorization breaks down (structurally or numerically).
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sparse LU, reused across right-hand sides.
class SparseLU {
public:
    /// Returns false if the matrix is singular to working precision.
    bool factor(const SparseMatrix& A) {
        matrix_ = A;
        matrix_.makeCompressed();
        solver_ = std::make_unique<Impl>();
        solver_->compute(matrix_);
        return solver_->info() == Eigen::Success;
    }
    [[nodiscard]] Vector solve(const Vector& b) const {
        Vector x = solver_->solve(b);
        if (solver_->info() != Eigen::Success || !x.allFinite())
            throw SingularMatrixError("sparse LU solve failed");
        return x;
    }

private:
#ifdef LDG_HAVE_SUITESPARSE
    using Impl = Eigen::UmfPackLU<SparseMatrix>;
#else
    using Impl = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
#endif
    SparseMatrix matrix_;  // UMFPACK's solve reads the factored matrix again
    std::unique_ptr<Impl> solver_;
};

/// Sparse Cholesky; factor() failing is the positive-definiteness test.
class SparseCholesky {
public:
    bool factor(const SparseMatrix& A) {
        matrix_ = A;
        solver_ = std::make_unique<Impl>();
#ifdef LDG_HAVE_SUITESPARSE
        solver_->cholmod().print = 0;
#endif
        solver_->compute(matrix_);
        return solver_->info() == Eigen::Success;
    }
    [[nodiscard]] Vector solve(const Vector& b) const { return solver_->solve(b); }

private:
#ifdef LDG_HAVE_SUITESPARSE
    using Impl = Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>;
#else
    using Impl = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower>;
#endif
    SparseMatrix matrix_;
    std::unique_ptr<Impl> solver_;
};

/// Solves A x = b by sparse LU; throws SingularMatrixError on breakdown.
inline Vector linear_solve(const SparseMatrix& A, const Vector& b) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw std::invalid_argument("linear_solve: dimension mismatch");
    SparseLU lu;
    if (!lu.factor(A)) throw SingularMatrixError("sparse LU factorization failed");
    return lu.solve(b);
}

}  // namespace ldg
