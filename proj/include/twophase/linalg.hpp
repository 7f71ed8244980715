#pragma once
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <stdexcept>
#include <string>
#include <vector>
#include <cmath>

namespace twophase {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Direct sparse solve with a factorization handle kept for reuse.
class SparseSolver {
public:
    explicit SparseSolver(const SpMat& A) : n_(A.rows()) {
        lu_.compute(A);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("SparseSolver: factorization failed (singular or ill-posed system)");
        colnorm1_ = 0.0;
        for (int j = 0; j < A.outerSize(); ++j) {
            double s = 0.0;
            for (SpMat::InnerIterator it(A, j); it; ++it) s += std::abs(it.value());
            colnorm1_ = std::max(colnorm1_, s);
        }
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd x = lu_.solve(b);
        if (lu_.info() != Eigen::Success) throw std::runtime_error("SparseSolver: solve failed");
        return x;
    }
    // Hager-style 1-norm condition estimate: ||A||_1 * est(||A^-1||_1).
    double condest() const {
        Eigen::VectorXd x = Eigen::VectorXd::Constant(n_, 1.0 / n_);
        double est = 0.0;
        for (int iter = 0; iter < 5; ++iter) {
            Eigen::VectorXd y = lu_.solve(x);
            double ny = y.lpNorm<1>();
            if (ny <= est) break;
            est = ny;
            Eigen::VectorXd xi(n_);
            for (int i = 0; i < n_; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
            Eigen::VectorXd z = lu_.adjoint().solve(xi);
            int jmax = 0;
            z.cwiseAbs().maxCoeff(&jmax);
            if (std::abs(z[jmax]) <= z.dot(x)) break;
            x.setZero();
            x[jmax] = 1.0;
        }
        return colnorm1_ * est;
    }

private:
    Eigen::Index n_;
    mutable Eigen::SparseLU<SpMat> lu_;
    double colnorm1_;
};

inline Eigen::VectorXd sparse_solve(const SpMat& A, const Eigen::VectorXd& b) {
    return SparseSolver(A).solve(b);
}

// Solve the tridiagonal system (lo, di, up) x = rhs in place (Thomas algorithm).
inline void tridiag_solve(std::vector<double>& lo, std::vector<double>& di,
                          std::vector<double>& up, std::vector<double>& rhs) {
    const std::size_t n = di.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = lo[i] / di[i - 1];
        di[i] -= m * up[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

// Least squares fit of data to the columns of A (QR).
inline Eigen::VectorXd lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    return A.colPivHouseholderQr().solve(b);
}

} // namespace twophase
