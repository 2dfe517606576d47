#pragma once

#include <cstddef>
#include <vector>

namespace sieve {

struct Triplet {
    int row;
    int col;
    double value;
};

// Compressed sparse row matrix with sorted, duplicate-free column indices per row.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(int rows, int cols) : rows_(rows), cols_(cols), ptr_(rows + 1, 0) {}

    // Duplicate entries are summed; explicit zeros are kept so patterns stay stable.
    static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static CsrMatrix identity(int n);
    static CsrMatrix diagonal(const std::vector<double>& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return col_.size(); }
    const std::vector<int>& row_ptr() const { return ptr_; }
    const std::vector<int>& col_idx() const { return col_; }
    const std::vector<double>& values() const { return val_; }
    std::vector<double>& values() { return val_; }

    double at(int i, int j) const;
    std::vector<double> diagonal() const;
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> operator*(const std::vector<double>& x) const;
    double quadratic_form(const std::vector<double>& x) const;
    bool is_symmetric(double rel_tol = 1e-12) const;

    // alpha * this + beta * other (any patterns, equal shapes).
    CsrMatrix combine(double alpha, const CsrMatrix& other, double beta) const;
    // P^T A P for the 0/1 aggregation map `map` (old index -> new index, size rows()).
    CsrMatrix aggregate(const std::vector<int>& map, int new_size) const;
    // Principal submatrix on the listed indices (ascending).
    CsrMatrix principal(const std::vector<int>& keep) const;
    std::vector<Triplet> triplets() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<int> ptr_{0};
    std::vector<int> col_;
    std::vector<double> val_;
};

enum class Preconditioner { None, Jacobi };

struct SolverOptions {
    double rel_tol = 1e-10;
    int max_iter = 0;  // 0: 10 * n + 100
    Preconditioner precond = Preconditioner::Jacobi;
    bool check_symmetry = true;
    // When the iteration stalls above rel_tol, results below this residual are still accepted.
    double accept_tol = 0.0;
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double rel_residual = 0.0;
};

// Preconditioned conjugate gradients. Throws NotSymmetric, NoConvergence.
CgResult cg_solve(const CsrMatrix& A, const std::vector<double>& b, const SolverOptions& opts = {},
                  const std::vector<double>* x0 = nullptr);

enum class InnerSolver { Cholesky, Cg };

struct EigOptions {
    double tol = 1e-8;         // relative residual of the returned pairs
    int block = 0;             // 0: chosen from k
    int max_basis = 0;         // 0: chosen from k and the problem size
    int max_restarts = 60;
    InnerSolver inner = InnerSolver::Cholesky;  // sparse factorization of A, or PCG per application
    double inner_tol = 1e-11;  // relative tolerance of the inner CG solves
    // When the residual stops improving (rounding floor on badly shaped meshes) the pairs are
    // accepted if it is below this bound.
    double stall_tol = 1e-6;
    unsigned seed = 20240917;
};

struct EigenResult {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    std::vector<double> residuals;
    int operator_applications = 0;
};

// Largest k eigenpairs of B x = theta A x for A symmetric positive definite and B symmetric
// positive semidefinite (block Lanczos on A^{-1}B in the A inner product, thick restarts).
// Values descending, vectors A-orthonormal, residuals ||Bx - theta Ax|| / ||Ax||.
EigenResult eig_largest(const CsrMatrix& A, const CsrMatrix& B, int k, const EigOptions& opts = {});

// Smallest k eigenpairs of K x = lambda M x (K symmetric positive semidefinite, M symmetric
// positive definite), ascending, M-orthonormal vectors, residuals ||Kx - lambda Mx|| / ||Mx||.
// Computed through the pencil M x = theta (K + M) x with theta = 1 / (1 + lambda).
EigenResult eig_smallest(const CsrMatrix& K, const CsrMatrix& M, int k, const EigOptions& opts = {});

// Gauss-Legendre rule with n points on [a, b]; exact for polynomials of degree 2n - 1.
struct QuadratureRule {
    std::vector<double> x, w;
};
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Dense helpers.
double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);

}  // namespace sieve
