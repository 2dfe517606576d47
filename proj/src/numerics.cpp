#include "sieve/numerics.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "sieve/error.hpp"

namespace sieve {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------------------
// CSR storage

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> t) {
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    m.col_.reserve(t.size());
    m.val_.reserve(t.size());
    std::size_t i = 0;
    for (int r = 0; r < rows; ++r) {
        while (i < t.size() && t[i].row == r) {
            int c = t[i].col;
            double v = 0.0;
            while (i < t.size() && t[i].row == r && t[i].col == c) v += t[i++].value;
            m.col_.push_back(c);
            m.val_.push_back(v);
        }
        m.ptr_[r + 1] = static_cast<int>(m.col_.size());
    }
    if (i != t.size()) fail(ErrorKind::MeshMismatch, "triplet row index out of range");
    return m;
}

CsrMatrix CsrMatrix::identity(int n) { return diagonal(std::vector<double>(n, 1.0)); }

CsrMatrix CsrMatrix::diagonal(const std::vector<double>& d) {
    int n = static_cast<int>(d.size());
    CsrMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m.col_.push_back(i);
        m.val_.push_back(d[i]);
        m.ptr_[i + 1] = i + 1;
    }
    return m;
}

double CsrMatrix::at(int i, int j) const {
    auto b = col_.begin() + ptr_[i], e = col_.begin() + ptr_[i + 1];
    auto it = std::lower_bound(b, e, j);
    return (it != e && *it == j) ? val_[it - col_.begin()] : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(rows_, 0.0);
    for (int i = 0; i < rows_ && i < cols_; ++i) d[i] = at(i, i);
    return d;
}

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int p = ptr_[i]; p < ptr_[i + 1]; ++p) s += val_[p] * x[col_[p]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::operator*(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
}

double CsrMatrix::quadratic_form(const std::vector<double>& x) const {
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) {
        double r = 0.0;
        for (int p = ptr_[i]; p < ptr_[i + 1]; ++p) r += val_[p] * x[col_[p]];
        s += x[i] * r;
    }
    return s;
}

bool CsrMatrix::is_symmetric(double rel_tol) const {
    if (rows_ != cols_) return false;
    double scale = 0.0;
    for (double v : val_) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < rows_; ++i)
        for (int p = ptr_[i]; p < ptr_[i + 1]; ++p)
            if (std::abs(val_[p] - at(col_[p], i)) > rel_tol * scale) return false;
    return true;
}

std::vector<Triplet> CsrMatrix::triplets() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (int i = 0; i < rows_; ++i)
        for (int p = ptr_[i]; p < ptr_[i + 1]; ++p) t.push_back({i, col_[p], val_[p]});
    return t;
}

CsrMatrix CsrMatrix::combine(double alpha, const CsrMatrix& other, double beta) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) fail(ErrorKind::MeshMismatch, "matrix shapes differ");
    std::vector<Triplet> t;
    t.reserve(nnz() + other.nnz());
    for (const auto& e : triplets()) t.push_back({e.row, e.col, alpha * e.value});
    for (const auto& e : other.triplets()) t.push_back({e.row, e.col, beta * e.value});
    return from_triplets(rows_, cols_, std::move(t));
}

CsrMatrix CsrMatrix::aggregate(const std::vector<int>& map, int new_size) const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (const auto& e : triplets()) t.push_back({map[e.row], map[e.col], e.value});
    return from_triplets(new_size, new_size, std::move(t));
}

CsrMatrix CsrMatrix::principal(const std::vector<int>& keep) const {
    std::vector<int> pos(cols_, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<int>(i);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        int r = keep[i];
        for (int p = ptr_[r]; p < ptr_[r + 1]; ++p)
            if (pos[col_[p]] >= 0) t.push_back({static_cast<int>(i), pos[col_[p]], val_[p]});
    }
    int n = static_cast<int>(keep.size());
    return from_triplets(n, n, std::move(t));
}

// ---------------------------------------------------------------------------
// Conjugate gradients

CgResult cg_solve(const CsrMatrix& A, const std::vector<double>& b, const SolverOptions& opts,
                  const std::vector<double>* x0) {
    const int n = A.rows();
    if (A.cols() != n || static_cast<int>(b.size()) != n) fail(ErrorKind::MeshMismatch, "cg: dimension mismatch");
    if (opts.check_symmetry && !A.is_symmetric(1e-12)) fail(ErrorKind::NotSymmetric, "cg: matrix is not symmetric");
    CgResult res;
    res.x = x0 ? *x0 : std::vector<double>(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.x.assign(n, 0.0);
        return res;
    }
    std::vector<double> inv_diag(n, 1.0);
    if (opts.precond == Preconditioner::Jacobi) {
        auto d = A.diagonal();
        for (int i = 0; i < n; ++i) inv_diag[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;
    }
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n + 100;
    std::vector<double> r(n), z(n), p(n), Ap(n);
    int it = 0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        A.multiply(res.x, Ap);
        for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
        res.rel_residual = norm2(r) / bnorm;
        if (res.rel_residual <= opts.rel_tol) return res;
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        p = z;
        double rz = dot(r, z);
        while (it < max_iter) {
            ++it;
            A.multiply(p, Ap);
            double pAp = dot(p, Ap);
            if (!(pAp > 0.0)) fail(ErrorKind::NoConvergence, "cg: matrix is not positive definite on the iterate");
            double alpha = rz / pAp;
            axpy(alpha, p, res.x);
            axpy(-alpha, Ap, r);
            double rn = norm2(r) / bnorm;
            if (rn <= opts.rel_tol) break;
            for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
            double rz_new = dot(r, z);
            double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        res.iterations = it;
        if (it >= max_iter) break;
    }
    A.multiply(res.x, Ap);
    for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    res.rel_residual = norm2(r) / bnorm;
    if (res.rel_residual > std::max(opts.rel_tol, opts.accept_tol)) {
        std::ostringstream msg;
        msg << "cg: relative residual " << res.rel_residual << " after " << it << " iterations";
        fail(ErrorKind::NoConvergence, msg.str());
    }
    return res;
}

// ---------------------------------------------------------------------------
// Generalized symmetric eigenproblems

namespace {

Eigen::MatrixXd to_dense(const CsrMatrix& A) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(A.rows(), A.cols());
    for (const auto& t : A.triplets()) D(t.row, t.col) = t.value;
    return D;
}

using Vec = std::vector<double>;
using ResidualFn = std::function<double(double theta, const Vec& Ay, const Vec& By)>;

EigenResult dense_largest(const CsrMatrix& A, const CsrMatrix& B, int k, const ResidualFn& resid) {
    Eigen::MatrixXd Ad = to_dense(A), Bd = to_dense(B);
    Eigen::LLT<Eigen::MatrixXd> llt(Ad);
    if (llt.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "eigensolver: matrix is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Bd, Ad);
    if (es.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "eigensolver: dense solve failed");
    EigenResult r;
    const int n = A.rows();
    for (int j = 0; j < k; ++j) {
        int c = n - 1 - j;
        Vec y(es.eigenvectors().col(c).data(), es.eigenvectors().col(c).data() + n);
        double an = std::sqrt(A.quadratic_form(y));
        for (double& v : y) v /= an;
        double theta = es.eigenvalues()(c);
        r.values.push_back(theta);
        r.residuals.push_back(resid(theta, A * y, B * y));
        r.vectors.push_back(std::move(y));
    }
    return r;
}

EigenResult lanczos_largest(const CsrMatrix& A, const CsrMatrix& B, int k, const EigOptions& opts,
                            const ResidualFn& resid) {
    const int n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != n) fail(ErrorKind::MeshMismatch, "eigensolver: shape mismatch");
    if (k <= 0) return {};
    if (k > n) fail(ErrorKind::NoConvergence, "eigensolver: more eigenpairs requested than the dimension");
    if (n <= 64) return dense_largest(A, B, k, resid);

    const int b = opts.block > 0 ? opts.block : std::clamp(k, 2, 4);
    const int keep = std::min(n, k + b + 2);
    int mmax = opts.max_basis > 0 ? opts.max_basis : std::max(48, 6 * (k + b));
    mmax = std::min({mmax, n, std::max(keep + 2 * b, static_cast<int>(4e7 / std::max(n, 1)))});

    SolverOptions cg;
    cg.rel_tol = opts.inner_tol;
    cg.check_symmetry = false;
    cg.accept_tol = std::max(1e-9, opts.inner_tol);

    std::function<Vec(const Vec&)> solve;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    if (opts.inner == InnerSolver::Cholesky) {
        std::vector<Eigen::Triplet<double>> et;
        et.reserve(A.nnz());
        for (const auto& t : A.triplets()) et.emplace_back(t.row, t.col, t.value);
        Eigen::SparseMatrix<double> As(n, n);
        As.setFromTriplets(et.begin(), et.end());
        ldlt.compute(As);
        if (ldlt.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "eigensolver: factorization failed");
        solve = [&](const Vec& rhs) {
            Eigen::Map<const Eigen::VectorXd> r(rhs.data(), n);
            Eigen::VectorXd x = ldlt.solve(r);
            return Vec(x.data(), x.data() + n);
        };
    } else {
        solve = [&](const Vec& rhs) { return cg_solve(A, rhs, cg).x; };
    }

    std::minstd_rand rng(opts.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    std::vector<Vec> V;   // A-orthonormal basis
    Eigen::MatrixXd T;    // V^T B V
    EigenResult out;

    // Orthogonalizes w against V (twice) and returns its A-norm; w is left normalized when kept.
    auto orthonormalize = [&](Vec& w) -> bool {
        Vec Aw;
        A.multiply(w, Aw);
        double before = std::sqrt(std::max(dot(w, Aw), 0.0));
        if (before == 0.0) return false;
        for (int pass = 0; pass < 2; ++pass) {
            A.multiply(w, Aw);
            for (const auto& v : V) axpy(-dot(v, Aw), v, w);
        }
        A.multiply(w, Aw);
        double after = std::sqrt(std::max(dot(w, Aw), 0.0));
        if (after <= 1e-10 * before) return false;
        for (double& x : w) x /= after;
        return true;
    };
    auto append = [&](Vec w) {
        Vec Bw;
        B.multiply(w, Bw);
        int m = static_cast<int>(V.size());
        T.conservativeResize(m + 1, m + 1);
        for (int i = 0; i < m; ++i) T(i, m) = T(m, i) = dot(V[i], Bw);
        T(m, m) = dot(w, Bw);
        V.push_back(std::move(w));
    };
    auto random_vector = [&]() {
        Vec w(n);
        for (double& x : w) x = uni(rng);
        return w;
    };

    std::vector<Vec> expand;
    for (int j = 0; j < std::max(b, k); ++j) {
        Vec w = random_vector();
        if (orthonormalize(w)) {
            append(w);
            expand.push_back(V.back());
        }
    }
    double prev_max_res = 1e300;
    double best_at_restart = 1e300;
    int stalled = 0;
    for (int restart = 0; restart <= opts.max_restarts;) {
        // Expansion: the operator applied to the selected (unconverged) directions.
        int added = 0;
        for (const auto& v : expand) {
            Vec rhs = B * v;
            Vec w = solve(rhs);
            ++out.operator_applications;
            if (orthonormalize(w)) {
                append(w);
                ++added;
            }
        }
        for (int tries = 0; added == 0 && tries < 4; ++tries) {
            Vec w = random_vector();
            if (orthonormalize(w)) {
                append(w);
                ++added;
            }
        }
        const int m = static_cast<int>(V.size());
        if (added == 0 && m < k) fail(ErrorKind::NoConvergence, "eigensolver: search space exhausted");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const auto& S = es.eigenvectors();
        const int want = std::min(m, std::max(keep, k));
        std::vector<Vec> Y(want, Vec(n, 0.0));
        std::vector<double> theta(want), res(want);
        for (int j = 0; j < want; ++j) {
            int c = m - 1 - j;
            theta[j] = es.eigenvalues()(c);
            for (int i = 0; i < m; ++i) axpy(S(i, c), V[i], Y[j]);
            res[j] = resid(theta[j], A * Y[j], B * Y[j]);
        }
        double max_res = 0.0;
        for (int j = 0; j < std::min(k, want); ++j) max_res = std::max(max_res, res[j]);
        bool exhausted = m >= n;
        if (want >= k && (max_res <= opts.tol || exhausted || (stalled >= 3 && max_res <= opts.stall_tol))) {
            for (int j = 0; j < k; ++j) {
                out.values.push_back(theta[j]);
                out.vectors.push_back(Y[j]);
                out.residuals.push_back(res[j]);
            }
            return out;
        }
        prev_max_res = max_res;
        // Next directions: unconverged wanted pairs first, then their neighbours (clusters).
        std::vector<int> pick;
        for (int j = 0; j < want && static_cast<int>(pick.size()) < b; ++j)
            if (res[j] > opts.tol) pick.push_back(j);
        expand.clear();
        for (int j : pick) expand.push_back(Y[j]);
        if (m + b > mmax) {
            ++restart;
            if (max_res < 0.5 * best_at_restart) {
                best_at_restart = max_res;
                stalled = 0;
            } else {
                ++stalled;
            }
            V.clear();
            T.resize(0, 0);
            for (int j = 0; j < want; ++j) {
                Vec y = Y[j];
                if (orthonormalize(y)) append(std::move(y));
            }
        }
    }
    std::ostringstream msg;
    msg << "eigensolver: residual " << prev_max_res << " above tolerance " << opts.tol;
    fail(ErrorKind::NoConvergence, msg.str());
}

}  // namespace

EigenResult eig_largest(const CsrMatrix& A, const CsrMatrix& B, int k, const EigOptions& opts) {
    ResidualFn resid = [](double theta, const Vec& Ay, const Vec& By) {
        double s = 0.0;
        for (std::size_t i = 0; i < Ay.size(); ++i) s += (By[i] - theta * Ay[i]) * (By[i] - theta * Ay[i]);
        return std::sqrt(s) / norm2(Ay);
    };
    return lanczos_largest(A, B, k, opts, resid);
}

EigenResult eig_smallest(const CsrMatrix& K, const CsrMatrix& M, int k, const EigOptions& opts) {
    for (double d : M.diagonal())
        if (!(d > 0.0)) fail(ErrorKind::SingularMassMatrix, "mass matrix has a non-positive diagonal entry");
    if (M.rows() <= 64) {
        Eigen::LLT<Eigen::MatrixXd> llt(to_dense(M));
        if (llt.info() != Eigen::Success) fail(ErrorKind::SingularMassMatrix, "mass matrix is not positive definite");
    }
    CsrMatrix A = K.combine(1.0, M, 1.0);
    // ||K y - lambda M y|| = ||M y - theta A y|| / theta with lambda = 1/theta - 1.
    ResidualFn resid = [](double theta, const Vec& Ay, const Vec& By) {
        double s = 0.0;
        for (std::size_t i = 0; i < Ay.size(); ++i) s += (By[i] - theta * Ay[i]) * (By[i] - theta * Ay[i]);
        return std::sqrt(s) / (std::abs(theta) * norm2(By));
    };
    EigenResult r = lanczos_largest(A, M, k, opts, resid);
    EigenResult out;
    out.operator_applications = r.operator_applications;
    for (int j = 0; j < static_cast<int>(r.values.size()); ++j) {
        double theta = r.values[j];
        if (!(theta > 0.0)) fail(ErrorKind::SingularMassMatrix, "mass matrix is singular on an eigenvector");
        Vec y = r.vectors[j];
        double mn = std::sqrt(M.quadratic_form(y));
        for (double& v : y) v /= mn;
        out.values.push_back(1.0 / theta - 1.0);
        out.vectors.push_back(std::move(y));
        out.residuals.push_back(r.residuals[j]);
    }
    return out;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) fail(ErrorKind::NonPositiveData, "quadrature needs at least one point");
    QuadratureRule r;
    r.x.resize(n);
    r.w.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double wt = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = wt;
    }
    for (int i = 0; i < n; ++i) {
        r.x[i] = 0.5 * (a + b) + 0.5 * (b - a) * r.x[i];
        r.w[i] *= 0.5 * (b - a);
    }
    return r;
}

}  // namespace sieve
