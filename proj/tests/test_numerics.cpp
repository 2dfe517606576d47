#include "doctest.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "sieve/error.hpp"
#include "sieve/numerics.hpp"
#include "sieve/parallel.hpp"

using namespace sieve;

namespace {
// Tridiagonal 1D Dirichlet Laplacian tridiag(-1, 2, -1) plus shift * I.
CsrMatrix laplace_1d(int n, double shift = 0.0) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0 + shift});
        if (i > 0) t.push_back({i, i - 1, -1.0});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    return CsrMatrix::from_triplets(n, n, t);
}
}  // namespace

TEST_CASE("CSR assembly sums duplicates and keeps rows sorted") {
    auto A = CsrMatrix::from_triplets(2, 2, {{1, 0, 1.0}, {0, 1, 2.0}, {0, 0, 3.0}, {0, 1, 4.0}});
    CHECK(A.nnz() == 3);
    CHECK(A.at(0, 1) == 6.0);
    CHECK(A.at(1, 1) == 0.0);
    auto y = A * std::vector<double>{1.0, 2.0};
    CHECK(y[0] == 15.0);
    CHECK(y[1] == 1.0);
    CHECK_FALSE(A.is_symmetric());
    auto S = laplace_1d(5);
    CHECK(S.is_symmetric());
    CHECK(S.quadratic_form({1, 1, 1, 1, 1}) == doctest::Approx(2.0));
    auto D = S.combine(1.0, CsrMatrix::identity(5), -2.0);
    CHECK(D.at(2, 2) == 0.0);
    // Aggregating nodes 0 and 4 (a periodic identification).
    auto P = S.aggregate({0, 1, 2, 3, 0}, 4);
    CHECK(P.at(0, 0) == 4.0);
    CHECK(P.at(0, 3) == -1.0);
    auto Q = S.principal({1, 2});
    CHECK(Q.rows() == 2);
    CHECK(Q.at(0, 1) == -1.0);
}

TEST_CASE("conjugate gradients against the exact tridiagonal solve") {
    const int n = 200;
    auto A = laplace_1d(n, 0.01);
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) b[i] = std::sin(0.1 * i) + 1.0;
    // Thomas algorithm as the oracle.
    std::vector<double> c(n), d(n), x(n);
    double diag = 2.01;
    c[0] = -1.0 / diag;
    d[0] = b[0] / diag;
    for (int i = 1; i < n; ++i) {
        double m = diag + c[i - 1];
        c[i] = -1.0 / m;
        d[i] = (b[i] + d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];

    SolverOptions o;
    o.rel_tol = 1e-12;
    auto r = cg_solve(A, b, o);
    CHECK(r.rel_residual <= 1e-12);
    double err = 0.0, ref = 0.0;
    for (int i = 0; i < n; ++i) {
        err = std::max(err, std::abs(r.x[i] - x[i]));
        ref = std::max(ref, std::abs(x[i]));
    }
    CHECK(err <= 1e-8 * ref);
}

TEST_CASE("conjugate gradients rejects non-symmetric input and reports stalls") {
    auto A = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}});
    try {
        cg_solve(A, {1.0, 1.0});
        FAIL("expected NotSymmetric");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotSymmetric);
    }
    SolverOptions o;
    o.max_iter = 2;
    o.rel_tol = 1e-14;
    try {
        cg_solve(laplace_1d(100), std::vector<double>(100, 1.0), o);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoConvergence);
    }
}

TEST_CASE("smallest eigenvalues of the discrete 1D Laplacian") {
    const int n = 300;
    auto K = laplace_1d(n);
    auto M = CsrMatrix::identity(n);
    auto r = eig_smallest(K, M, 6);
    REQUIRE(r.values.size() == 6);
    for (int j = 0; j < 6; ++j) {
        double exact = 2.0 - 2.0 * std::cos((j + 1) * M_PI / (n + 1));
        CHECK(r.values[j] == doctest::Approx(exact).epsilon(1e-9));
        CHECK(r.residuals[j] <= 1e-8);
    }
    // M-orthonormality.
    CHECK(dot(r.vectors[0], r.vectors[0]) == doctest::Approx(1.0));
    CHECK(std::abs(dot(r.vectors[0], r.vectors[1])) <= 1e-8);
}

TEST_CASE("eigenvalues with a null space and multiplicities") {
    // K = diag(0, 1, 1, 2, 3, ..), M = diag(2): values are half the diagonal.
    const int n = 60;
    std::vector<double> kd(n);
    kd[0] = 0.0;
    kd[1] = 1.0;
    kd[2] = 1.0;
    for (int i = 3; i < n; ++i) kd[i] = i - 1.0;
    auto r = eig_smallest(CsrMatrix::diagonal(kd), CsrMatrix::diagonal(std::vector<double>(n, 2.0)), 4);
    CHECK(std::abs(r.values[0]) <= 1e-12);
    CHECK(r.values[1] == doctest::Approx(0.5));
    CHECK(r.values[2] == doctest::Approx(0.5));
    CHECK(r.values[3] == doctest::Approx(1.0));
    // Largest pairs of the pencil B x = theta A x.
    auto big = eig_largest(CsrMatrix::identity(n), CsrMatrix::diagonal(kd), 2);
    CHECK(big.values[0] == doctest::Approx(n - 2.0));
    CHECK(big.values[1] == doctest::Approx(n - 3.0));
}

TEST_CASE("Gauss-Legendre rules") {
    for (int n : {1, 2, 5, 12}) {
        auto q = gauss_legendre(n, 0.0, 2.0);
        double wsum = 0.0, moment = 0.0;
        for (int i = 0; i < n; ++i) {
            wsum += q.w[i];
            moment += q.w[i] * std::pow(q.x[i], 2 * n - 1);
        }
        CHECK(wsum == doctest::Approx(2.0));
        CHECK(moment == doctest::Approx(std::pow(2.0, 2 * n) / (2 * n)).epsilon(1e-12));
    }
}

TEST_CASE("parallel_for runs every index once") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
    for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("parallel_for rethrows the smallest failing index") {
    try {
        parallel_for(
            100,
            [](std::size_t i) {
                if (i == 37 || i == 90) throw std::runtime_error(std::to_string(i));
            },
            3);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "37");
    }
}

TEST_CASE("worker count honours SIEVE_WORKERS") {
    setenv("SIEVE_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    setenv("SIEVE_WORKERS", "zero", 1);
    CHECK(worker_count() >= 1);
    unsetenv("SIEVE_WORKERS");
    CHECK(worker_count() >= 1);
}
