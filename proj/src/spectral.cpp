#include "sieve/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "sieve/error.hpp"
#include "sieve/fem.hpp"

namespace sieve {

SpectrumReport spectrum(const CsrMatrix& K, const CsrMatrix& M, int k, const EigOptions& opts) {
    EigOptions o = opts;
    o.stall_tol = std::min(o.stall_tol, o.tol);
    EigenResult e = eig_smallest(K, M, k, o);
    SpectrumReport r;
    r.op = "pencil";
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        double v = e.values[i];
        if (v < -1e-10) fail(ErrorKind::NoConvergence, "negative eigenvalue " + std::to_string(v) + " of a semidefinite pencil");
        r.values.push_back(std::max(v, 0.0));
        r.residuals.push_back(e.residuals[i]);
        if (e.residuals[i] > o.tol)
            fail(ErrorKind::NoConvergence, "eigenpair residual " + std::to_string(e.residuals[i]) + " above tolerance");
    }
    return r;
}

namespace {
SpectrumReport condensed_spectrum(const Mesh& mesh, const CsrMatrix& K, const CsrMatrix& M, int k,
                                  const EigOptions& opts) {
    if (mesh.periodic_pairs.empty()) return spectrum(K, M, k, opts);
    DofMap dm = DofMap::periodic(mesh);
    return spectrum(dm.condense(K), dm.condense(M), k, opts);
}
}  // namespace

SpectrumReport perforated_spectrum(const Mesh& mesh, int k, const EigOptions& opts) {
    FemSystem sys = assemble(mesh);
    SpectrumReport r = condensed_spectrum(mesh, sys.K, sys.M, k, opts);
    r.op = "perforated";
    return r;
}

SpectrumReport homogenized_spectrum(const Mesh& mesh, double mu, int k, const EigOptions& opts) {
    FemSystem sys = assemble(mesh);
    CsrMatrix K = sys.K.combine(1.0, interface_coupling(mesh, mu), 1.0);
    SpectrumReport r = condensed_spectrum(mesh, K, sys.M, k, opts);
    r.op = "homogenized";
    return r;
}

HausdorffResult weighted_hausdorff(const std::vector<double>& x, const std::vector<double>& y, double threshold) {
    if (x.empty() || x.size() != y.size())
        fail(ErrorKind::TruncationInvalid, "truncated spectra must be non-empty and of equal length");
    if (!std::is_sorted(x.begin(), x.end()) || !std::is_sorted(y.begin(), y.end()))
        fail(ErrorKind::TruncationInvalid, "truncated spectra must be ascending");
    if (x.front() <= -1.0 || y.front() <= -1.0) fail(ErrorKind::TruncationInvalid, "values must exceed -1");
    HausdorffResult r;
    r.k = static_cast<int>(x.size());
    r.threshold = threshold < 0.0 ? std::min(x.back(), y.back()) : threshold;
    if (x.back() < r.threshold || y.back() < r.threshold)
        fail(ErrorKind::TruncationInvalid, "k-th eigenvalue below the truncation threshold");
    auto map = [](const std::vector<double>& v) {
        std::vector<double> m;
        for (double t : v) m.push_back(1.0 / (1.0 + t));
        return m;
    };
    auto a = map(x), b = map(y);
    auto directed = [](const std::vector<double>& p, const std::vector<double>& q) {
        double d = 0.0;
        for (double s : p) {
            double best = INFINITY;
            for (double t : q) best = std::min(best, std::abs(s - t));
            d = std::max(d, best);
        }
        return d;
    };
    r.value = std::max(directed(a, b), directed(b, a));
    r.uncertainty = 1.0 / (1.0 + r.threshold);
    r.valid = true;
    return r;
}

std::vector<SpectralRow> spectral_gap_report(const std::vector<double>& eps,
                                             const std::vector<SpectrumReport>& perforated,
                                             const std::vector<SpectrumReport>& homogenized,
                                             const std::vector<double>& sigma) {
    const std::size_t n = eps.size();
    if (perforated.size() != n || homogenized.size() != n || sigma.size() != n)
        fail(ErrorKind::MeshMismatch, "spectral report inputs differ in length");
    std::vector<SpectralRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        SpectralRow r;
        r.eps = eps[i];
        r.perforated = perforated[i].values;
        r.homogenized = homogenized[i].values;
        r.distance = weighted_hausdorff(r.perforated, r.homogenized);
        r.sigma = sigma[i];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string spectral_csv_header(int k) {
    std::ostringstream os;
    os << "eps";
    for (int i = 1; i <= k; ++i) os << ",lp" << i;
    for (int i = 1; i <= k; ++i) os << ",lh" << i;
    os << ",distance,uncertainty,sigma";
    return os.str();
}

std::string spectral_csv_row(const SpectralRow& row) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(10) << row.eps;
    for (double v : row.perforated) os << ',' << v;
    for (double v : row.homogenized) os << ',' << v;
    os << ',' << row.distance.value << ',' << row.distance.uncertainty << ',' << row.sigma;
    return os.str();
}

}  // namespace sieve
