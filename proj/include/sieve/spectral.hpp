#pragma once

#include <string>
#include <vector>

#include "sieve/mesh.hpp"
#include "sieve/numerics.hpp"

namespace sieve {

struct SpectrumReport {
    std::vector<double> values;      // ascending
    std::vector<double> residuals;   // ||K x - lambda M x|| / ||M x||
    std::string op;                  // "perforated", "homogenized" or "pencil"
    double eps = 0.0;
};

// k smallest eigenvalues of the pencil (K, M). Residuals must reach opts.tol (default 1e-8),
// otherwise NoConvergence. Values within 1e-10 below zero are reported as zero.
SpectrumReport spectrum(const CsrMatrix& K, const CsrMatrix& M, int k, const EigOptions& opts = {});

// Neumann Laplacian on a perforated mesh (periodic sides identified).
SpectrumReport perforated_spectrum(const Mesh& mesh, int k, const EigOptions& opts = {});
// Homogenized operator: stiffness plus the interface coupling with strength mu on a Gamma-doubled mesh.
SpectrumReport homogenized_spectrum(const Mesh& mesh, double mu, int k, const EigOptions& opts = {});

struct HausdorffResult {
    double value = 0.0;        // Hausdorff distance of {(1+x)^-1} and {(1+y)^-1}
    double uncertainty = 0.0;  // (1 + Lambda)^-1: the unseen tails lie in (0, uncertainty]
    int k = 0;
    double threshold = 0.0;    // Lambda
    bool valid = false;
};

// Distance of two truncated spectra of equal length. `threshold` < 0 selects the smaller of the
// two k-th values. Throws TruncationInvalid on unequal or empty lists, unsorted input, or when a
// k-th value is below the threshold.
HausdorffResult weighted_hausdorff(const std::vector<double>& x, const std::vector<double>& y,
                                   double threshold = -1.0);

struct SpectralRow {
    double eps = 0.0;
    std::vector<double> perforated, homogenized;
    HausdorffResult distance;
    double sigma = 0.0;
    double ratio() const { return sigma > 0.0 ? distance.value / sigma : 0.0; }
};

// Builds rows from matched spectra; the threshold is the smaller k-th value of each row.
std::vector<SpectralRow> spectral_gap_report(const std::vector<double>& eps,
                                             const std::vector<SpectrumReport>& perforated,
                                             const std::vector<SpectrumReport>& homogenized,
                                             const std::vector<double>& sigma);

std::string spectral_csv_header(int k);   // eps, lp1..lpk, lh1..lhk, distance, uncertainty, sigma
std::string spectral_csv_row(const SpectralRow& row);

}  // namespace sieve
