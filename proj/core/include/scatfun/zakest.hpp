#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "scatfun/channel.hpp"
#include "scatfun/tfcore.hpp"

namespace scatfun::zakest {

/**
 * Discrete circular realization of the non-normalized Zak transform,
 * Z(i, m) = sum_{n=0}^{P-1} y[(i + n*L*Ktilde) mod N] * e^{-2*pi*i*n*m/P}
 * for i in [0, L*Ktilde), m in [0, P). This samples the continuous
 * Zy(tau, nu) = sum_n y(tau - n*L*T) e^{2*pi*i*n*L*T*nu} on the grid
 * nu = m/N (not the same object as the "discrete Zak transform").
 */
Eigen::MatrixXcd zak(const Eigen::VectorXcd& y, const channel::GridSpec& grid);

/**
 * Phase-adjusted, normalized length-L patch vectors of the Zak transform.
 * At patch grid point (i, m), entry p is
 *   (1/P) * e^{-2*pi*i*m*(i + p*Ktilde)/N} * Z(i + p*Ktilde, m).
 * The normalization 1/P is the frozen discrete counterpart of the continuous
 * 1/B; together with the patch phase convention it is pinned by the
 * verify_factorization oracle and asserted in the convention tests.
 */
struct ZakPatchField {
    Eigen::MatrixXcd vectors;  // (Ktilde*P) x L, row index = i*P + m
    channel::GridSpec grid;

    Eigen::Index point(int i, int m) const {
        return static_cast<Eigen::Index>(i) * grid.P + m;
    }
};

ZakPatchField patch_vectors(const Eigen::MatrixXcd& Z, const channel::GridSpec& grid);

/**
 * The pipeline's master oracle. Synthesizes the echo of eta to the weighted
 * train, runs zak + patch_vectors, independently assembles the periodized
 * patch vector of eta itself, and returns the max over patch grid points of
 * || Zvec - G * etavec ||_inf. Under the frozen conventions this is exactly
 * zero up to rounding for every grid and cover.
 */
double verify_factorization(const channel::SpreadingDraw& eta, const tfcore::SeedVector& c);

/// The periodized, phase-adjusted patch vector of eta at patch point (i, m):
/// slot ((a mod L)*L + (b mod L)) += e^{2*pi*i*b*P*i/N} * eta[cell].
Eigen::MatrixXcd assemble_eta_vectors(const channel::SpreadingDraw& eta);

/**
 * Running average of vec(Zvec Zvec^*) per patch grid point (the equal-argument
 * diagonal slice of the 4-argument autocorrelation; the off-diagonal slice has
 * zero mean and is never used by the inversion). Merging accumulators adds
 * sums and counts; merge is a commutative monoid.
 */
struct AutocorrAccumulator {
    Eigen::MatrixXcd sums;  // (Ktilde*P) x L^2, row-major vec per point
    long count = 0;
    channel::GridSpec grid;

    explicit AutocorrAccumulator(const channel::GridSpec& g);

    void add(const ZakPatchField& field);        // throws GridMismatch
    void merge(const AutocorrAccumulator& other);  // throws GridMismatch
};

/// Operation form of AutocorrAccumulator::add; returns the accumulator.
AutocorrAccumulator& accumulate(const ZakPatchField& field, AutocorrAccumulator& acc);

/**
 * Scattering estimate: per patch grid point the real part of the least-squares
 * solution of K * v ~= sums/J, plus the reassembled bounding-box grid obtained
 * by translating patch values to their cover boxes. Negative values are
 * reported raw; negativity = sum(max(0,-v)) / sum(|v|) is the diagnostic.
 */
struct EstimatedScattering {
    Eigen::MatrixXd patch_values;  // (Ktilde*P) x |Gamma|
    channel::ScatteringGrid reassembled;
    double negativity = 0.0;
    double cond_K = 0.0;
    long soundings = 0;

    /// {"J":..,"rel_mse":..,"negativity":..,"cond_K":..}; rel_mse only when
    /// ground truth is supplied
    std::string summary_json(const channel::ScatteringGrid* truth = nullptr) const;
};

EstimatedScattering invert(const AutocorrAccumulator& acc, const tfcore::KroneckerMatrix& K);

/**
 * Cross-correlation alternative (area <= 1 regime, |Gamma| <= L). Estimates
 * E{ Zvec(i,m) * conj(y[i]) }, corrects by e^{+2*pi*i*m*i/N}, solves G_Gamma
 * in the least-squares sense and divides by conj(c[(-a_j) mod L]) per box.
 * The t = tau alignment and the conjugations are the ones fixed by the
 * single-scatterer oracle.
 */
EstimatedScattering cross_estimate(const std::vector<Eigen::VectorXcd>& y_ensemble,
                                   const std::vector<ZakPatchField>& field_ensemble,
                                   const channel::SupportCover& cover,
                                   const tfcore::SeedVector& c,
                                   const channel::GridSpec& grid);

/// Places patch values (rows = patch points, cols = cover boxes) onto the
/// bounding-box grid at the mod-L wrapped box locations.
channel::ScatteringGrid reassemble(const Eigen::MatrixXd& patch_values,
                                   const channel::SupportCover& cover,
                                   const channel::GridSpec& grid);

}  // namespace scatfun::zakest
