#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>

#include "scatfun/grid.hpp"
#include "scatfun/rng.hpp"

namespace scatfun::tfcore {

using cd = std::complex<double>;

/**
 * Seed (weight) vector c in C^L generating both the Gabor frame and the
 * sounding train. "unimodular" marks vectors constructed with all entries on
 * the unit circle.
 */
struct SeedVector {
    Eigen::VectorXcd entries;
    bool unimodular = false;

    int L() const { return static_cast<int>(entries.size()); }
    double norm() const { return entries.norm(); }

    static SeedVector from_entries(Eigen::VectorXcd v);
    static SeedVector random_unimodular(int L, rng::Stream& stream);
    /// random complex Gaussian direction, normalized to unit length
    static SeedVector random_unit(int L, rng::Stream& stream);
};

/**
 * Discrete time-frequency shift: out[j] = e^{2*pi*i*j*b/L} * c[(j-a) mod L].
 * a and b are reduced mod L; phases are computed from exact integer residues
 * so that shift algebra holds to machine precision.
 */
Eigen::VectorXcd tf_shift(const SeedVector& c, int a, int b);

/**
 * Ambiguity (discrete STFT of c against its own shifts):
 * values(a,b) = <c, pi(a,b)c> with <u,v> = sum u[j]*conj(v[j]).
 */
struct AmbiguityTable {
    Eigen::MatrixXcd values;  // L x L

    double total_energy() const;  // sum over all (a,b) of |values|^2
    double off_peak_max() const;  // max over (a,b) != (0,0) of |values|
    double off_peak_min() const;
};

AmbiguityTable ambiguity(const SeedVector& c);

/**
 * Weyl-Heisenberg-Gabor frame: L x L^2 matrix whose column (a,b) is
 * tf_shift(c,a,b). Column indexing is a-major: col(a,b) = a*L + b.
 */
struct GaborFrame {
    Eigen::MatrixXcd columns;
    SeedVector seed;

    int L() const { return static_cast<int>(columns.rows()); }
    Eigen::Index col_index(int a, int b) const {
        const int L_ = L();
        return static_cast<Eigen::Index>(channel::mod(a, L_)) * L_ + channel::mod(b, L_);
    }
};

GaborFrame build_frame(const SeedVector& c);

/**
 * The L^2 x |Gamma| matrix K relating the Zak autocorrelation to the
 * scattering patches. Column j is vec(c_l c_l^*) = c_l (x) conj(c_l) under
 * row-major vec, with c_l the frame column for box (a_j, b_j) mod L.
 *
 * An SVD is computed once at construction and reused for every per-patch-point
 * least-squares solve; the handle is read-only afterwards and safe to share.
 */
struct KroneckerMatrix {
    Eigen::MatrixXcd entries;
    channel::SupportCover cover;
    std::shared_ptr<const Eigen::JacobiSVD<Eigen::MatrixXcd>> factorization;
    double sv_min = 0.0;
    double sv_max = 0.0;

    double cond() const { return sv_max / sv_min; }
    /// least-squares solution of entries * v ~= rhs using the cached SVD
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;
};

/// Builds K for the given cover. Throws RankDeficient when the smallest
/// singular value falls below rank_tol relative to the largest.
KroneckerMatrix build_K(const SeedVector& c, const channel::SupportCover& cover,
                        double rank_tol = 1e-8);

/// vec(x y^*) under the module's frozen row-major vec convention.
Eigen::VectorXcd vec_outer(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y);

struct SpectralCheck {
    Eigen::VectorXd singular_values;  // all L^2, descending
    double cond = 0.0;
};

/**
 * Singular values and condition number of K_full (the full-cover K).
 * The returned values equal sqrt(L) * |V_c c(a,b)| as a multiset; the
 * calibration constant and exponent (gamma, p) = (sqrt(L), 1) are frozen by
 * the brute-force SVD oracle in the convention tests.
 */
SpectralCheck spectral_check(const SeedVector& c, double rank_tol = 1e-8);

/**
 * True iff every off-peak ambiguity modulus equals ||c||^2 / sqrt(L+1) within
 * tol * ||c||^2 — i.e. the Gabor orbit of c is equiangular (c is fiducial).
 */
bool validate_fiducial(const SeedVector& c, double tol);

struct FiducialSearchResult {
    SeedVector seed;      // unit norm
    double off_peak_max;  // achieved max_{(a,b)!=(0,0)} |V_c c|
};

/**
 * Best-effort numerical search for a fiducial vector: random restarts, descent
 * on the off-peak fourth-power potential, then damped Newton refinement of the
 * equiangularity residuals. No success guarantee; callers must check
 * validate_fiducial on the result.
 */
FiducialSearchResult search_fiducial(int L, std::uint64_t rng_seed, long max_iters);

/// Seed file format: line 1 is L, then L lines "re im".
SeedVector load_seed_file(const std::string& path);
void save_seed_file(const std::string& path, const SeedVector& c);

/// Loads and validates a fiducial; throws ValidationError with the worst
/// off-peak ambiguity value when validation at tol fails.
SeedVector load_fiducial_file(const std::string& path, double tol = 1e-6);

}  // namespace scatfun::tfcore
