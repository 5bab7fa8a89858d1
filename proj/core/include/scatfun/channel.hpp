#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "scatfun/grid.hpp"
#include "scatfun/rng.hpp"
#include "scatfun/tfcore.hpp"

namespace scatfun::channel {

enum class ModelId { C1, C2, C3 };

std::string to_string(ModelId id);
ModelId model_id_from_string(const std::string& s);

/**
 * Test-channel parameters with the reference defaults:
 *  C1: indicator of [0.12,0.4]x[0.1,0.35] plus a Gaussian bump at
 *      (0.66, 2.4) with sigma (0.07, 0.13);
 *  C2: Jakes-exponential, rho = 14, tau0 = 0.3, first quadrant;
 *  C3: squared random trigonometric polynomial, U = 30, V = 5, complex
 *      Gaussian coefficients drawn once from coeff_seed.
 * t_max/b_max give the physical bounding box (1 s x 3 Hz by default); all
 * estimation happens in grid units, physical scales are presentation-only.
 */
struct ModelParams {
    ModelId id = ModelId::C1;

    double box_tau_lo = 0.12, box_tau_hi = 0.40;
    double box_nu_lo = 0.10, box_nu_hi = 0.35;
    double mu_tau = 0.66, mu_nu = 2.4;
    double sigma_tau = 0.07, sigma_nu = 0.13;

    double rho = 14.0, tau0 = 0.3;

    int U = 30, V = 5;
    std::uint64_t coeff_seed = 1;

    double t_max = 1.0, b_max = 3.0;

    bool operator==(const ModelParams&) const = default;
};

/**
 * Evaluable scattering-function model. C3's random coefficients are drawn once
 * at construction and cached so the channel is reproducible from coeff_seed.
 */
class Model {
  public:
    explicit Model(const ModelParams& params);

    /// nonnegative; identically zero outside [0,t_max] x [0,b_max]
    double eval(double tau, double nu) const;

    const ModelParams& params() const { return params_; }

  private:
    ModelParams params_;
    Eigen::MatrixXcd c3_coeffs_;  // row m+V/2, col n
};

/**
 * Discrete scattering function on the bounding box: values(k, m) >= 0 holds
 * the per-cell variance at delay tap k, Doppler bin m. Cells outside the
 * cover's boxes are exactly zero. Boxes with coordinates outside [0,L) store
 * at the mod-L wrapped location (collision-free by anti-aliasing).
 */
struct ScatteringGrid {
    Eigen::MatrixXd values;  // delay_taps x doppler_bins
    GridSpec grid;
    SupportCover cover;
    double dropped_mass = 0.0;  // fraction of bounding-box mass outside the cover

    double l2_norm() const { return values.norm(); }
};

/**
 * Samples the model at physical cell coordinates (k*t_scale, m*f_scale) and
 * zeroes everything outside the cover. For C2 only, the Doppler coordinate is
 * taken at bin centers (m+1/2)*f_scale so the edge singularity at b_max is
 * never sampled. t_scale/f_scale default to t_max/delay_taps, b_max/doppler_bins.
 */
ScatteringGrid discretize(const Model& model, const GridSpec& grid, const SupportCover& cover,
                          double t_scale, double f_scale);
ScatteringGrid discretize(const Model& model, const GridSpec& grid, const SupportCover& cover);

/// One channel state: eta(k,m) ~ CN(0, C(k,m)) independent across cells.
struct SpreadingDraw {
    Eigen::MatrixXcd values;
    GridSpec grid;
    SupportCover cover;
};

SpreadingDraw draw_spreading(const ScatteringGrid& C, rng::Stream& stream);

/// Test hook: eta = sqrt(C) in every cell (a channel state whose periodogram
/// equals the scattering function exactly).
SpreadingDraw deterministic_draw(const ScatteringGrid& C);

/**
 * Weighted delta train: x[l] = c[(l/Ktilde) mod L] when Ktilde | l, else 0,
 * periodic with period L*Ktilde over the circular length N.
 */
Eigen::VectorXcd synth_train(const tfcore::SeedVector& c, const GridSpec& grid);

struct ApplyStats {
    std::uint64_t mac_terms = 0;  // == active cells * N by construction
};

/**
 * Circular echo synthesis straight from the spreading representation:
 * y[l] = sum over active cells (k,m) of eta * e^{2*pi*i*m*l/N} * x[(l-k) mod N],
 * with (k,m) the cell's physical delay/Doppler in the period-N model.
 * Work is linear in the active support size.
 */
Eigen::VectorXcd apply_channel(const SpreadingDraw& eta, const Eigen::VectorXcd& x,
                               ApplyStats* stats = nullptr);

}  // namespace scatfun::channel
