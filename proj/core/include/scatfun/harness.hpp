#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scatfun/channel.hpp"
#include "scatfun/zakest.hpp"

namespace scatfun::harness {

enum class WeightMode { random_unimodular, fiducial_file, explicit_values };

std::string to_string(WeightMode m);
WeightMode weight_mode_from_string(const std::string& s);

struct ExperimentConfig {
    channel::GridSpec grid{2, 1, 4};
    channel::SupportCover cover;
    channel::ModelParams model;

    WeightMode weight_mode = WeightMode::random_unimodular;
    std::string fiducial_path;          // weight_mode == fiducial_file
    Eigen::VectorXcd explicit_weights;  // weight_mode == explicit_values

    long J = 16;
    std::vector<long> J_sweep;  // optional; used by the sweep front end
    std::uint64_t master_seed = 1;

    // execution knobs, not part of the config-file contract
    int threads = 1;
    bool deterministic_draw = false;  // test hook: eta = sqrt(C)

    bool equivalent(const ExperimentConfig& o) const;  // ignores execution knobs
};

struct CurvePoint {
    long J = 0;
    double rel_mse = 0.0;
    double variance = 0.0;  // mean per-cell Var of the final estimator (block estimate)
    std::uint64_t seed = 0;
};

struct RunReport {
    double rel_mse = 0.0;
    bool zero_truth = false;  // ||C|| == 0; rel_mse then holds the absolute error
    std::vector<CurvePoint> curve;
    double cond_K = 0.0;
    double negativity = 0.0;
    double wall_seconds = 0.0;
    std::uint64_t master_seed = 0;
    long J = 0;
    double variance = 0.0;      // as CurvePoint::variance
    double var_total = 0.0;     // sum over cells of the per-cell Var estimate
    double var_eff_dof = 0.0;   // (sum Var)^2 / sum Var^2

    /// determinism contract: everything except the wall clock
    bool equivalent(const RunReport& o) const;

    std::string to_text() const;
};

struct ExperimentResult {
    RunReport report;
    channel::ScatteringGrid truth;
    zakest::EstimatedScattering estimate;
    tfcore::SeedVector weights;
};

/**
 * Runs one J-sounding experiment: draws J independent channel states,
 * synthesizes echoes, accumulates the Zak autocorrelation, inverts, and
 * scores against the configured ground truth. Deterministic given
 * master_seed, independent of the worker count: trials are processed in
 * fixed blocks of 64 with one RNG stream per trial, and the per-block
 * partial sums are reduced in block order.
 */
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Independent experiments per J with disjoint seed streams.
std::vector<CurvePoint> mse_curve(const ExperimentConfig& cfg, const std::vector<long>& J_list);

/**
 * Ordinary least-squares slope of log(err^2) against log(J).
 * Throws DegenerateFit for fewer than 3 distinct J values.
 */
double slope_fit(const std::vector<std::pair<double, double>>& points);

/// Resolves the configured seed vector (drawing, loading + validating, or
/// copying as the mode dictates).
tfcore::SeedVector resolve_weights(const ExperimentConfig& cfg);

}  // namespace scatfun::harness
