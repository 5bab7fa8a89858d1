#include "scatfun/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace scatfun::harness {

namespace {

// Trials are grouped in fixed blocks; workers claim whole blocks and the
// block partials are reduced in block order, so the floating-point summation
// tree is identical for every worker count.
constexpr long kBlock = 64;

// stream tags that can never collide with trial indices
constexpr std::uint64_t kWeightsTag = (1ULL << 62) + 1;

std::uint64_t curve_seed(std::uint64_t master, std::size_t point) {
    return rng::splitmix64(rng::splitmix64(master) +
                           (static_cast<std::uint64_t>(point) + 2) * rng::kGolden);
}

}  // namespace

std::string to_string(WeightMode m) {
    switch (m) {
        case WeightMode::random_unimodular: return "random_unimodular";
        case WeightMode::fiducial_file: return "fiducial_file";
        case WeightMode::explicit_values: return "explicit";
    }
    return "?";
}

WeightMode weight_mode_from_string(const std::string& s) {
    if (s == "random_unimodular") return WeightMode::random_unimodular;
    if (s == "fiducial_file") return WeightMode::fiducial_file;
    if (s == "explicit") return WeightMode::explicit_values;
    throw ValidationError("unknown weight mode: " + s);
}

bool ExperimentConfig::equivalent(const ExperimentConfig& o) const {
    return grid == o.grid && cover == o.cover && model == o.model &&
           weight_mode == o.weight_mode && fiducial_path == o.fiducial_path &&
           explicit_weights.size() == o.explicit_weights.size() &&
           explicit_weights == o.explicit_weights && J == o.J && J_sweep == o.J_sweep &&
           master_seed == o.master_seed;
}

bool RunReport::equivalent(const RunReport& o) const {
    if (!(rel_mse == o.rel_mse && zero_truth == o.zero_truth && cond_K == o.cond_K &&
          negativity == o.negativity && master_seed == o.master_seed && J == o.J &&
          variance == o.variance && var_total == o.var_total &&
          var_eff_dof == o.var_eff_dof && curve.size() == o.curve.size()))
        return false;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!(curve[i].J == o.curve[i].J && curve[i].rel_mse == o.curve[i].rel_mse &&
              curve[i].variance == o.curve[i].variance && curve[i].seed == o.curve[i].seed))
            return false;
    }
    return true;
}

std::string RunReport::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "J " << J << "\n"
       << "master_seed " << master_seed << "\n"
       << (zero_truth ? "abs_err " : "rel_mse ") << rel_mse << "\n"
       << "zero_truth " << (zero_truth ? 1 : 0) << "\n"
       << "cond_K " << cond_K << "\n"
       << "negativity " << negativity << "\n"
       << "variance " << variance << "\n"
       << "var_total " << var_total << "\n"
       << "var_eff_dof " << var_eff_dof << "\n"
       << "wall_seconds " << wall_seconds << "\n";
    for (const CurvePoint& p : curve)
        os << "curve " << p.J << " " << p.rel_mse << " " << p.variance << " seed " << p.seed
           << "\n";
    return os.str();
}

tfcore::SeedVector resolve_weights(const ExperimentConfig& cfg) {
    switch (cfg.weight_mode) {
        case WeightMode::random_unimodular: {
            rng::Stream s = rng::Stream::for_trial(cfg.master_seed, kWeightsTag);
            return tfcore::SeedVector::random_unimodular(cfg.grid.L, s);
        }
        case WeightMode::fiducial_file:
            return tfcore::load_fiducial_file(cfg.fiducial_path);
        case WeightMode::explicit_values: {
            if (cfg.explicit_weights.size() != cfg.grid.L)
                throw ValidationError("explicit weights length does not match grid.L");
            return tfcore::SeedVector::from_entries(cfg.explicit_weights);
        }
    }
    throw ValidationError("unreachable weight mode");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.J < 1) throw ValidationError("run_experiment: J must be >= 1");
    if (cfg.cover.L != cfg.grid.L)
        throw ValidationError("run_experiment: cover.L does not match grid.L");

    const channel::GridSpec& grid = cfg.grid;
    const tfcore::SeedVector weights = resolve_weights(cfg);
    const channel::Model model(cfg.model);
    const channel::ScatteringGrid truth = channel::discretize(model, grid, cfg.cover);
    const tfcore::KroneckerMatrix K = tfcore::build_K(weights, cfg.cover);
    const Eigen::VectorXcd x = channel::synth_train(weights, grid);

    const long nblocks = (cfg.J + kBlock - 1) / kBlock;
    std::vector<zakest::AutocorrAccumulator> blocks(
        static_cast<std::size_t>(nblocks), zakest::AutocorrAccumulator(grid));

    auto run_block = [&](long b) {
        zakest::AutocorrAccumulator& acc = blocks[static_cast<std::size_t>(b)];
        const long lo = b * kBlock;
        const long hi = std::min(cfg.J, lo + kBlock);
        for (long t = lo; t < hi; ++t) {
            channel::SpreadingDraw eta = [&] {
                if (cfg.deterministic_draw) return channel::deterministic_draw(truth);
                rng::Stream stream = rng::Stream::for_trial(cfg.master_seed,
                                                            static_cast<std::uint64_t>(t));
                return channel::draw_spreading(truth, stream);
            }();
            const Eigen::VectorXcd y = channel::apply_channel(eta, x);
            zakest::accumulate(zakest::patch_vectors(zakest::zak(y, grid), grid), acc);
        }
    };

    const int workers = std::max(1, cfg.threads);
    if (workers == 1 || nblocks == 1) {
        for (long b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        const int n = std::min<long>(workers, nblocks);
        pool.reserve(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w)
            pool.emplace_back([&] {
                for (long b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    // per-block estimates for the empirical variance of the final estimator;
    // only full blocks enter (needs >= 2 of them)
    const long full_blocks = cfg.J / kBlock;
    Eigen::MatrixXd mean_est, m2_est;
    if (full_blocks >= 2) {
        for (long b = 0; b < full_blocks; ++b) {
            const auto& acc = blocks[static_cast<std::size_t>(b)];
            Eigen::MatrixXd vb(grid.patch_points(),
                               static_cast<Eigen::Index>(cfg.cover.size()));
            for (Eigen::Index pt = 0; pt < acc.sums.rows(); ++pt) {
                const Eigen::VectorXcd rhs =
                    acc.sums.row(pt).transpose() / static_cast<double>(acc.count);
                vb.row(pt) = K.solve(rhs).real().transpose();
            }
            if (b == 0) {
                mean_est = Eigen::MatrixXd::Zero(vb.rows(), vb.cols());
                m2_est = mean_est;
            }
            mean_est += vb;
            m2_est += vb.cwiseProduct(vb);
        }
        mean_est /= static_cast<double>(full_blocks);
        m2_est /= static_cast<double>(full_blocks);
    }

    zakest::AutocorrAccumulator total(grid);
    for (const auto& acc : blocks) total.merge(acc);
    zakest::EstimatedScattering estimate = zakest::invert(total, K);

    RunReport report;
    report.master_seed = cfg.master_seed;
    report.J = cfg.J;
    report.cond_K = K.cond();
    report.negativity = estimate.negativity;
    const double truth_norm = truth.l2_norm();
    const double err = (estimate.reassembled.values - truth.values).norm();
    report.zero_truth = !(truth_norm > 0.0);
    report.rel_mse = report.zero_truth ? err : err / truth_norm;

    if (full_blocks >= 2) {
        // Var(final) per cell ~= block sample variance / #blocks
        const Eigen::MatrixXd var_cells =
            (m2_est - mean_est.cwiseProduct(mean_est)) *
            (static_cast<double>(full_blocks) / (full_blocks - 1.0)) /
            static_cast<double>(full_blocks);
        const double vt = var_cells.sum();
        report.var_total = vt;
        report.variance = vt / static_cast<double>(var_cells.size());
        const double vsq = var_cells.cwiseProduct(var_cells).sum();
        report.var_eff_dof = vsq > 0.0 ? vt * vt / vsq : 0.0;
    }
    report.curve.push_back(
        CurvePoint{cfg.J, report.rel_mse, report.variance, cfg.master_seed});
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    return ExperimentResult{std::move(report), truth, std::move(estimate), weights};
}

std::vector<CurvePoint> mse_curve(const ExperimentConfig& cfg,
                                  const std::vector<long>& J_list) {
    if (J_list.empty()) throw ValidationError("mse_curve: J list must be nonempty");
    std::vector<CurvePoint> out;
    out.reserve(J_list.size());
    for (std::size_t p = 0; p < J_list.size(); ++p) {
        ExperimentConfig point_cfg = cfg;
        point_cfg.J = J_list[p];
        point_cfg.J_sweep.clear();
        point_cfg.master_seed = curve_seed(cfg.master_seed, p);
        const ExperimentResult res = run_experiment(point_cfg);
        out.push_back(CurvePoint{J_list[p], res.report.rel_mse, res.report.variance,
                                 point_cfg.master_seed});
    }
    return out;
}

double slope_fit(const std::vector<std::pair<double, double>>& points) {
    std::vector<double> xs, ys;
    for (const auto& [J, err] : points) {
        if (!(J > 0.0) || !(err > 0.0))
            throw DegenerateFit("slope_fit: needs positive J and err values");
        xs.push_back(std::log(J));
        ys.push_back(2.0 * std::log(err));
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
        throw DegenerateFit("slope_fit: needs at least 3 distinct J values");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace scatfun::harness
