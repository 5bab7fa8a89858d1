#include "scatfun/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace scatfun::channel {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SupportCover build_cover(const std::vector<Box>& boxes, int L) {
    if (L < 1) throw ValidationError("build_cover: L must be >= 1");
    if (boxes.size() > static_cast<std::size_t>(L) * L)
        throw AliasingViolation("build_cover: more boxes than L^2 residues");
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            if (mod(boxes[i].a - boxes[j].a, L) == 0 &&
                mod(boxes[i].b - boxes[j].b, L) == 0) {
                std::ostringstream msg;
                msg << "build_cover: boxes (" << boxes[i].a << "," << boxes[i].b
                    << ") and (" << boxes[j].a << "," << boxes[j].b
                    << ") are congruent mod (" << L << "," << L << ")";
                throw AliasingViolation(msg.str());
            }
        }
    return SupportCover{boxes, L};
}

SupportCover full_cover(int L) {
    std::vector<Box> boxes;
    boxes.reserve(static_cast<std::size_t>(L) * L);
    for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b) boxes.push_back(Box{a, b});
    return SupportCover{std::move(boxes), L};
}

std::string to_string(ModelId id) {
    switch (id) {
        case ModelId::C1: return "C1";
        case ModelId::C2: return "C2";
        case ModelId::C3: return "C3";
    }
    return "?";
}

ModelId model_id_from_string(const std::string& s) {
    if (s == "C1") return ModelId::C1;
    if (s == "C2") return ModelId::C2;
    if (s == "C3") return ModelId::C3;
    throw ValidationError("unknown model id: " + s + " (expected C1, C2 or C3)");
}

Model::Model(const ModelParams& params) : params_(params) {
    if (params_.id == ModelId::C3) {
        const int half_v = params_.V / 2;
        rng::Stream stream(params_.coeff_seed);
        c3_coeffs_.resize(2 * half_v + 1, params_.U + 1);
        for (Eigen::Index r = 0; r < c3_coeffs_.rows(); ++r)
            for (Eigen::Index n = 0; n < c3_coeffs_.cols(); ++n) {
                double g1, g2;
                stream.next_gauss_pair(g1, g2);
                c3_coeffs_(r, n) = tfcore::cd(g1, g2);
            }
    }
}

double Model::eval(double tau, double nu) const {
    const ModelParams& p = params_;
    if (tau < 0.0 || tau > p.t_max || nu < 0.0 || nu > p.b_max) return 0.0;
    switch (p.id) {
        case ModelId::C1: {
            double v = 0.0;
            if (tau >= p.box_tau_lo && tau <= p.box_tau_hi && nu >= p.box_nu_lo &&
                nu <= p.box_nu_hi)
                v += 1.0;
            const double dt = (tau - p.mu_tau) / p.sigma_tau;
            const double dn = (nu - p.mu_nu) / p.sigma_nu;
            v += std::exp(-0.5 * (dt * dt + dn * dn)) /
                 (kTwoPi * p.sigma_tau * p.sigma_nu);
            return v;
        }
        case ModelId::C2: {
            if (nu >= p.b_max) return 0.0;  // edge singularity excluded
            const double delay = (p.rho * p.rho / p.tau0) * std::exp(-tau / p.tau0);
            const double doppler =
                p.rho * p.rho /
                (std::numbers::pi * std::sqrt(p.b_max * p.b_max - nu * nu));
            return delay * doppler / (p.rho * p.rho);
        }
        case ModelId::C3: {
            const int half_v = p.V / 2;
            tfcore::cd s = 0.0;
            for (int m = -half_v; m <= half_v; ++m)
                for (int n = 0; n <= p.U; ++n)
                    s += c3_coeffs_(m + half_v, n) *
                         std::polar(1.0, kTwoPi * (m * tau / p.t_max - n * nu / p.b_max));
            return std::norm(s);
        }
    }
    return 0.0;
}

ScatteringGrid discretize(const Model& model, const GridSpec& grid, const SupportCover& cover,
                          double t_scale, double f_scale) {
    if (cover.L != grid.L)
        throw ValidationError("discretize: cover dimension does not match grid");
    const bool center_doppler = model.params().id == ModelId::C2;
    auto sample = [&](long k, long m) {
        const double nu = (static_cast<double>(m) + (center_doppler ? 0.5 : 0.0)) * f_scale;
        return model.eval(static_cast<double>(k) * t_scale, nu);
    };

    ScatteringGrid out{Eigen::MatrixXd::Zero(grid.delay_taps(), grid.doppler_bins()), grid,
                       cover, 0.0};
    double kept = 0.0;
    for (const Box& box : cover.boxes) {
        const int ka = mod(box.a, grid.L) * grid.Ktilde;
        const int mb = mod(box.b, grid.L) * grid.P;
        for (int i = 0; i < grid.Ktilde; ++i)
            for (int m = 0; m < grid.P; ++m) {
                const double v = sample(static_cast<long>(box.a) * grid.Ktilde + i,
                                        static_cast<long>(box.b) * grid.P + m);
                out.values(ka + i, mb + m) = v;
                kept += v;
            }
    }
    // dropped-mass diagnostic: bounding-box mass the cover does not see
    double total = 0.0;
    for (int k = 0; k < grid.delay_taps(); ++k)
        for (int m = 0; m < grid.doppler_bins(); ++m) total += sample(k, m);
    out.dropped_mass = total > 0.0 ? std::max(0.0, (total - kept) / total) : 0.0;
    return out;
}

ScatteringGrid discretize(const Model& model, const GridSpec& grid, const SupportCover& cover) {
    return discretize(model, grid, cover, model.params().t_max / grid.delay_taps(),
                      model.params().b_max / grid.doppler_bins());
}

SpreadingDraw draw_spreading(const ScatteringGrid& C, rng::Stream& stream) {
    const GridSpec& g = C.grid;
    SpreadingDraw draw{Eigen::MatrixXcd::Zero(g.delay_taps(), g.doppler_bins()), g, C.cover};
    // cells are consumed in a fixed order (cover order, then i, then m) so a
    // given stream always yields the same draw
    for (const Box& box : C.cover.boxes) {
        const int ka = mod(box.a, g.L) * g.Ktilde;
        const int mb = mod(box.b, g.L) * g.P;
        for (int i = 0; i < g.Ktilde; ++i)
            for (int m = 0; m < g.P; ++m) {
                double g1, g2;
                stream.next_gauss_pair(g1, g2);
                const double sigma = std::sqrt(C.values(ka + i, mb + m) / 2.0);
                draw.values(ka + i, mb + m) = tfcore::cd(sigma * g1, sigma * g2);
            }
    }
    return draw;
}

SpreadingDraw deterministic_draw(const ScatteringGrid& C) {
    const GridSpec& g = C.grid;
    SpreadingDraw draw{Eigen::MatrixXcd::Zero(g.delay_taps(), g.doppler_bins()), g, C.cover};
    draw.values = C.values.cwiseSqrt().cast<tfcore::cd>();
    return draw;
}

Eigen::VectorXcd synth_train(const tfcore::SeedVector& c, const GridSpec& grid) {
    if (c.L() != grid.L)
        throw ValidationError("synth_train: seed length does not match grid.L");
    const long N = grid.N();
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(N);
    for (long l = 0; l < N; l += grid.Ktilde)
        x[l] = c.entries[(l / grid.Ktilde) % grid.L];
    return x;
}

Eigen::VectorXcd apply_channel(const SpreadingDraw& eta, const Eigen::VectorXcd& x,
                               ApplyStats* stats) {
    const GridSpec& g = eta.grid;
    const long N = g.N();
    if (x.size() != N)
        throw GridMismatch("apply_channel: train length does not match grid N");
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(N);
    std::uint64_t macs = 0;
    for (const Box& box : eta.cover.boxes) {
        const int ka = mod(box.a, g.L) * g.Ktilde;
        const int mb = mod(box.b, g.L) * g.P;
        for (int i = 0; i < g.Ktilde; ++i)
            for (int m = 0; m < g.P; ++m) {
                const tfcore::cd v = eta.values(ka + i, mb + m);
                const long k_phys = modl(static_cast<long>(box.a) * g.Ktilde + i, N);
                const long m_phys = modl(static_cast<long>(box.b) * g.P + m, N);
                for (long l = 0; l < N; ++l) {
                    y[l] += v *
                            std::polar(1.0, kTwoPi * static_cast<double>(
                                                         modl(m_phys * l, N)) / N) *
                            x[modl(l - k_phys, N)];
                }
                macs += static_cast<std::uint64_t>(N);
            }
    }
    if (stats) stats->mac_terms = macs;
    return y;
}

}  // namespace scatfun::channel
