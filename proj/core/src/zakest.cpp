#include "scatfun/zakest.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace scatfun::zakest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using channel::modl;
using tfcore::cd;

cd unit_phase(long num, long den) {
    return std::polar(1.0, kTwoPi * static_cast<double>(modl(num, den)) / den);
}

}  // namespace

Eigen::MatrixXcd zak(const Eigen::VectorXcd& y, const channel::GridSpec& grid) {
    const long N = grid.N();
    if (y.size() != N) throw GridMismatch("zak: signal length does not match grid N");
    const int rows = grid.delay_taps();
    const int P = grid.P;
    Eigen::MatrixXcd Z(rows, P);
    for (int i = 0; i < rows; ++i)
        for (int m = 0; m < P; ++m) {
            cd s = 0.0;
            for (int n = 0; n < P; ++n)
                s += y[modl(i + static_cast<long>(n) * rows, N)] *
                     unit_phase(-static_cast<long>(n) * m, P);
            Z(i, m) = s;
        }
    return Z;
}

ZakPatchField patch_vectors(const Eigen::MatrixXcd& Z, const channel::GridSpec& grid) {
    if (Z.rows() != grid.delay_taps() || Z.cols() != grid.P)
        throw GridMismatch("patch_vectors: Zak table shape does not match grid");
    const long N = grid.N();
    const double gamma_z = 1.0 / grid.P;  // frozen discrete counterpart of 1/B
    ZakPatchField field{Eigen::MatrixXcd(grid.patch_points(), grid.L), grid};
    for (int i = 0; i < grid.Ktilde; ++i)
        for (int m = 0; m < grid.P; ++m)
            for (int p = 0; p < grid.L; ++p) {
                const long tap = i + static_cast<long>(p) * grid.Ktilde;
                field.vectors(field.point(i, m), p) =
                    gamma_z * unit_phase(-static_cast<long>(m) * tap, N) * Z(tap, m);
            }
    return field;
}

Eigen::MatrixXcd assemble_eta_vectors(const channel::SpreadingDraw& eta) {
    const channel::GridSpec& g = eta.grid;
    const long N = g.N();
    Eigen::MatrixXcd out =
        Eigen::MatrixXcd::Zero(g.patch_points(), static_cast<Eigen::Index>(g.L) * g.L);
    for (const channel::Box& box : eta.cover.boxes) {
        const int ka = channel::mod(box.a, g.L) * g.Ktilde;
        const int mb = channel::mod(box.b, g.L) * g.P;
        const Eigen::Index slot =
            static_cast<Eigen::Index>(channel::mod(box.a, g.L)) * g.L +
            channel::mod(box.b, g.L);
        for (int i = 0; i < g.Ktilde; ++i)
            for (int m = 0; m < g.P; ++m) {
                // patch phase: e^{2*pi*i*b*P*i/N}, the discrete e^{2*pi*i*b*B*tau}
                const cd phase = unit_phase(static_cast<long>(box.b) * g.P * i, N);
                out(static_cast<Eigen::Index>(i) * g.P + m, slot) +=
                    phase * eta.values(ka + i, mb + m);
            }
    }
    return out;
}

double verify_factorization(const channel::SpreadingDraw& eta, const tfcore::SeedVector& c) {
    const channel::GridSpec& g = eta.grid;
    const Eigen::VectorXcd x = channel::synth_train(c, g);
    const Eigen::VectorXcd y = channel::apply_channel(eta, x);
    const ZakPatchField field = patch_vectors(zak(y, g), g);
    const tfcore::GaborFrame frame = tfcore::build_frame(c);
    const Eigen::MatrixXcd ev = assemble_eta_vectors(eta);

    double max_err = 0.0;
    for (Eigen::Index pt = 0; pt < field.vectors.rows(); ++pt) {
        const Eigen::VectorXcd lhs = field.vectors.row(pt).transpose();
        const Eigen::VectorXcd rhs = frame.columns * ev.row(pt).transpose();
        max_err = std::max(max_err, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return max_err;
}

AutocorrAccumulator::AutocorrAccumulator(const channel::GridSpec& g)
    : sums(Eigen::MatrixXcd::Zero(g.patch_points(), static_cast<Eigen::Index>(g.L) * g.L)),
      count(0),
      grid(g) {}

void AutocorrAccumulator::add(const ZakPatchField& field) {
    if (!(field.grid == grid))
        throw GridMismatch("AutocorrAccumulator::add: field grid does not match");
    const int L = grid.L;
    for (Eigen::Index pt = 0; pt < field.vectors.rows(); ++pt) {
        const auto z = field.vectors.row(pt);
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j)
                sums(pt, static_cast<Eigen::Index>(i) * L + j) += z(i) * std::conj(z(j));
    }
    ++count;
}

void AutocorrAccumulator::merge(const AutocorrAccumulator& other) {
    if (!(other.grid == grid))
        throw GridMismatch("AutocorrAccumulator::merge: grids do not match");
    sums += other.sums;
    count += other.count;
}

AutocorrAccumulator& accumulate(const ZakPatchField& field, AutocorrAccumulator& acc) {
    acc.add(field);
    return acc;
}

channel::ScatteringGrid reassemble(const Eigen::MatrixXd& patch_values,
                                   const channel::SupportCover& cover,
                                   const channel::GridSpec& grid) {
    channel::ScatteringGrid out{
        Eigen::MatrixXd::Zero(grid.delay_taps(), grid.doppler_bins()), grid, cover, 0.0};
    for (std::size_t j = 0; j < cover.size(); ++j) {
        const int ka = channel::mod(cover.boxes[j].a, grid.L) * grid.Ktilde;
        const int mb = channel::mod(cover.boxes[j].b, grid.L) * grid.P;
        for (int i = 0; i < grid.Ktilde; ++i)
            for (int m = 0; m < grid.P; ++m)
                out.values(ka + i, mb + m) =
                    patch_values(static_cast<Eigen::Index>(i) * grid.P + m,
                                 static_cast<Eigen::Index>(j));
    }
    return out;
}

namespace {

EstimatedScattering finish_estimate(Eigen::MatrixXd patch_values,
                                    const channel::SupportCover& cover,
                                    const channel::GridSpec& grid, double cond,
                                    long soundings) {
    EstimatedScattering est;
    est.patch_values = std::move(patch_values);
    est.reassembled = reassemble(est.patch_values, cover, grid);
    double neg = 0.0, total = 0.0;
    for (Eigen::Index r = 0; r < est.patch_values.rows(); ++r)
        for (Eigen::Index c = 0; c < est.patch_values.cols(); ++c) {
            const double v = est.patch_values(r, c);
            neg += std::max(0.0, -v);
            total += std::abs(v);
        }
    est.negativity = total > 0.0 ? neg / total : 0.0;
    est.cond_K = cond;
    est.soundings = soundings;
    return est;
}

}  // namespace

EstimatedScattering invert(const AutocorrAccumulator& acc, const tfcore::KroneckerMatrix& K) {
    if (acc.count < 1) throw EmptyAccumulator("invert: accumulator holds no soundings");
    if (static_cast<int>(K.cover.L) != acc.grid.L)
        throw GridMismatch("invert: K cover does not match accumulator grid");
    const Eigen::Index n_boxes = static_cast<Eigen::Index>(K.cover.size());
    Eigen::MatrixXd patch_values(acc.grid.patch_points(), n_boxes);
    for (Eigen::Index pt = 0; pt < acc.sums.rows(); ++pt) {
        const Eigen::VectorXcd rhs = acc.sums.row(pt).transpose() / static_cast<double>(acc.count);
        patch_values.row(pt) = K.solve(rhs).real().transpose();
    }
    return finish_estimate(std::move(patch_values), K.cover, acc.grid, K.cond(), acc.count);
}

EstimatedScattering cross_estimate(const std::vector<Eigen::VectorXcd>& y_ensemble,
                                   const std::vector<ZakPatchField>& field_ensemble,
                                   const channel::SupportCover& cover,
                                   const tfcore::SeedVector& c,
                                   const channel::GridSpec& grid) {
    const int L = grid.L;
    if (cover.size() > static_cast<std::size_t>(L)) {
        std::ostringstream msg;
        msg << "cross_estimate: cover has " << cover.size() << " boxes but the "
            << "cross-correlation route requires |Gamma| <= L = " << L;
        throw CoverTooLarge(msg.str());
    }
    if (y_ensemble.empty() || y_ensemble.size() != field_ensemble.size())
        throw ValidationError("cross_estimate: need matching, nonempty ensembles");
    const double c_max = c.entries.cwiseAbs().maxCoeff();
    for (int j = 0; j < c.L(); ++j)
        if (std::abs(c.entries[j]) <= 1e-12 * c_max)
            throw SingularWeights("cross_estimate: weight entry " + std::to_string(j) +
                                  " is numerically zero");

    // G restricted to the cover, and the diagonal weight correction
    Eigen::MatrixXcd G_gamma(L, static_cast<Eigen::Index>(cover.size()));
    Eigen::VectorXcd a_c(static_cast<Eigen::Index>(cover.size()));
    for (std::size_t j = 0; j < cover.size(); ++j) {
        G_gamma.col(static_cast<Eigen::Index>(j)) =
            tf_shift(c, cover.boxes[j].a, cover.boxes[j].b);
        a_c[static_cast<Eigen::Index>(j)] =
            std::conj(c.entries[channel::mod(-cover.boxes[j].a, L)]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G_gamma,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-10 * sv(0))
        throw RankDeficient("cross_estimate: G_Gamma is numerically singular");

    const long N = grid.N();
    const std::size_t J = y_ensemble.size();
    Eigen::MatrixXd patch_values(grid.patch_points(), static_cast<Eigen::Index>(cover.size()));
    Eigen::VectorXcd r(L);
    for (int i = 0; i < grid.Ktilde; ++i)
        for (int m = 0; m < grid.P; ++m) {
            r.setZero();
            for (std::size_t j = 0; j < J; ++j) {
                const auto& field = field_ensemble[j];
                if (!(field.grid == grid))
                    throw GridMismatch("cross_estimate: field grid does not match");
                r += field.vectors.row(field.point(i, m)).transpose() *
                     std::conj(y_ensemble[j][i]);
            }
            r *= unit_phase(static_cast<long>(m) * i, N) / static_cast<double>(J);
            const Eigen::VectorXcd v = svd.solve(r);
            for (Eigen::Index b = 0; b < v.size(); ++b)
                patch_values(static_cast<Eigen::Index>(i) * grid.P + m, b) =
                    (v[b] / a_c[b]).real();
        }
    return finish_estimate(std::move(patch_values), cover, grid, sv(0) / sv(sv.size() - 1),
                           static_cast<long>(J));
}

std::string EstimatedScattering::summary_json(const channel::ScatteringGrid* truth) const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"J\":" << soundings;
    if (truth) {
        const double denom = truth->l2_norm();
        const double err = (reassembled.values - truth->values).norm();
        if (denom > 0.0)
            os << ",\"rel_mse\":" << err / denom;
        else
            os << ",\"abs_err\":" << err << ",\"zero_truth\":true";
    }
    os << ",\"negativity\":" << negativity << ",\"cond_K\":" << cond_K << "}";
    return os.str();
}

}  // namespace scatfun::zakest
