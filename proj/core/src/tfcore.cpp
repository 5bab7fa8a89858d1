#include "scatfun/tfcore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace scatfun::tfcore {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// unit phase e^{2*pi*i*num/den} with the integer residue reduced first
cd unit_phase(long num, long den) {
    return std::polar(1.0, kTwoPi * static_cast<double>(channel::modl(num, den)) / den);
}

}  // namespace

SeedVector SeedVector::from_entries(Eigen::VectorXcd v) {
    if (v.size() < 1) throw ValidationError("SeedVector: length must be >= 1");
    return SeedVector{std::move(v), false};
}

SeedVector SeedVector::random_unimodular(int L, rng::Stream& stream) {
    if (L < 1) throw ValidationError("SeedVector: length must be >= 1");
    Eigen::VectorXcd v(L);
    for (int j = 0; j < L; ++j)
        v[j] = std::polar(1.0, kTwoPi * stream.next_uniform());
    return SeedVector{std::move(v), true};
}

SeedVector SeedVector::random_unit(int L, rng::Stream& stream) {
    if (L < 1) throw ValidationError("SeedVector: length must be >= 1");
    Eigen::VectorXcd v(L);
    for (int j = 0; j < L; ++j) {
        double g1, g2;
        stream.next_gauss_pair(g1, g2);
        v[j] = cd(g1, g2);
    }
    v.normalize();
    return SeedVector{std::move(v), false};
}

Eigen::VectorXcd tf_shift(const SeedVector& c, int a, int b) {
    const int L = c.L();
    const int ar = channel::mod(a, L);
    const int br = channel::mod(b, L);
    Eigen::VectorXcd out(L);
    for (int j = 0; j < L; ++j)
        out[j] = unit_phase(static_cast<long>(j) * br, L) * c.entries[channel::mod(j - ar, L)];
    return out;
}

AmbiguityTable ambiguity(const SeedVector& c) {
    const int L = c.L();
    AmbiguityTable table;
    table.values.resize(L, L);
    for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b)
            table.values(a, b) = c.entries.dot(tf_shift(c, a, b));
    // Eigen's dot conjugates the first argument; the module convention
    // <u,v> = sum u[j] conj(v[j]) conjugates the second, so flip.
    table.values = table.values.conjugate().eval();
    return table;
}

double AmbiguityTable::total_energy() const { return values.squaredNorm(); }

double AmbiguityTable::off_peak_max() const {
    double best = 0.0;
    for (Eigen::Index a = 0; a < values.rows(); ++a)
        for (Eigen::Index b = 0; b < values.cols(); ++b)
            if (a != 0 || b != 0) best = std::max(best, std::abs(values(a, b)));
    return best;
}

double AmbiguityTable::off_peak_min() const {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < values.rows(); ++a)
        for (Eigen::Index b = 0; b < values.cols(); ++b)
            if (a != 0 || b != 0) best = std::min(best, std::abs(values(a, b)));
    return best;
}

GaborFrame build_frame(const SeedVector& c) {
    const int L = c.L();
    GaborFrame frame;
    frame.seed = c;
    frame.columns.resize(L, static_cast<Eigen::Index>(L) * L);
    for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b)
            frame.columns.col(static_cast<Eigen::Index>(a) * L + b) = tf_shift(c, a, b);
    return frame;
}

Eigen::VectorXcd vec_outer(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
    const Eigen::Index n = x.size(), m = y.size();
    Eigen::VectorXcd v(n * m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            v[i * m + j] = x[i] * std::conj(y[j]);
    return v;
}

KroneckerMatrix build_K(const SeedVector& c, const channel::SupportCover& cover,
                        double rank_tol) {
    const int L = c.L();
    if (cover.L != L)
        throw ValidationError("build_K: cover dimension does not match seed length");
    KroneckerMatrix K;
    K.cover = cover;
    K.entries.resize(static_cast<Eigen::Index>(L) * L,
                     static_cast<Eigen::Index>(cover.size()));
    for (std::size_t j = 0; j < cover.size(); ++j) {
        const Eigen::VectorXcd col = tf_shift(c, cover.boxes[j].a, cover.boxes[j].b);
        K.entries.col(static_cast<Eigen::Index>(j)) = vec_outer(col, col);
    }
    auto svd = std::make_shared<Eigen::JacobiSVD<Eigen::MatrixXcd>>(
        K.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd->singularValues();
    K.sv_max = sv.size() ? sv(0) : 0.0;
    K.sv_min = sv.size() ? sv(sv.size() - 1) : 0.0;
    if (K.sv_min <= rank_tol * K.sv_max) {
        std::ostringstream msg;
        msg << "build_K: rank-deficient Kronecker system (min/max singular value "
            << K.sv_min << " / " << K.sv_max << "); seed vector lacks the Haar property";
        throw RankDeficient(msg.str());
    }
    K.factorization = std::move(svd);
    return K;
}

Eigen::VectorXcd KroneckerMatrix::solve(const Eigen::VectorXcd& rhs) const {
    if (!factorization) throw RankDeficient("KroneckerMatrix: missing factorization");
    return factorization->solve(rhs);
}

SpectralCheck spectral_check(const SeedVector& c, double rank_tol) {
    const KroneckerMatrix K = build_K(c, channel::full_cover(c.L()), rank_tol);
    SpectralCheck out;
    out.singular_values = K.factorization->singularValues();
    out.cond = K.cond();
    return out;
}

bool validate_fiducial(const SeedVector& c, double tol) {
    const double n2 = c.entries.squaredNorm();
    if (!(n2 > 0.0)) throw ValidationError("validate_fiducial: zero seed vector");
    const double target = n2 / std::sqrt(static_cast<double>(c.L()) + 1.0);
    const AmbiguityTable table = ambiguity(c);
    for (Eigen::Index a = 0; a < table.values.rows(); ++a)
        for (Eigen::Index b = 0; b < table.values.cols(); ++b) {
            if (a == 0 && b == 0) continue;
            if (std::abs(std::abs(table.values(a, b)) - target) > tol * n2) return false;
        }
    return true;
}

namespace {

// off-peak |V|^2 values of the normalized candidate; sum is the constant L-1,
// so flattening (minimizing the max, or any p>2 power mean) targets a SIC
Eigen::VectorXd off_peak_sq(const Eigen::VectorXcd& v) {
    SeedVector c{v / v.norm(), false};
    const int L = c.L();
    const AmbiguityTable t = ambiguity(c);
    Eigen::VectorXd out(static_cast<Eigen::Index>(L) * L - 1);
    Eigen::Index k = 0;
    for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b)
            if (a || b) out[k++] = std::norm(t.values(a, b));
    return out;
}

double potential4(const Eigen::VectorXcd& v) { return off_peak_sq(v).squaredNorm(); }

double off_peak_max_of(const Eigen::VectorXcd& v) {
    return std::sqrt(off_peak_sq(v).maxCoeff());
}

// equiangularity residual: sum ( |V|^2 - 1/(L+1) )^2
double residual(const Eigen::VectorXcd& v) {
    const int L = static_cast<int>(v.size());
    const double w = 1.0 / (L + 1.0);
    return (off_peak_sq(v).array() - w).matrix().squaredNorm();
}

template <typename F>
Eigen::VectorXd num_gradient(F&& f, const Eigen::VectorXcd& v, double h) {
    const Eigen::Index n = v.size();
    Eigen::VectorXd g(2 * n);
    Eigen::VectorXcd w = v;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int part = 0; part < 2; ++part) {
            const cd delta = part == 0 ? cd(h, 0) : cd(0, h);
            w[i] = v[i] + delta;
            const double fp = f(w);
            w[i] = v[i] - delta;
            const double fm = f(w);
            w[i] = v[i];
            g[2 * i + part] = (fp - fm) / (2 * h);
        }
    }
    return g;
}

Eigen::VectorXcd apply_step(const Eigen::VectorXcd& v, const Eigen::VectorXd& dir, double t) {
    Eigen::VectorXcd w = v;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        w[i] += t * cd(dir[2 * i], dir[2 * i + 1]);
    return w;
}

// gradient descent with backtracking; returns iterations consumed
template <typename F>
long descend(F&& f, Eigen::VectorXcd& v, long budget, double tol) {
    double fv = f(v);
    long used = 0;
    double step = 0.5;
    while (used < budget && fv > tol) {
        const Eigen::VectorXd g = num_gradient(f, v, 1e-7);
        ++used;
        const double gn = g.norm();
        if (gn < 1e-14) break;
        bool moved = false;
        double t = step;
        for (int bt = 0; bt < 40 && used < budget; ++bt, ++used) {
            Eigen::VectorXcd w = apply_step(v, -g / gn, t);
            w.normalize();
            const double fw = f(w);
            if (fw < fv - 1e-12 * t * gn) {
                v = std::move(w);
                fv = fw;
                step = std::min(1.0, t * 2.0);
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    return used;
}

}  // namespace

FiducialSearchResult search_fiducial(int L, std::uint64_t rng_seed, long max_iters) {
    if (L < 2) throw ValidationError("search_fiducial: L must be >= 2");
    rng::Stream stream(rng_seed);

    Eigen::VectorXcd best = SeedVector::random_unit(L, stream).entries;
    double best_max = off_peak_max_of(best);
    long used = 0;
    int restart = 0;
    while (used < max_iters) {
        Eigen::VectorXcd v =
            restart == 0 ? best : SeedVector::random_unit(L, stream).entries;
        ++restart;
        // phase 1: flatten via the smooth fourth-power potential
        used += descend(potential4, v, std::min<long>(max_iters - used, 400), -1.0);
        // phase 2: polish the equiangularity residual to machine precision
        if (used < max_iters)
            used += descend(residual, v, std::min<long>(max_iters - used, 400), 1e-26);
        const double m = off_peak_max_of(v);
        if (m < best_max) {
            best_max = m;
            best = v;
        }
        const double welch = 1.0 / std::sqrt(L + 1.0);
        if (best_max - welch < 1e-9) break;
    }
    return FiducialSearchResult{SeedVector{best / best.norm(), false}, best_max};
}

SeedVector load_seed_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open seed file: " + path);
    int L = 0;
    if (!(in >> L) || L < 1)
        throw ParseError("seed file " + path + ": first line must be a positive length");
    Eigen::VectorXcd v(L);
    for (int j = 0; j < L; ++j) {
        double re, im;
        if (!(in >> re >> im))
            throw ParseError("seed file " + path + ": expected " + std::to_string(L) +
                             " lines of \"re im\"");
        v[j] = cd(re, im);
    }
    return SeedVector::from_entries(std::move(v));
}

void save_seed_file(const std::string& path, const SeedVector& c) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write seed file: " + path);
    out << c.L() << "\n";
    out.precision(17);
    for (int j = 0; j < c.L(); ++j)
        out << c.entries[j].real() << " " << c.entries[j].imag() << "\n";
}

SeedVector load_fiducial_file(const std::string& path, double tol) {
    SeedVector c = load_seed_file(path);
    if (!validate_fiducial(c, tol)) {
        const AmbiguityTable t = ambiguity(c);
        const double n2 = c.entries.squaredNorm();
        std::ostringstream msg;
        msg << "fiducial file " << path << " failed validation at tol " << tol
            << ": worst off-peak ambiguity " << t.off_peak_max() << " vs target "
            << n2 / std::sqrt(c.L() + 1.0);
        throw ValidationError(msg.str());
    }
    return c;
}

}  // namespace scatfun::tfcore
