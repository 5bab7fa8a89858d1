#pragma once

#include <cstdint>
#include <vector>

#include "scatfun/errors.hpp"

namespace scatfun::channel {

/**
 * Fully discrete circular grid.
 *
 * One sounding covers N = P*L*Ktilde samples. The pulse train has spacing
 * Ktilde samples and period L*Ktilde; the echo is treated circularly mod N.
 * Delay resolution is 1 sample, Doppler resolution 1/N cycles/sample, so the
 * bounding box is L*Ktilde delay taps by L*P Doppler bins and the prototype
 * box (a,b) occupies taps [a*Ktilde, (a+1)*Ktilde) x bins [b*P, (b+1)*P).
 */
struct GridSpec {
    int L;       // boxes per side of the bounding box
    int Ktilde;  // time samples per train spacing
    int P;       // train periods = Doppler bins per box

    GridSpec(int L_, int Ktilde_, int P_) : L(L_), Ktilde(Ktilde_), P(P_) {
        if (L < 1 || Ktilde < 1 || P < 1)
            throw ValidationError("GridSpec: L, Ktilde, P must all be >= 1");
    }

    long N() const { return static_cast<long>(P) * L * Ktilde; }
    int delay_taps() const { return L * Ktilde; }
    int doppler_bins() const { return L * P; }
    int patch_points() const { return Ktilde * P; }

    bool operator==(const GridSpec&) const = default;
};

struct Box {
    int a = 0;
    int b = 0;
    bool operator==(const Box&) const = default;
};

/**
 * A set of prototype-box translates covering the scattering support.
 *
 * Boxes are stored as given (coordinates may lie outside [0,L)); validity
 * requires all boxes distinct mod (L,L), which is exactly the anti-aliasing
 * condition that makes the patch decomposition collision-free.
 */
struct SupportCover {
    std::vector<Box> boxes;
    int L = 1;

    std::size_t size() const { return boxes.size(); }
    bool operator==(const SupportCover&) const = default;
};

inline int mod(int v, int m) {
    int r = v % m;
    return r < 0 ? r + m : r;
}

inline long modl(long v, long m) {
    long r = v % m;
    return r < 0 ? r + m : r;
}

/// Validates the anti-aliasing condition; throws AliasingViolation naming the
/// first offending pair of boxes congruent mod (L,L).
SupportCover build_cover(const std::vector<Box>& boxes, int L);

/// The full cover {0..L-1}^2 in column-inner order ((a,b) -> a*L + b).
SupportCover full_cover(int L);

}  // namespace scatfun::channel
