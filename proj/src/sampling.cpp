#include "lagsym/sampling.hpp"

#include "lagsym/errors.hpp"

namespace lagsym {

Real Sampler::draw(const BoxInterval& b) {
    std::uniform_real_distribution<Real> dist(b.lo, b.hi);
    Real x = dist(rng_);
    if (b.shell) {
        // Two-sided shell +-[lo, hi]: flip the sign of half the draws.
        std::uniform_int_distribution<int> coin(0, 1);
        if (coin(rng_)) x = -x;
    }
    return x;
}

PhasePoint Sampler::sample() {
    const int D = sys_->dim();
    for (int tries = 0; tries < 10000; ++tries) {
        PhasePoint u;
        u.q.resize(D);
        u.v.resize(D);
        for (int i = 0; i < D; ++i) u.q[i] = draw(sys_->spec.q_box[i]);
        for (int i = 0; i < D; ++i) u.v[i] = draw(sys_->spec.v_box[i]);
        if (guard_margin(*sys_, u) >= guard_min_) return u;
    }
    throw GuardViolation("rejection sampling failed: domain box is dominated by guard sets");
}

std::vector<PhasePoint> Sampler::sample_n(int n) {
    std::vector<PhasePoint> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(sample());
    return out;
}

bool admissible(const CompiledLagrangian& sys, const PhasePoint& u, Real guard_min) {
    return u.q.allFinite() && u.v.allFinite() && guard_margin(sys, u) >= guard_min;
}

bool in_box(const CompiledLagrangian& sys, const PhasePoint& u) {
    const int D = sys.dim();
    auto inside = [](const BoxInterval& b, Real x) {
        if (b.shell) {
            Real a = std::abs(x);
            return a >= b.lo && a <= b.hi;
        }
        return x >= b.lo && x <= b.hi;
    };
    for (int i = 0; i < D; ++i)
        if (!inside(sys.spec.q_box[i], u.q[i]) || !inside(sys.spec.v_box[i], u.v[i]))
            return false;
    return true;
}

} // namespace lagsym
