#ifndef LAGSYM_SAMPLING_HPP
#define LAGSYM_SAMPLING_HPP

#include "lagsym/compile.hpp"
#include "lagsym/tangent.hpp"

#include <random>
#include <vector>

namespace lagsym {

// Rejection sampler over the spec's domain box; points whose guard margin
// falls below guard_min are discarded.  Deterministic for a fixed seed.
class Sampler {
public:
    Sampler(const CompiledLagrangian& sys, std::uint64_t seed,
            Real guard_min = kGuardMin)
        : sys_(&sys), rng_(seed), guard_min_(guard_min) {}

    PhasePoint sample();
    std::vector<PhasePoint> sample_n(int n);

private:
    Real draw(const BoxInterval& b);

    const CompiledLagrangian* sys_;
    std::mt19937_64 rng_;
    Real guard_min_;
};

bool admissible(const CompiledLagrangian& sys, const PhasePoint& u,
                Real guard_min = kGuardMin);

bool in_box(const CompiledLagrangian& sys, const PhasePoint& u);

} // namespace lagsym

#endif
