#pragma once

#include "path.hpp"
#include "sampling.hpp"

#include <optional>
#include <vector>

namespace ramlt {

enum class Strategy { LargeStep, Lens, MultiChain };

// Kernel scales for a perturbation: primary drives the first (lens) ray,
// secondary the rays leaving later non-specular chain starts.
struct SigmaPair {
    double primary = 1.0;
    double secondary = 1.0;
};

// Tentative path with its transition densities. Both densities are expressed
// in the same reduced area measure as eval_contribution, so their ratio is
// well defined. For regional controllers the reverse side must be re-evaluated
// with the proposal's region scales via perturbation_density.
struct Proposal {
    Path path;
    double t_forward = 0.0;
    double t_reverse = 0.0;
    Strategy strategy = Strategy::LargeStep;
    std::vector<int> perturbed;  // vertex indices whose outgoing ray was resampled
    int endpoint = 0;            // eye-subpath endpoint index
};

// Index of the eye-subpath endpoint for the lens perturbation: the first
// non-specular vertex after the camera, valid if it sits on the emitter or
// its successor is also non-specular.
std::optional<int> lens_eligibility(const Path &path);

struct MultiChainStructure {
    std::vector<int> perturbed;  // camera first
    int endpoint = 0;
};

// Chain starts and endpoint for the multi-chain perturbation. Requires a
// secondary ray: the first non-specular vertex after the camera must not be
// the final (emitter) vertex.
std::optional<MultiChainStructure> multichain_eligibility(const Path &path);

// Probability of selecting the configured perturbation for this path: 0.5
// when its structural preconditions hold, else 0. The large step receives
// the remaining mass.
double suitability(const Path &path, Strategy perturbation);

// Independent full-path regeneration; empty when tracing ends without an
// emitter hit. t_forward is the density of the new path and t_reverse the
// density of regenerating `current`; neither depends on the other path.
std::optional<Proposal> large_step(const SceneModel &scene, const Path &current,
                                   RandomSequence &rng, int max_vertices);

// Perturbs the primary ray and replays the specular chain to the endpoint,
// reconnecting to the unchanged light subpath. Empty on structural failure
// (miss, vertex-type mismatch, impossible specular replay).
std::optional<Proposal> lens_perturb(const SceneModel &scene, const Path &path,
                                     const SigmaPair &sigmas, RandomSequence &rng);

// Perturbs the ray leaving every non-specular chain start (primary with
// sigma1, later ones with sigma2), replaying each specular chain.
std::optional<Proposal> multichain_perturb(const SceneModel &scene, const Path &path,
                                           const SigmaPair &sigmas, RandomSequence &rng);

// Density of the perturbation that turns `from` into `to`, given the kernel
// scales attached to `from`: one angular factor per perturbed vertex times
// the measure-conversion Jacobians of the re-traced segments of `to`.
// Assumes both paths are structurally valid (trace-consistent segments).
double perturbation_density(const SceneModel &scene, const Path &from, const Path &to,
                            const std::vector<int> &perturbed, int endpoint,
                            const SigmaPair &sigmas);

// min(1, pi(y) T(x|y) s(j|y) / (pi(x) T(y|x) s(j|x))). Throws if the chain
// occupies a zero-measure state.
double mh_accept(double pi_current, double pi_proposal, double t_forward, double t_reverse,
                 double s_forward, double s_reverse);

} // namespace ramlt
