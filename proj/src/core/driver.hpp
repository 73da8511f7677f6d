#pragma once

#include "adaptation.hpp"
#include "film.hpp"
#include "mutations.hpp"
#include "partition.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ramlt {

enum class StrategyVariant { Fixed, Global, RaGrid, RaQuadtree };

enum class PerturbationKind { Lens, MultiChain };

struct RenderConfig {
    StrategyVariant strategy = StrategyVariant::RaQuadtree;
    PerturbationKind perturbation = PerturbationKind::Lens;
    uint64_t mutations = 1'000'000;
    double time_budget_s = 0.0;  // > 0 switches to wall-clock mode
    int chains = 1;
    AdaptationConfig adaptation;
    int n_top = 20;
    int n_bottom = 50;
    uint64_t m_split = 5000;
    uint64_t m_refine = 10'000'000;
    uint64_t b_samples = 1'000'000;
    uint64_t seed = 1;
    int width = 256;
    int height = 256;
    int max_vertices = kDefaultMaxVertices;
    uint64_t metrics_interval = 1'000'000;
    bool trace_enabled = false;
    bool dump_partition = false;
    const Image *reference = nullptr;  // optional, for the metrics rRMSE column
};

struct BEstimate {
    double b = 0.0;
    double stderr_ = 0.0;
    uint64_t samples = 0;
};

// Mean of pi/p over independent eye-path samples; zero-contribution samples
// count as zero. Throws "black-scene" when every sample is zero.
BEstimate estimate_b(const SceneModel &scene, uint64_t samples, RandomSequence &rng,
                     int max_vertices = kDefaultMaxVertices);

struct MetricsRow {
    double time_s = 0.0;
    uint64_t mutations = 0;
    double rrmse = 0.0;  // NaN when no reference is configured
    double mean_acceptance = 0.0;  // perturbation proposals in this interval
};

struct TraceRow {
    uint64_t mutation_index = 0;
    UpdateEvent event;
};

struct RenderResult {
    Image image;
    BEstimate b;
    uint64_t total_mutations = 0;
    uint64_t perturbation_proposals = 0;
    uint64_t large_step_proposals = 0;
    double mean_acceptance = 0.0;      // perturbation proposals over the whole run
    double film_luminance = 0.0;       // unnormalized film luminance weight
    double identity_residual = 0.0;
    size_t region_count = 0;
    std::vector<MetricsRow> metrics;
    std::vector<TraceRow> trace;
    std::vector<KernelController::Tally> tallies;
    std::string partition_dump;
};

RenderResult run_render(SceneModel scene, const RenderConfig &config);

// Expected-value splat: (1-a) of the current contribution and a of the
// proposal's. Null proposal (or zero target) drops the corresponding term.
void splat(Film &film, const Contribution &current, const Contribution *proposal, double a);

const char *to_string(StrategyVariant v);
const char *to_string(PerturbationKind p);
std::optional<StrategyVariant> strategy_from_string(const std::string &s);
std::optional<PerturbationKind> perturbation_from_string(const std::string &s);

} // namespace ramlt
