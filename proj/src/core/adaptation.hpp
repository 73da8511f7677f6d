#pragma once

#include "mutations.hpp"

#include <atomic>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace ramlt {

struct AdaptationConfig {
    int batch_size = 10;             // visits between updates (L)
    double gamma_max = 1.0;
    double gamma_scale = 5.0;
    double target_acceptance = 0.5;  // alpha*
    double lambda_init = 1.0;
    double lambda_min = -30.0;
    double sigma2_ratio = 1.0;       // sigma2 / sigma1 for multi-chain kernels
};

// Step size of the n-th update: min(gamma_max, gamma_scale / sqrt(n)).
// Non-increasing in n, which gives the diminishing-adaptation property.
double step_size(const AdaptationConfig &cfg, uint64_t n);

// One stochastic-approximation step: lambda moves by +-step_size(n) toward
// the acceptance target (sgn(0) = 0), clamped below at lambda_min.
double update_lambda(double lambda, double alpha_hat, uint64_t n, const AdaptationConfig &cfg);

// Per-region adaptation record. Visit and acceptance accumulators take
// lock-free concurrent updates; the lambda update runs under the per-region
// spinlock. lambda reads never block.
struct RegionState {
    std::atomic<double> lambda{0.0};
    std::atomic<uint32_t> visits{0};        // i_k, batch visit counter
    std::atomic<double> accum{0.0};         // A_k, batch acceptance sum
    std::atomic<uint64_t> updates{1};       // n_k
    std::atomic<uint64_t> total_visits{0};  // lifetime tallies
    std::atomic<double> total_accept{0.0};
    std::atomic_flag busy = ATOMIC_FLAG_INIT;

    RegionState() = default;
    RegionState(const RegionState &) = delete;
};

enum class ControllerKind { Fixed, Global, Regional };

// Emitted whenever a region's scaling parameter changes.
struct UpdateEvent {
    int region = 0;
    uint64_t n = 0;        // update ordinal within the region (1-based)
    double lambda = 0.0;   // value after the update
    double alpha_hat = 0.0;
};

// Owns the per-region states and applies the adaptation rule. The fixed
// variant never mutates anything; the global variant keeps a single region.
class KernelController {
public:
    KernelController(ControllerKind kind, const AdaptationConfig &cfg);

    ControllerKind kind() const { return kind_; }
    const AdaptationConfig &config() const { return cfg_; }

    // Appends a region initialized from the config. Not thread safe; call
    // during setup or at a refinement barrier.
    int allocate_region();

    // Appends a region inheriting the parent's lambda with n = max(1, n/4).
    int allocate_child(int parent);

    size_t region_count() const { return regions_.size(); }

    SigmaPair sigma_for(int region) const;
    double lambda_of(int region) const;
    uint64_t updates_of(int region) const;

    // A_k += a, i_k += 1; when the batch is full, applies the lambda update
    // and reports it. No-op for the fixed controller.
    std::optional<UpdateEvent> record_acceptance(int region, double a);

    struct Tally {
        double accept_sum = 0.0;
        uint64_t visits = 0;
    };
    std::vector<Tally> tallies() const;

private:
    ControllerKind kind_;
    AdaptationConfig cfg_;
    std::deque<RegionState> regions_;
};

// Residual of the region-independence identity: the visit-weighted sum of
// per-region mean acceptances minus the pooled mean acceptance, computed
// along two different floating-point paths.
double global_acceptance_identity(std::span<const KernelController::Tally> tallies);

} // namespace ramlt
