#include "driver.hpp"

#include "check.hpp"
#include "diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ramlt {

namespace {

// dedicated RNG stream ids; chains use ids [0, chains)
constexpr uint64_t kStreamB = 0x4000000000000000ULL;
constexpr uint64_t kStreamInit = 0x4000000000000001ULL;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

} // namespace

BEstimate estimate_b(const SceneModel &scene, uint64_t samples, RandomSequence &rng,
                     int max_vertices) {
    RAMLT_CHECK(samples >= 1, "estimate_b needs at least one sample");
    double sum = 0.0, sum_sq = 0.0;
    for (uint64_t i = 0; i < samples; ++i) {
        EyeSubpath sub = trace_eye_subpath(scene, rng, max_vertices);
        double v = 0.0;
        if (sub.hit_emitter) {
            Contribution c = eval_contribution(scene, sub.path);
            if (c.pi > 0.0) {
                double p = 1.0;
                for (const TraceRecord &rec : sub.records)
                    p *= rec.dir_pdf * rec.area_conv;
                if (p > 0.0)
                    v = c.pi / p;
            }
        }
        sum += v;
        sum_sq += v * v;
    }
    double n = static_cast<double>(samples);
    double mean = sum / n;
    if (mean <= 0.0)
        throw std::runtime_error("black-scene: no sample carried any contribution");
    double var = samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), samples};
}

void splat(Film &film, const Contribution &current, const Contribution *proposal, double a) {
    if (a < 1.0 && current.pi > 0.0)
        film.add(current.raster, current.f * ((1.0 - a) / current.pi));
    if (proposal && a > 0.0 && proposal->pi > 0.0)
        film.add(proposal->raster, proposal->f * (a / proposal->pi));
}

namespace {

struct ChainState {
    Path path;
    Contribution contrib;
    RandomSequence rng;
    Film film;
    // perturbation acceptance tallies
    double accept_sum = 0.0;
    uint64_t pert_count = 0;
    uint64_t large_count = 0;
    double interval_accept_sum = 0.0;
    uint64_t interval_pert_count = 0;
};

struct RenderContext {
    const SceneModel &scene;
    const RenderConfig &cfg;
    Strategy perturbation;
    KernelController &controller;
    PartitionIndex *partition;  // null for fixed/global
    std::atomic<uint64_t> mutation_counter{0};
    std::vector<TraceRow> trace;
    std::mutex trace_mutex;
};

// Classifies the current path into its adaptation region. The path carries
// pi > 0, so its raster position exists; multi-chain eligibility holds
// whenever this is called for a perturbation proposal.
int classify_path(const RenderContext &ctx, const Path &path, const Contribution &contrib) {
    if (!ctx.partition)
        return 0;
    CanonicalPoint2 cy{0.0, 0.0};
    if (ctx.perturbation == Strategy::MultiChain) {
        auto st = multichain_eligibility(path);
        RAMLT_CHECK(st.has_value(), "classify on multi-chain ineligible path");
        // secondary ray leaves the first non-specular vertex after the camera
        int c = st->perturbed.size() > 1 ? st->perturbed[1] : st->endpoint;
        cy = cylindrical_coords(path.direction(c));
    }
    return ctx.partition->classify(contrib.raster, cy);
}

void run_chain_span(RenderContext &ctx, ChainState &chain, uint64_t steps) {
    const SceneModel &scene = ctx.scene;
    const RenderConfig &cfg = ctx.cfg;

    for (uint64_t step = 0; step < steps; ++step) {
        uint64_t index = ctx.mutation_counter.fetch_add(1, std::memory_order_relaxed);
        double s_pert = suitability(chain.path, ctx.perturbation);
        bool choose_pert = s_pert > 0.0 && chain.rng.next_double() < s_pert;

        double a = 0.0;
        std::optional<Proposal> prop;
        Contribution prop_contrib;

        if (choose_pert) {
            int region = classify_path(ctx, chain.path, chain.contrib);
            SigmaPair sigmas = ctx.controller.sigma_for(region);
            prop = ctx.perturbation == Strategy::Lens
                       ? lens_perturb(scene, chain.path, sigmas, chain.rng)
                       : multichain_perturb(scene, chain.path, sigmas, chain.rng);
            if (prop) {
                prop_contrib = eval_contribution(scene, prop->path);
                if (prop_contrib.pi > 0.0) {
                    if (ctx.controller.kind() == ControllerKind::Regional) {
                        int prop_region = classify_path(ctx, prop->path, prop_contrib);
                        SigmaPair rev = ctx.controller.sigma_for(prop_region);
                        prop->t_reverse = perturbation_density(scene, prop->path, chain.path,
                                                               prop->perturbed, prop->endpoint, rev);
                    }
                    // structure is preserved, so the reverse suitability matches
                    a = mh_accept(chain.contrib.pi, prop_contrib.pi, prop->t_forward,
                                  prop->t_reverse, s_pert, s_pert);
                }
            }
            if (ctx.partition)
                ctx.partition->record_visit(region);
            auto event = ctx.controller.record_acceptance(region, a);
            if (event && cfg.trace_enabled) {
                std::lock_guard<std::mutex> lock(ctx.trace_mutex);
                ctx.trace.push_back({index, *event});
            }
            chain.accept_sum += a;
            chain.interval_accept_sum += a;
            ++chain.pert_count;
            ++chain.interval_pert_count;
        } else {
            ++chain.large_count;
            prop = large_step(scene, chain.path, chain.rng, cfg.max_vertices);
            if (prop) {
                prop_contrib = eval_contribution(scene, prop->path);
                if (prop_contrib.pi > 0.0) {
                    double s_ls_x = 1.0 - s_pert;
                    double s_ls_y = 1.0 - suitability(prop->path, ctx.perturbation);
                    a = mh_accept(chain.contrib.pi, prop_contrib.pi, prop->t_forward,
                                  prop->t_reverse, s_ls_x, s_ls_y);
                }
            }
        }

        splat(chain.film, chain.contrib, prop_contrib.pi > 0.0 ? &prop_contrib : nullptr, a);
        if (a > 0.0 && chain.rng.next_double() < a) {
            chain.path = std::move(prop->path);
            chain.contrib = prop_contrib;
        }
    }
}

} // namespace

RenderResult run_render(SceneModel scene, const RenderConfig &cfg) {
    RAMLT_CHECK(cfg.chains >= 1, "need at least one chain");
    RAMLT_CHECK(cfg.width >= 1 && cfg.height >= 1, "resolution must be positive");
    RAMLT_CHECK(cfg.max_vertices >= 2, "max_vertices must be at least 2");
    scene.camera.configure_image(cfg.width, cfg.height);

    RenderResult result;
    {
        RandomSequence rng(cfg.seed, kStreamB);
        result.b = estimate_b(scene, cfg.b_samples, rng, cfg.max_vertices);
    }

    // controller + partition per strategy variant
    ControllerKind kind = ControllerKind::Regional;
    if (cfg.strategy == StrategyVariant::Fixed)
        kind = ControllerKind::Fixed;
    else if (cfg.strategy == StrategyVariant::Global)
        kind = ControllerKind::Global;
    KernelController controller(kind, cfg.adaptation);

    std::unique_ptr<PartitionIndex> partition;
    if (kind == ControllerKind::Regional) {
        bool lens = cfg.perturbation == PerturbationKind::Lens;
        if (cfg.strategy == StrategyVariant::RaGrid) {
            if (lens)
                partition = std::make_unique<LensGridPartition>(cfg.n_top, controller);
            else
                partition = std::make_unique<MultiChainGridPartition>(cfg.n_top, cfg.n_bottom,
                                                                      controller);
        } else {
            if (lens)
                partition = std::make_unique<LensQuadtreePartition>(controller);
            else
                partition = std::make_unique<MultiChainQuadtreePartition>(cfg.n_top, controller);
        }
    }

    RenderContext ctx{scene, cfg,
                      cfg.perturbation == PerturbationKind::Lens ? Strategy::Lens
                                                                 : Strategy::MultiChain,
                      controller, partition.get()};

    // chain initialization: repeat independent sampling until pi > 0
    std::vector<ChainState> chains(cfg.chains);
    for (int i = 0; i < cfg.chains; ++i) {
        ChainState &chain = chains[i];
        chain.rng = RandomSequence(cfg.seed, static_cast<uint64_t>(i));
        chain.film = Film(cfg.width, cfg.height);
        RandomSequence init_rng(cfg.seed, kStreamInit + static_cast<uint64_t>(i) * 2);
        constexpr uint64_t kMaxInitAttempts = 50'000'000;
        bool ok = false;
        for (uint64_t attempt = 0; attempt < kMaxInitAttempts; ++attempt) {
            EyeSubpath sub = trace_eye_subpath(scene, init_rng, cfg.max_vertices);
            if (!sub.hit_emitter)
                continue;
            Contribution c = eval_contribution(scene, sub.path);
            if (c.pi > 0.0) {
                chain.path = std::move(sub.path);
                chain.contrib = c;
                ok = true;
                break;
            }
        }
        if (!ok)
            throw std::runtime_error("black-scene: could not find an initial path");
    }

    const bool wall_clock = cfg.time_budget_s > 0.0;
    const uint64_t budget = wall_clock ? std::numeric_limits<uint64_t>::max() : cfg.mutations;
    const double t_start = now_seconds();

    uint64_t done = 0;
    uint64_t next_refine = cfg.m_refine;
    uint64_t next_metrics = cfg.metrics_interval;

    auto flush_metrics = [&](uint64_t at) {
        double sum = 0.0;
        uint64_t count = 0;
        for (ChainState &chain : chains) {
            sum += chain.interval_accept_sum;
            count += chain.interval_pert_count;
            chain.interval_accept_sum = 0.0;
            chain.interval_pert_count = 0;
        }
        MetricsRow row;
        row.time_s = now_seconds() - t_start;
        row.mutations = at;
        row.mean_acceptance = count > 0 ? sum / static_cast<double>(count) : 0.0;
        row.rrmse = std::numeric_limits<double>::quiet_NaN();
        if (cfg.reference) {
            Film merged(cfg.width, cfg.height);
            for (const ChainState &chain : chains)
                merged.merge(chain.film);
            Image img = merged.to_image(result.b.b / static_cast<double>(at));
            row.rrmse = error_report(img, *cfg.reference, kDefaultRrmseEpsilon, false).rrmse;
        }
        result.metrics.push_back(row);
    };

    while (done < budget) {
        uint64_t boundary = std::min({budget, next_refine, next_metrics});
        uint64_t span = boundary - done;
        if (wall_clock)
            span = std::min<uint64_t>(span, cfg.metrics_interval);

        // one worker per chain; joining is the synchronization barrier
        uint64_t per_chain = span / cfg.chains;
        uint64_t remainder = span % cfg.chains;
        if (cfg.chains == 1) {
            run_chain_span(ctx, chains[0], span);
        } else {
            std::vector<std::thread> workers;
            workers.reserve(cfg.chains);
            for (int i = 0; i < cfg.chains; ++i) {
                uint64_t steps = per_chain + (static_cast<uint64_t>(i) < remainder ? 1 : 0);
                workers.emplace_back(
                    [&ctx, &chains, i, steps] { run_chain_span(ctx, chains[i], steps); });
            }
            for (std::thread &w : workers)
                w.join();
        }
        done += span;

        if (done == next_refine) {
            if (partition)
                partition->refine(cfg.m_split);
            next_refine += cfg.m_refine;
        }
        if (done == next_metrics || done == budget) {
            flush_metrics(done);
            next_metrics = done + cfg.metrics_interval;
        }
        if (wall_clock && now_seconds() - t_start >= cfg.time_budget_s)
            break;
    }
    if (result.metrics.empty() || result.metrics.back().mutations != done)
        flush_metrics(done);

    // reduce
    Film total(cfg.width, cfg.height);
    double accept_sum = 0.0;
    for (ChainState &chain : chains) {
        total.merge(chain.film);
        accept_sum += chain.accept_sum;
        result.perturbation_proposals += chain.pert_count;
        result.large_step_proposals += chain.large_count;
    }
    result.total_mutations = done;
    result.film_luminance = total.total_luminance();
    result.mean_acceptance = result.perturbation_proposals > 0
                                 ? accept_sum / static_cast<double>(result.perturbation_proposals)
                                 : 0.0;
    result.image = done > 0 ? total.to_image(result.b.b / static_cast<double>(done))
                            : total.to_image(0.0);
    result.trace = std::move(ctx.trace);
    result.tallies = controller.tallies();
    result.identity_residual =
        global_acceptance_identity(std::span<const KernelController::Tally>(result.tallies));
    result.region_count = partition ? partition->region_count() : controller.region_count();
    if (cfg.dump_partition && partition) {
        std::ostringstream os;
        partition->dump(os, controller);
        result.partition_dump = os.str();
    }
    return result;
}

const char *to_string(StrategyVariant v) {
    switch (v) {
    case StrategyVariant::Fixed: return "fixed";
    case StrategyVariant::Global: return "global";
    case StrategyVariant::RaGrid: return "ra-grid";
    case StrategyVariant::RaQuadtree: return "ra-quadtree";
    }
    return "?";
}

const char *to_string(PerturbationKind p) {
    return p == PerturbationKind::Lens ? "lens" : "multi-chain";
}

std::optional<StrategyVariant> strategy_from_string(const std::string &s) {
    if (s == "fixed") return StrategyVariant::Fixed;
    if (s == "global") return StrategyVariant::Global;
    if (s == "ra-grid") return StrategyVariant::RaGrid;
    if (s == "ra-quadtree") return StrategyVariant::RaQuadtree;
    return std::nullopt;
}

std::optional<PerturbationKind> perturbation_from_string(const std::string &s) {
    if (s == "lens") return PerturbationKind::Lens;
    if (s == "multi-chain") return PerturbationKind::MultiChain;
    return std::nullopt;
}

} // namespace ramlt
