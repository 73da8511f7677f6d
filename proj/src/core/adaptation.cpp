#include "adaptation.hpp"

#include "check.hpp"

#include <algorithm>
#include <cmath>

namespace ramlt {

double step_size(const AdaptationConfig &cfg, uint64_t n) {
    RAMLT_CHECK(n >= 1, "step_size needs n >= 1");
    return std::min(cfg.gamma_max, cfg.gamma_scale / std::sqrt(static_cast<double>(n)));
}

double update_lambda(double lambda, double alpha_hat, uint64_t n, const AdaptationConfig &cfg) {
    double gamma = step_size(cfg, n);
    double diff = alpha_hat - cfg.target_acceptance;
    double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    return std::max(cfg.lambda_min, lambda + gamma * sgn);
}

KernelController::KernelController(ControllerKind kind, const AdaptationConfig &cfg)
    : kind_(kind), cfg_(cfg) {
    if (kind_ != ControllerKind::Regional)
        allocate_region();
}

int KernelController::allocate_region() {
    regions_.emplace_back();
    regions_.back().lambda.store(cfg_.lambda_init, std::memory_order_relaxed);
    return static_cast<int>(regions_.size()) - 1;
}

int KernelController::allocate_child(int parent) {
    RAMLT_CHECK(parent >= 0 && parent < static_cast<int>(regions_.size()), "bad parent region");
    uint64_t n_parent = regions_[parent].updates.load(std::memory_order_relaxed);
    double lambda = regions_[parent].lambda.load(std::memory_order_relaxed);
    int id = allocate_region();
    regions_[id].lambda.store(lambda, std::memory_order_relaxed);
    regions_[id].updates.store(std::max<uint64_t>(1, n_parent / 4), std::memory_order_relaxed);
    return id;
}

SigmaPair KernelController::sigma_for(int region) const {
    double lambda = kind_ == ControllerKind::Fixed
                        ? cfg_.lambda_init
                        : regions_[region].lambda.load(std::memory_order_relaxed);
    double sigma = std::exp(0.5 * lambda);
    return {sigma, cfg_.sigma2_ratio * sigma};
}

double KernelController::lambda_of(int region) const {
    return regions_[region].lambda.load(std::memory_order_relaxed);
}

uint64_t KernelController::updates_of(int region) const {
    return regions_[region].updates.load(std::memory_order_relaxed);
}

std::optional<UpdateEvent> KernelController::record_acceptance(int region, double a) {
    RAMLT_CHECK(a >= 0.0 && a <= 1.0, "acceptance outside [0,1]");
    if (kind_ == ControllerKind::Fixed)
        return std::nullopt;
    RegionState &st = regions_[region];
    st.total_accept.fetch_add(a, std::memory_order_relaxed);
    st.total_visits.fetch_add(1, std::memory_order_relaxed);
    st.accum.fetch_add(a, std::memory_order_relaxed);
    uint32_t i = st.visits.fetch_add(1, std::memory_order_acq_rel) + 1;
    if (i < static_cast<uint32_t>(cfg_.batch_size))
        return std::nullopt;

    // Batch complete: at most one thread applies the update.
    while (st.busy.test_and_set(std::memory_order_acquire)) {}
    uint32_t count = st.visits.exchange(0, std::memory_order_acq_rel);
    double sum = st.accum.exchange(0.0, std::memory_order_acq_rel);
    if (count < static_cast<uint32_t>(cfg_.batch_size)) {
        // another thread consumed the batch first; put the remainder back
        if (count > 0) {
            st.accum.fetch_add(sum, std::memory_order_relaxed);
            st.visits.fetch_add(count, std::memory_order_relaxed);
        }
        st.busy.clear(std::memory_order_release);
        return std::nullopt;
    }
    double alpha_hat = std::clamp(sum / count, 0.0, 1.0);
    uint64_t n = st.updates.load(std::memory_order_relaxed);
    double new_lambda = update_lambda(st.lambda.load(std::memory_order_relaxed), alpha_hat, n, cfg_);
    st.lambda.store(new_lambda, std::memory_order_relaxed);
    st.updates.store(n + 1, std::memory_order_relaxed);
    st.busy.clear(std::memory_order_release);
    return UpdateEvent{region, n, new_lambda, alpha_hat};
}

std::vector<KernelController::Tally> KernelController::tallies() const {
    std::vector<Tally> out;
    out.reserve(regions_.size());
    for (const RegionState &st : regions_)
        out.push_back({st.total_accept.load(std::memory_order_relaxed),
                       st.total_visits.load(std::memory_order_relaxed)});
    return out;
}

double global_acceptance_identity(std::span<const KernelController::Tally> tallies) {
    double total_accept = 0.0, accept_c = 0.0;
    uint64_t total_visits = 0;
    for (const auto &t : tallies) {
        // Kahan summation on one side so the two sides take different routes
        double y = t.accept_sum - accept_c;
        double s = total_accept + y;
        accept_c = (s - total_accept) - y;
        total_accept = s;
        total_visits += t.visits;
    }
    if (total_visits == 0)
        return 0.0;
    double pooled = total_accept / static_cast<double>(total_visits);
    double weighted = 0.0;
    for (const auto &t : tallies) {
        if (t.visits == 0)
            continue;
        double share = static_cast<double>(t.visits) / static_cast<double>(total_visits);
        weighted += share * (t.accept_sum / static_cast<double>(t.visits));
    }
    return std::abs(pooled - weighted);
}

} // namespace ramlt
