#include "mutations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ramlt {

std::optional<int> lens_eligibility(const Path &path) {
    int k = path.length();
    if (k < 2 || !path[0].is_camera)
        return std::nullopt;
    int s = 1;
    while (s < k - 1 && path[s].specular)
        ++s;
    if (s == k - 1)
        return s;  // endpoint on the light
    if (!path[s + 1].specular)
        return s;
    return std::nullopt;
}

std::optional<MultiChainStructure> multichain_eligibility(const Path &path) {
    int k = path.length();
    if (k < 3 || !path[0].is_camera)
        return std::nullopt;
    int first = 1;
    while (first < k - 1 && path[first].specular)
        ++first;
    if (first == k - 1)
        return std::nullopt;  // no secondary ray to perturb
    int endpoint = -1;
    for (int i = first + 1; i < k; ++i) {
        if (i == k - 1 || (!path[i].specular && !path[i + 1].specular)) {
            endpoint = i;
            break;
        }
    }
    MultiChainStructure st;
    st.endpoint = endpoint;
    for (int i = 0; i < endpoint; ++i)
        if (!path[i].specular)
            st.perturbed.push_back(i);
    return st;
}

double suitability(const Path &path, Strategy perturbation) {
    switch (perturbation) {
    case Strategy::Lens:
        return lens_eligibility(path) ? 0.5 : 0.0;
    case Strategy::MultiChain:
        return multichain_eligibility(path) ? 0.5 : 0.0;
    default:
        return 0.0;
    }
}

std::optional<Proposal> large_step(const SceneModel &scene, const Path &current,
                                   RandomSequence &rng, int max_vertices) {
    EyeSubpath sub = trace_eye_subpath(scene, rng, max_vertices);
    if (!sub.hit_emitter)
        return std::nullopt;
    Proposal prop;
    prop.strategy = Strategy::LargeStep;
    prop.t_forward = 1.0;
    for (const TraceRecord &rec : sub.records)
        prop.t_forward *= rec.dir_pdf * rec.area_conv;
    prop.path = std::move(sub.path);
    prop.t_reverse = eye_path_density(scene, current);
    return prop;
}

namespace {

// Re-creates the reference chain ref[start+1 .. end] by tracing from `origin`
// along `dir`, replaying recorded delta events. Appends the new vertices to
// `out`; fails on a miss or any vertex-type mismatch.
bool retrace_chain(const SceneModel &scene, const Path &ref, int start, int end,
                   const Vec3 &origin, const Vec3 &dir, std::vector<PathVertex> &out) {
    Vec3 o = origin;
    Vec3 d = dir;
    for (int i = start + 1; i <= end; ++i) {
        auto hit = scene.intersect(o, d);
        if (!hit)
            return false;
        const PathVertex &r = ref[i];
        bool hit_emitter = hit->emitter >= 0;
        bool hit_specular = !hit_emitter && scene.materials[hit->material].is_specular();
        if (hit_emitter != (r.emitter >= 0) || hit_specular != r.specular)
            return false;

        PathVertex pv;
        pv.position = hit->position;
        pv.normal = hit->normal;
        pv.material = hit->material;
        pv.emitter = hit->emitter;
        pv.specular = hit_specular;
        pv.event = r.event;
        out.push_back(pv);

        if (i == end)
            break;
        auto cont = specular_continuation(scene.materials[hit->material], -d, hit->normal, r.event);
        if (!cont)
            return false;
        o = hit->position;
        d = *cont;
    }
    return true;
}

Path assemble(const Path &ref, std::vector<PathVertex> head, int endpoint) {
    Path p;
    p.vertices = std::move(head);
    for (int i = endpoint + 1; i < ref.length(); ++i)
        p.vertices.push_back(ref[i]);
    return p;
}

} // namespace

std::optional<Proposal> lens_perturb(const SceneModel &scene, const Path &path,
                                     const SigmaPair &sigmas, RandomSequence &rng) {
    auto s_opt = lens_eligibility(path);
    if (!s_opt)
        return std::nullopt;
    int endpoint = *s_opt;

    AngularKernel kernel(sigmas.primary);
    Vec3 new_dir = perturb_direction(path.direction(0), kernel, rng);

    std::vector<PathVertex> head;
    head.reserve(path.vertices.size());
    head.push_back(path[0]);
    if (!retrace_chain(scene, path, 0, endpoint, path[0].position, new_dir, head))
        return std::nullopt;

    Proposal prop;
    prop.strategy = Strategy::Lens;
    prop.perturbed = {0};
    prop.endpoint = endpoint;
    prop.path = assemble(path, std::move(head), endpoint);
    prop.t_forward = perturbation_density(scene, path, prop.path, prop.perturbed, endpoint, sigmas);
    prop.t_reverse = perturbation_density(scene, prop.path, path, prop.perturbed, endpoint, sigmas);
    return prop;
}

std::optional<Proposal> multichain_perturb(const SceneModel &scene, const Path &path,
                                           const SigmaPair &sigmas, RandomSequence &rng) {
    auto st = multichain_eligibility(path);
    if (!st)
        return std::nullopt;

    std::vector<PathVertex> head;
    head.reserve(path.vertices.size());
    head.push_back(path[0]);
    for (size_t ci = 0; ci < st->perturbed.size(); ++ci) {
        int idx = st->perturbed[ci];
        int next = ci + 1 < st->perturbed.size() ? st->perturbed[ci + 1] : st->endpoint;
        AngularKernel kernel(idx == 0 ? sigmas.primary : sigmas.secondary);
        Vec3 new_dir = perturb_direction(path.direction(idx), kernel, rng);
        if (!retrace_chain(scene, path, idx, next, head.back().position, new_dir, head))
            return std::nullopt;
    }

    Proposal prop;
    prop.strategy = Strategy::MultiChain;
    prop.perturbed = st->perturbed;
    prop.endpoint = st->endpoint;
    prop.path = assemble(path, std::move(head), st->endpoint);
    prop.t_forward = perturbation_density(scene, path, prop.path, prop.perturbed, prop.endpoint, sigmas);
    prop.t_reverse = perturbation_density(scene, prop.path, path, prop.perturbed, prop.endpoint, sigmas);
    return prop;
}

double perturbation_density(const SceneModel &, const Path &from, const Path &to,
                            const std::vector<int> &perturbed, int endpoint,
                            const SigmaPair &sigmas) {
    double q = 1.0;
    for (int idx : perturbed) {
        Vec3 a = from.direction(idx);
        Vec3 b = to.direction(idx);
        double alpha = std::atan2(length(cross(a, b)), dot(a, b));
        AngularKernel kernel(idx == 0 ? sigmas.primary : sigmas.secondary);
        q *= kernel.pdf_solid_angle(alpha);
    }
    // Jacobians of the re-traced segments; visibility holds by construction.
    for (int i = 0; i < endpoint; ++i) {
        Vec3 d = to[i + 1].position - to[i].position;
        double d2 = length_squared(d);
        if (d2 <= 0.0)
            return 0.0;
        q *= std::abs(dot(to[i + 1].normal, d)) / (d2 * std::sqrt(d2));
    }
    return q;
}

double mh_accept(double pi_current, double pi_proposal, double t_forward, double t_reverse,
                 double s_forward, double s_reverse) {
    if (!(pi_current > 0.0))
        throw std::invalid_argument("mh_accept: chain occupies a zero-measure state");
    if (!(pi_proposal > 0.0) || !(t_forward > 0.0) || !(s_forward > 0.0))
        return 0.0;
    double r = (pi_proposal * t_reverse * s_reverse) / (pi_current * t_forward * s_forward);
    if (std::isnan(r))
        return 0.0;
    return std::min(1.0, r);
}

} // namespace ramlt
