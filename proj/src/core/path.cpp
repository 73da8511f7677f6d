#include "path.hpp"

#include <cmath>

namespace ramlt {

double geometry_term(const SceneModel &scene, const PathVertex &a, const PathVertex &b) {
    Vec3 d = b.position - a.position;
    double d2 = length_squared(d);
    if (d2 <= 0.0)
        return 0.0;
    Vec3 dir = d / std::sqrt(d2);
    double g = std::abs(dot(a.normal, dir)) * std::abs(dot(b.normal, dir)) / d2;
    if (g <= 0.0)
        return 0.0;
    return scene.visible(a.position, b.position) ? g : 0.0;
}

double area_conversion(const SceneModel &scene, const Vec3 &from, const PathVertex &b) {
    Vec3 d = b.position - from;
    double d2 = length_squared(d);
    if (d2 <= 0.0)
        return 0.0;
    Vec3 dir = d / std::sqrt(d2);
    double c = std::abs(dot(b.normal, dir)) / d2;
    if (c <= 0.0)
        return 0.0;
    return scene.visible(from, b.position) ? c : 0.0;
}

Vec3 emitted_radiance(const SceneModel &scene, const PathVertex &v, const Vec3 &toward) {
    if (v.emitter < 0)
        return Vec3(0.0);
    // one-sided emission from the front face
    if (dot(v.normal, toward) <= 0.0)
        return Vec3(0.0);
    return scene.emitters[v.emitter].radiance;
}

Contribution eval_contribution(const SceneModel &scene, const Path &path) {
    Contribution zero{Vec3(0.0), 0.0, {0.0, 0.0}};
    int k = path.length();
    if (k < 2 || !path[0].is_camera || path[k - 1].emitter < 0)
        return zero;

    Vec3 primary = path.direction(0);
    auto raster = scene.camera.raster_position(primary);
    if (!raster)
        return zero;

    Vec3 f(scene.camera.importance(primary));
    for (int i = 0; i + 1 < k; ++i) {
        const PathVertex &a = path[i];
        const PathVertex &b = path[i + 1];
        // interior vertices must not sit on an emitter; emitters terminate paths
        if (i > 0 && a.emitter >= 0)
            return zero;
        double seg = a.specular ? area_conversion(scene, a.position, b)
                                : geometry_term(scene, a, b);
        if (seg <= 0.0)
            return zero;
        f *= seg;
        if (i > 0) {
            const Material &m = scene.materials[a.material];
            Vec3 wi = normalize(path[i - 1].position - a.position);
            Vec3 wo = path.direction(i);
            Vec3 bf = a.specular ? specular_weight(m, wi, a.normal, a.event)
                                 : bsdf_eval(m, wi, wo, a.normal);
            if (bf.is_zero())
                return zero;
            f *= bf;
        }
    }
    Vec3 le = emitted_radiance(scene, path[k - 1], normalize(path[k - 2].position - path[k - 1].position));
    if (le.is_zero())
        return zero;
    f *= le;
    double pi = luminance(f);
    if (!(pi > 0.0) || !std::isfinite(pi))
        return zero;
    return Contribution{f, pi, *raster};
}

EyeSubpath trace_eye_subpath(const SceneModel &scene, RandomSequence &rng, int max_vertices) {
    EyeSubpath sub;
    const Camera &cam = scene.camera;

    PathVertex camv;
    camv.position = cam.position();
    camv.normal = cam.forward();
    camv.is_camera = true;
    sub.path.vertices.push_back(camv);
    if (max_vertices < 2)
        return sub;

    double u = rng.next_double();
    double v = rng.next_double();
    Vec3 dir = cam.primary_direction(u, v);
    double dir_pdf = cam.direction_pdf(dir);

    Vec3 origin = cam.position();
    bool arriving_delta = false;
    while (sub.path.length() < max_vertices) {
        auto hit = scene.intersect(origin, dir);
        if (!hit)
            return sub;

        PathVertex pv;
        pv.position = hit->position;
        pv.normal = hit->normal;
        pv.material = hit->material;
        pv.emitter = hit->emitter;
        pv.specular = hit->emitter < 0 && scene.materials[hit->material].is_specular();

        TraceRecord rec;
        rec.dir_pdf = dir_pdf;
        rec.delta = arriving_delta;
        rec.area_conv = std::abs(dot(hit->normal, dir)) / (hit->t * hit->t);
        sub.path.vertices.push_back(pv);
        sub.records.push_back(rec);

        if (hit->emitter >= 0) {
            sub.hit_emitter = true;
            return sub;
        }
        if (sub.path.length() >= max_vertices)
            return sub;

        const Material &m = scene.materials[hit->material];
        Vec3 wi = -dir;
        auto bs = bsdf_sample(m, wi, hit->normal, rng);
        if (!bs || bs->throughput.is_zero())
            return sub;
        sub.path.vertices.back().event = bs->event;

        origin = hit->position;
        dir = bs->direction;
        dir_pdf = bs->pdf;
        arriving_delta = bs->delta;
    }
    return sub;
}

double eye_path_density(const SceneModel &scene, const Path &path) {
    int k = path.length();
    if (k < 2 || !path[0].is_camera || path[k - 1].emitter < 0)
        return 0.0;

    Vec3 primary = path.direction(0);
    double p = scene.camera.direction_pdf(primary);
    if (p <= 0.0)
        return 0.0;
    p *= area_conversion(scene, path[0].position, path[1]);
    for (int i = 1; i + 1 < k; ++i) {
        const PathVertex &a = path[i];
        if (a.emitter >= 0)
            return 0.0;  // tracing would have stopped here
        const Material &m = scene.materials[a.material];
        Vec3 wi = normalize(path[i - 1].position - a.position);
        Vec3 wo = path.direction(i);
        double q = a.specular ? specular_event_probability(m, wi, a.normal, a.event)
                              : bsdf_pdf(m, wi, wo, a.normal);
        if (q <= 0.0)
            return 0.0;
        p *= q * area_conversion(scene, a.position, path[i + 1]);
        if (p <= 0.0)
            return 0.0;
    }
    return p;
}

} // namespace ramlt
