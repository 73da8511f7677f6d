#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ramlt {

namespace {

std::optional<double> intersect_sphere(const Sphere &s, const Vec3 &o, const Vec3 &d) {
    Vec3 oc = o - s.center;
    double b = dot(oc, d);
    double c = dot(oc, oc) - s.radius * s.radius;
    double disc = b * b - c;
    if (disc < 0.0)
        return std::nullopt;
    double sq = std::sqrt(disc);
    double t = -b - sq;
    if (t > kRayEpsilon)
        return t;
    t = -b + sq;
    if (t > kRayEpsilon)
        return t;
    return std::nullopt;
}

std::optional<double> intersect_triangle(const Triangle &tri, const Vec3 &o, const Vec3 &d) {
    // Moeller-Trumbore
    Vec3 e1 = tri.b - tri.a;
    Vec3 e2 = tri.c - tri.a;
    Vec3 p = cross(d, e2);
    double det = dot(e1, p);
    if (std::abs(det) < 1e-14)
        return std::nullopt;
    double inv = 1.0 / det;
    Vec3 tv = o - tri.a;
    double u = dot(tv, p) * inv;
    if (u < 0.0 || u > 1.0)
        return std::nullopt;
    Vec3 q = cross(tv, e1);
    double v = dot(d, q) * inv;
    if (v < 0.0 || u + v > 1.0)
        return std::nullopt;
    double t = dot(e2, q) * inv;
    if (t > kRayEpsilon)
        return t;
    return std::nullopt;
}

} // namespace

std::optional<Intersection> SceneModel::intersect(const Vec3 &origin, const Vec3 &direction) const {
    double best = std::numeric_limits<double>::infinity();
    int best_sphere = -1, best_tri = -1;
    for (size_t i = 0; i < spheres.size(); ++i) {
        if (auto t = intersect_sphere(spheres[i], origin, direction); t && *t < best) {
            best = *t;
            best_sphere = static_cast<int>(i);
            best_tri = -1;
        }
    }
    for (size_t i = 0; i < triangles.size(); ++i) {
        if (auto t = intersect_triangle(triangles[i], origin, direction); t && *t < best) {
            best = *t;
            best_tri = static_cast<int>(i);
            best_sphere = -1;
        }
    }
    if (best_sphere < 0 && best_tri < 0)
        return std::nullopt;

    Intersection isect;
    isect.t = best;
    isect.position = origin + best * direction;
    if (best_sphere >= 0) {
        const Sphere &s = spheres[best_sphere];
        isect.normal = normalize(isect.position - s.center);
        isect.material = s.material;
        isect.emitter = sphere_emitter[best_sphere];
    } else {
        const Triangle &tri = triangles[best_tri];
        isect.normal = normalize(cross(tri.b - tri.a, tri.c - tri.a));
        isect.material = tri.material;
        isect.emitter = triangle_emitter[best_tri];
    }
    return isect;
}

bool SceneModel::visible(const Vec3 &a, const Vec3 &b) const {
    Vec3 d = b - a;
    double dist = length(d);
    if (dist <= 2.0 * kRayEpsilon)
        return false;
    d = d / dist;
    auto hit = intersect(a, d);
    return !hit || hit->t >= dist - kRayEpsilon;
}

// ---- scene parsing ---------------------------------------------------------

namespace {

[[noreturn]] void parse_fail(const std::string &origin, int line, const std::string &msg) {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

} // namespace

SceneModel parse_scene(const std::string &text, const std::string &origin) {
    SceneModel scene;
    std::map<std::string, int> material_ids;
    bool have_camera = false;
    int geometry_count = 0;
    // geometry order -> (is_sphere, index)
    std::vector<std::pair<bool, int>> geometry_order;

    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#')
            continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;

        auto want = [&](auto &...vals) {
            (ls >> ... >> vals);
            if (ls.fail())
                parse_fail(origin, line_no, "malformed '" + tag + "' record");
        };
        auto material_id = [&](const std::string &name) {
            auto it = material_ids.find(name);
            if (it == material_ids.end())
                parse_fail(origin, line_no, "unknown material '" + name + "'");
            return it->second;
        };

        if (tag == "camera") {
            Vec3 p, l, u;
            double fov;
            want(p.x, p.y, p.z, l.x, l.y, l.z, u.x, u.y, u.z, fov);
            try {
                scene.camera = Camera(p, l, u, fov);
            } catch (const std::exception &e) {
                parse_fail(origin, line_no, e.what());
            }
            have_camera = true;
        } else if (tag == "material") {
            std::string name, kind;
            want(name, kind);
            Material m;
            m.name = name;
            if (kind == "diffuse") {
                m.kind = MaterialKind::Diffuse;
                want(m.albedo.x, m.albedo.y, m.albedo.z);
            } else if (kind == "mirror") {
                m.kind = MaterialKind::Mirror;
                want(m.albedo.x, m.albedo.y, m.albedo.z);
            } else if (kind == "dielectric") {
                m.kind = MaterialKind::Dielectric;
                want(m.ior, m.albedo.x, m.albedo.y, m.albedo.z);
                if (m.ior <= 1.0)
                    parse_fail(origin, line_no, "dielectric ior must be > 1");
            } else if (kind == "glossy") {
                m.kind = MaterialKind::Glossy;
                want(m.albedo.x, m.albedo.y, m.albedo.z, m.exponent);
                if (m.exponent <= 0.0)
                    parse_fail(origin, line_no, "glossy exponent must be > 0");
            } else {
                parse_fail(origin, line_no, "unknown material kind '" + kind + "'");
            }
            if (m.kind != MaterialKind::Dielectric) {
                for (int c = 0; c < 3; ++c)
                    if (m.albedo[c] < 0.0 || m.albedo[c] > 1.0)
                        parse_fail(origin, line_no, "albedo components must be in [0,1]");
            }
            if (material_ids.count(name))
                parse_fail(origin, line_no, "duplicate material '" + name + "'");
            material_ids[name] = static_cast<int>(scene.materials.size());
            scene.materials.push_back(m);
        } else if (tag == "sphere") {
            Sphere s;
            std::string mat;
            want(s.center.x, s.center.y, s.center.z, s.radius, mat);
            if (s.radius <= 0.0)
                parse_fail(origin, line_no, "sphere radius must be > 0");
            s.material = material_id(mat);
            geometry_order.emplace_back(true, static_cast<int>(scene.spheres.size()));
            scene.spheres.push_back(s);
            scene.sphere_emitter.push_back(-1);
            ++geometry_count;
        } else if (tag == "tri") {
            Triangle t;
            std::string mat;
            want(t.a.x, t.a.y, t.a.z, t.b.x, t.b.y, t.b.z, t.c.x, t.c.y, t.c.z, mat);
            t.material = material_id(mat);
            geometry_order.emplace_back(false, static_cast<int>(scene.triangles.size()));
            scene.triangles.push_back(t);
            scene.triangle_emitter.push_back(-1);
            ++geometry_count;
        } else if (tag == "emitter") {
            int index;
            Vec3 radiance;
            want(index, radiance.x, radiance.y, radiance.z);
            if (index < 0 || index >= geometry_count)
                parse_fail(origin, line_no, "emitter geometry index out of range");
            if (radiance.x < 0.0 || radiance.y < 0.0 || radiance.z < 0.0)
                parse_fail(origin, line_no, "emitted radiance must be non-negative");
            int emitter_id = static_cast<int>(scene.emitters.size());
            scene.emitters.push_back({index, radiance});
            auto [is_sphere, gi] = geometry_order[index];
            if (is_sphere)
                scene.sphere_emitter[gi] = emitter_id;
            else
                scene.triangle_emitter[gi] = emitter_id;
        } else {
            parse_fail(origin, line_no, "unknown record '" + tag + "'");
        }
    }

    if (!have_camera)
        throw std::runtime_error(origin + ": scene has no camera");
    if (scene.emitters.empty())
        throw std::runtime_error(origin + ": scene has no emitter");
    return scene;
}

SceneModel load_scene(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scene file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scene(buf.str(), path);
}

// ---- BSDFs -----------------------------------------------------------------

namespace {

// Normal flipped into wi's hemisphere; two-sided shading for reflective kinds.
inline Vec3 facing_normal(const Vec3 &n, const Vec3 &wi) {
    return dot(n, wi) >= 0.0 ? n : -n;
}

inline Vec3 phong_lobe_axis(const Vec3 &wi, const Vec3 &n) {
    return reflect(wi, n);
}

} // namespace

double fresnel_dielectric(double cos_i, double ior) {
    // cos_i > 0 means the ray arrives from outside (against the normal).
    double eta_i = 1.0, eta_t = ior;
    double ci = cos_i;
    if (ci < 0.0) {
        std::swap(eta_i, eta_t);
        ci = -ci;
    }
    double sin_t2 = (eta_i / eta_t) * (eta_i / eta_t) * (1.0 - ci * ci);
    if (sin_t2 >= 1.0)
        return 1.0;  // total internal reflection
    double ct = std::sqrt(1.0 - sin_t2);
    double r_par = (eta_t * ci - eta_i * ct) / (eta_t * ci + eta_i * ct);
    double r_perp = (eta_i * ci - eta_t * ct) / (eta_i * ci + eta_t * ct);
    return 0.5 * (r_par * r_par + r_perp * r_perp);
}

Vec3 bsdf_eval(const Material &m, const Vec3 &wi, const Vec3 &wo, const Vec3 &n) {
    switch (m.kind) {
    case MaterialKind::Diffuse: {
        Vec3 ns = facing_normal(n, wi);
        if (dot(ns, wo) <= 0.0)
            return Vec3(0.0);
        return m.albedo * kInvPi;
    }
    case MaterialKind::Glossy: {
        Vec3 ns = facing_normal(n, wi);
        if (dot(ns, wo) <= 0.0)
            return Vec3(0.0);
        double cos_a = dot(phong_lobe_axis(wi, ns), wo);
        if (cos_a <= 0.0)
            return Vec3(0.0);
        double norm = (m.exponent + 1.0) / kTwoPi;
        return m.albedo * (norm * std::pow(cos_a, m.exponent));
    }
    case MaterialKind::Mirror:
    case MaterialKind::Dielectric:
        return Vec3(0.0);  // delta: defined only through sampling
    }
    return Vec3(0.0);
}

double bsdf_pdf(const Material &m, const Vec3 &wi, const Vec3 &wo, const Vec3 &n) {
    switch (m.kind) {
    case MaterialKind::Diffuse: {
        Vec3 ns = facing_normal(n, wi);
        double c = dot(ns, wo);
        return c > 0.0 ? c * kInvPi : 0.0;
    }
    case MaterialKind::Glossy: {
        Vec3 ns = facing_normal(n, wi);
        double cos_a = dot(phong_lobe_axis(wi, ns), wo);
        if (cos_a <= 0.0)
            return 0.0;
        return (m.exponent + 1.0) / kTwoPi * std::pow(cos_a, m.exponent);
    }
    case MaterialKind::Mirror:
    case MaterialKind::Dielectric:
        return 0.0;
    }
    return 0.0;
}

std::optional<BsdfSample> bsdf_sample(const Material &m, const Vec3 &wi, const Vec3 &n,
                                      RandomSequence &rng) {
    switch (m.kind) {
    case MaterialKind::Diffuse: {
        Vec3 ns = facing_normal(n, wi);
        Vec3 local = sample_cosine_hemisphere(rng);
        Vec3 wo = Frame(ns).to_world(local);
        double pdf = std::max(dot(ns, wo), 0.0) * kInvPi;
        if (pdf <= 0.0)
            return std::nullopt;
        // f * cos / pdf = albedo for the cosine-weighted pair
        return BsdfSample{wo, pdf, m.albedo, false, SpecularEvent::None};
    }
    case MaterialKind::Glossy: {
        Vec3 ns = facing_normal(n, wi);
        Vec3 axis = phong_lobe_axis(wi, ns);
        double u1 = rng.next_double();
        double u2 = rng.next_double();
        double cos_a = std::pow(u1, 1.0 / (m.exponent + 1.0));
        double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
        double phi = kTwoPi * u2;
        Vec3 local(sin_a * std::cos(phi), sin_a * std::sin(phi), cos_a);
        Vec3 wo = normalize(Frame(axis).to_world(local));
        double pdf = (m.exponent + 1.0) / kTwoPi * std::pow(cos_a, m.exponent);
        double cos_o = dot(ns, wo);
        Vec3 throughput = cos_o > 0.0 ? m.albedo * cos_o : Vec3(0.0);
        return BsdfSample{wo, pdf, throughput, false, SpecularEvent::None};
    }
    case MaterialKind::Mirror: {
        Vec3 ns = facing_normal(n, wi);
        Vec3 wo = normalize(reflect(wi, ns));
        return BsdfSample{wo, 1.0, m.albedo, true, SpecularEvent::Reflect};
    }
    case MaterialKind::Dielectric: {
        double f = fresnel_dielectric(dot(n, wi), m.ior);
        SpecularEvent event = rng.next_double() < f ? SpecularEvent::Reflect : SpecularEvent::Transmit;
        auto wo = specular_continuation(m, wi, n, event);
        if (!wo)
            return std::nullopt;
        double q = event == SpecularEvent::Reflect ? f : 1.0 - f;
        return BsdfSample{*wo, q, specular_weight(m, wi, n, event) / q, true, event};
    }
    }
    return std::nullopt;
}

Vec3 specular_weight(const Material &m, const Vec3 &wi, const Vec3 &n, SpecularEvent event) {
    if (m.kind == MaterialKind::Mirror)
        return event == SpecularEvent::Reflect ? m.albedo : Vec3(0.0);
    if (m.kind == MaterialKind::Dielectric) {
        double f = fresnel_dielectric(dot(n, wi), m.ior);
        if (event == SpecularEvent::Reflect)
            return m.albedo * f;
        if (event == SpecularEvent::Transmit)
            return m.albedo * (1.0 - f);
    }
    return Vec3(0.0);
}

double specular_event_probability(const Material &m, const Vec3 &wi, const Vec3 &n,
                                  SpecularEvent event) {
    if (m.kind == MaterialKind::Mirror)
        return event == SpecularEvent::Reflect ? 1.0 : 0.0;
    if (m.kind == MaterialKind::Dielectric) {
        double f = fresnel_dielectric(dot(n, wi), m.ior);
        return event == SpecularEvent::Reflect ? f : 1.0 - f;
    }
    return 0.0;
}

std::optional<Vec3> specular_continuation(const Material &m, const Vec3 &wi, const Vec3 &n,
                                          SpecularEvent event) {
    if (m.kind == MaterialKind::Mirror) {
        if (event != SpecularEvent::Reflect)
            return std::nullopt;
        return normalize(reflect(wi, facing_normal(n, wi)));
    }
    if (m.kind != MaterialKind::Dielectric)
        return std::nullopt;
    double cos_i = dot(n, wi);
    if (event == SpecularEvent::Reflect)
        return normalize(reflect(wi, facing_normal(n, wi)));
    // refraction
    double eta = cos_i > 0.0 ? 1.0 / m.ior : m.ior;
    Vec3 ns = facing_normal(n, wi);
    double ci = dot(ns, wi);
    double sin_t2 = eta * eta * (1.0 - ci * ci);
    if (sin_t2 >= 1.0)
        return std::nullopt;  // TIR: the recorded branch no longer exists
    double ct = std::sqrt(1.0 - sin_t2);
    return normalize(-eta * wi + (eta * ci - ct) * ns);
}

} // namespace ramlt
