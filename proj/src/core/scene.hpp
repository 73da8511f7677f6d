#pragma once

#include "camera.hpp"
#include "rng.hpp"
#include "vec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ramlt {

// Offset applied to ray origins to avoid self-intersection (scene units).
inline constexpr double kRayEpsilon = 1e-4;

enum class MaterialKind { Diffuse, Mirror, Dielectric, Glossy };

struct Material {
    MaterialKind kind = MaterialKind::Diffuse;
    Vec3 albedo{0.5, 0.5, 0.5};  // albedo / reflectance / transmittance
    double ior = 1.5;            // dielectric only
    double exponent = 32.0;      // glossy only
    std::string name;

    bool is_specular() const {
        return kind == MaterialKind::Mirror || kind == MaterialKind::Dielectric;
    }
};

// Which branch a delta interaction took; replayed verbatim when a
// perturbation re-propagates a specular chain.
enum class SpecularEvent { None, Reflect, Transmit };

struct Intersection {
    Vec3 position;
    Vec3 normal;       // unit geometric normal, oriented outward
    int material = -1;
    int emitter = -1;  // index into SceneModel::emitters, or -1
    double t = 0.0;
};

struct Sphere {
    Vec3 center;
    double radius = 1.0;
    int material = -1;
};

struct Triangle {
    Vec3 a, b, c;
    int material = -1;
};

struct Emitter {
    int geometry = -1;  // index into the combined geometry order
    Vec3 radiance;      // W sr^-1 m^-2
};

struct SceneModel {
    Camera camera;
    std::vector<Material> materials;
    std::vector<Sphere> spheres;
    std::vector<Triangle> triangles;
    std::vector<Emitter> emitters;

    // geometry declaration order: emitter lookup per primitive, -1 if none
    std::vector<int> sphere_emitter;
    std::vector<int> triangle_emitter;

    std::optional<Intersection> intersect(const Vec3 &origin, const Vec3 &direction) const;

    // True if the open segment between a and b is unobstructed.
    bool visible(const Vec3 &a, const Vec3 &b) const;
};

// Parses the line-oriented scene format. Throws std::runtime_error with the
// offending line number on malformed input.
SceneModel load_scene(const std::string &path);
SceneModel parse_scene(const std::string &text, const std::string &origin = "<string>");

// ---- BSDF interface -------------------------------------------------------
//
// wi points away from the surface toward the previous vertex, wo away toward
// the next one. Evaluation and pdf are zero for delta materials; sampling
// reports the discrete event taken and its probability instead.

struct BsdfSample {
    Vec3 direction;
    double pdf = 0.0;          // per solid angle (non-delta) or event probability (delta)
    Vec3 throughput;           // f * cos / pdf for non-delta, event weight for delta
    bool delta = false;
    SpecularEvent event = SpecularEvent::None;
};

Vec3 bsdf_eval(const Material &m, const Vec3 &wi, const Vec3 &wo, const Vec3 &n);
double bsdf_pdf(const Material &m, const Vec3 &wi, const Vec3 &wo, const Vec3 &n);
std::optional<BsdfSample> bsdf_sample(const Material &m, const Vec3 &wi, const Vec3 &n,
                                      RandomSequence &rng);

// Weight carried by a delta vertex for a given recorded event, and the
// probability with which bsdf_sample picks that event.
Vec3 specular_weight(const Material &m, const Vec3 &wi, const Vec3 &n, SpecularEvent event);
double specular_event_probability(const Material &m, const Vec3 &wi, const Vec3 &n,
                                  SpecularEvent event);

// Deterministic continuation of a delta interaction; empty when the recorded
// event is impossible at the current geometry (e.g. refraction under total
// internal reflection).
std::optional<Vec3> specular_continuation(const Material &m, const Vec3 &wi, const Vec3 &n,
                                          SpecularEvent event);

// Fresnel reflectance for an unpolarized dielectric boundary.
double fresnel_dielectric(double cos_i, double ior);

} // namespace ramlt
