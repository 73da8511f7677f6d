#pragma once

#include "scene.hpp"

#include <optional>
#include <vector>

namespace ramlt {

// Default cap on vertices per path.
inline constexpr int kDefaultMaxVertices = 20;

struct PathVertex {
    Vec3 position;
    Vec3 normal;                // camera vertex stores the view direction's axis
    int material = -1;          // -1 for the camera vertex
    int emitter = -1;
    bool is_camera = false;
    bool specular = false;      // camera and emitter vertices are never specular
    SpecularEvent event = SpecularEvent::None;
};

// MCMC state: ordered vertices from the sensor (front) to an emitter (back).
struct Path {
    std::vector<PathVertex> vertices;

    int length() const { return static_cast<int>(vertices.size()); }
    const PathVertex &operator[](int i) const { return vertices[i]; }
    PathVertex &operator[](int i) { return vertices[i]; }

    // Unit direction from vertex i to vertex i+1.
    Vec3 direction(int i) const {
        return normalize(vertices[i + 1].position - vertices[i].position);
    }
};

struct Contribution {
    Vec3 f;                      // measurement contribution
    double pi = 0.0;             // luminance of f, the scalar target
    CanonicalPoint2 raster;      // screen position of the primary direction
};

// |cos a| |cos b| / d^2 times visibility.
double geometry_term(const SceneModel &scene, const PathVertex &a, const PathVertex &b);

// |cos at b| / d^2 times visibility: the direction-to-area conversion used on
// segments that leave a delta vertex, where the paired cosine lives in the
// delta convention shared by f and the transition densities.
double area_conversion(const SceneModel &scene, const Vec3 &from, const PathVertex &b);

// Evaluates f and pi for a path; structurally invalid or occluded paths
// yield an all-zero contribution.
Contribution eval_contribution(const SceneModel &scene, const Path &path);

// Per-vertex sampling record of an eye subpath (one entry per vertex after
// the camera).
struct TraceRecord {
    double dir_pdf = 0.0;   // solid-angle pdf at the generating vertex, or the
                            // discrete event probability for delta bounces
    bool delta = false;
    double area_conv = 0.0; // |cos here| / d^2 from the generating vertex
};

struct EyeSubpath {
    Path path;
    std::vector<TraceRecord> records;
    bool hit_emitter = false;
};

// Traces camera-ray + BSDF sampling until an emitter hit, a miss, a dead
// (zero-throughput) bounce, or max_vertices. The camera vertex counts toward
// max_vertices.
EyeSubpath trace_eye_subpath(const SceneModel &scene, RandomSequence &rng, int max_vertices);

// Density of trace_eye_subpath producing exactly this complete path, in the
// product area measure shared with eval_contribution. Zero for paths the eye
// tracer cannot generate. Independent of any current MCMC state.
double eye_path_density(const SceneModel &scene, const Path &path);

// Emitted radiance from the path's final vertex toward its predecessor.
Vec3 emitted_radiance(const SceneModel &scene, const PathVertex &v, const Vec3 &toward);

} // namespace ramlt
