#include "sceneloop/scene/render.hpp"

#include "sceneloop/scene/animation.hpp"
#include "sceneloop/scene/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>

namespace sceneloop::scene {

namespace {

std::uint8_t quantize(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

struct ScreenVertex {
    double x, y;
    double inv_depth;
};

struct ScreenTriangle {
    std::array<ScreenVertex, 3> v;
    std::array<std::uint8_t, 3> color;
    int min_y, max_y;
};

Vec3 shade(const SceneState& state, const Material& m, const Vec3& normal, const Vec3& point) {
    Vec3 irradiance = Vec3::Constant(state.ambient);
    for (const Light& light : state.lights()) {
        if (light.kind == LightKind::sun) {
            const double ndotl = std::max(0.0, normal.dot(-light.direction));
            irradiance += light.energy * ndotl * light.color;
        } else {
            const Vec3 d = light.location - point;
            const double dist2 = d.squaredNorm();
            if (dist2 < 1e-12) continue;
            const double ndotl = std::max(0.0, normal.dot(d / std::sqrt(dist2)));
            irradiance += (light.energy * ndotl / dist2) * light.color;
        }
    }
    return m.base_color.head<3>().cwiseProduct(irradiance) + m.emissive;
}

class Projector {
public:
    Projector(const CameraPose& cam, int width, int height)
        : eye_(cam.location), world_to_cam_(rotation_matrix(cam.rotation_euler).transpose()), width_(width),
          height_(height), tan_half_(std::tan(cam.fov_y / 2.0)), aspect_(static_cast<double>(width) / height) {}

    Vec3 to_camera(const Vec3& w) const { return world_to_cam_ * (w - eye_); }

    ScreenVertex to_screen(const Vec3& c) const {
        const double depth = -c.z();
        const double nx = c.x() / (depth * tan_half_ * aspect_);
        const double ny = c.y() / (depth * tan_half_);
        return {(nx + 1.0) * 0.5 * width_, (1.0 - ny) * 0.5 * height_, 1.0 / depth};
    }

    const Vec3& eye() const { return eye_; }

private:
    Vec3 eye_;
    Mat3 world_to_cam_;
    int width_, height_;
    double tan_half_, aspect_;
};

// Sutherland-Hodgman against the plane depth = near (camera space, -z forward).
std::vector<Vec3> clip_near(const std::array<Vec3, 3>& tri, double near_plane) {
    std::vector<Vec3> out;
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = tri[i];
        const Vec3& b = tri[(i + 1) % 3];
        const double da = -a.z() - near_plane;
        const double db = -b.z() - near_plane;
        if (da >= 0) out.push_back(a);
        if ((da >= 0) != (db >= 0)) {
            const double t = da / (da - db);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

void rasterize_band(const std::vector<ScreenTriangle>& tris, int y0, int y1, int width, Image& image,
                    std::vector<double>& depth) {
    for (const ScreenTriangle& t : tris) {
        const int ty0 = std::max(t.min_y, y0);
        const int ty1 = std::min(t.max_y, y1 - 1);
        if (ty0 > ty1) continue;
        const auto& [a, b, c] = t.v;
        const double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (area == 0.0) continue;
        const double min_xf = std::min({a.x, b.x, c.x});
        const double max_xf = std::max({a.x, b.x, c.x});
        const int x0 = std::max(0, static_cast<int>(std::floor(min_xf - 0.5)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(max_xf - 0.5)));
        for (int y = ty0; y <= ty1; ++y) {
            const double py = y + 0.5;
            for (int x = x0; x <= x1; ++x) {
                const double px = x + 0.5;
                double w0 = (b.x - px) * (c.y - py) - (b.y - py) * (c.x - px);
                double w1 = (c.x - px) * (a.y - py) - (c.y - py) * (a.x - px);
                double w2 = (a.x - px) * (b.y - py) - (a.y - py) * (b.x - px);
                if (area < 0) {
                    w0 = -w0;
                    w1 = -w1;
                    w2 = -w2;
                }
                if (w0 < 0 || w1 < 0 || w2 < 0) continue;
                const double sum = w0 + w1 + w2;
                const double inv_depth = (w0 * a.inv_depth + w1 * b.inv_depth + w2 * c.inv_depth) / sum;
                double& slot = depth[static_cast<size_t>(y) * width + x];
                if (inv_depth > slot) {
                    slot = inv_depth;
                    image.set(x, y, t.color);
                }
            }
        }
    }
}

} // namespace

std::optional<Eigen::Vector2d> project(const CameraPose& camera, const Vec3& point, int width, int height) {
    Projector p(camera, width, height);
    const Vec3 c = p.to_camera(point);
    if (-c.z() <= 0.0) return std::nullopt;
    const ScreenVertex s = p.to_screen(c);
    return Eigen::Vector2d(s.x, s.y);
}

Image render(const SceneState& state, const CameraPose& camera, const RenderConfig& config) {
    if (config.width <= 0 || config.height <= 0) throw Error("render resolution must be positive");
    const SceneState posed = evaluate_at_frame(state, state.current_frame);
    Image image(config.width, config.height,
                std::array<std::uint8_t, 3>{quantize(posed.background.x()), quantize(posed.background.y()), quantize(posed.background.z())});

    const Projector proj(camera, config.width, config.height);
    std::vector<ScreenTriangle> tris;
    for (const SceneObject& obj : posed.objects()) {
        if (!obj.visible) continue;
        const Mesh& mesh = obj.shape.geometry();
        const auto verts = world_vertices(obj);
        for (const auto& t : mesh.triangles) {
            const Vec3& w0 = verts[t[0]];
            const Vec3& w1 = verts[t[1]];
            const Vec3& w2 = verts[t[2]];
            Vec3 n = (w1 - w0).cross(w2 - w0);
            const double len = n.norm();
            if (len < 1e-15) continue;
            n /= len;
            const Vec3 centroid = (w0 + w1 + w2) / 3.0;
            if (n.dot(proj.eye() - centroid) < 0) n = -n;
            const Vec3 rgb = shade(posed, obj.material, n, centroid);
            const std::array<std::uint8_t, 3> color{quantize(rgb.x()), quantize(rgb.y()), quantize(rgb.z())};

            const auto poly = clip_near({proj.to_camera(w0), proj.to_camera(w1), proj.to_camera(w2)}, config.near_plane);
            if (poly.size() < 3) continue;
            std::vector<ScreenVertex> sv;
            sv.reserve(poly.size());
            for (const Vec3& c : poly) sv.push_back(proj.to_screen(c));
            for (size_t k = 1; k + 1 < sv.size(); ++k) {
                ScreenTriangle st{{sv[0], sv[k], sv[k + 1]}, color, 0, 0};
                const double min_y = std::min({st.v[0].y, st.v[1].y, st.v[2].y});
                const double max_y = std::max({st.v[0].y, st.v[1].y, st.v[2].y});
                if (max_y < 0 || min_y > config.height) continue;
                st.min_y = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
                st.max_y = std::min(config.height - 1, static_cast<int>(std::ceil(max_y - 0.5)));
                tris.push_back(st);
            }
        }
    }

    std::vector<double> depth(static_cast<size_t>(config.width) * config.height, 0.0);
    const int threads = std::clamp(config.threads, 1, config.height);
    if (threads == 1) {
        rasterize_band(tris, 0, config.height, config.width, image, depth);
    } else {
        // Disjoint row bands; each pixel sees triangles in the same order.
        std::vector<std::jthread> workers;
        const int band = (config.height + threads - 1) / threads;
        for (int i = 0; i < threads; ++i) {
            const int y0 = i * band;
            const int y1 = std::min(config.height, y0 + band);
            if (y0 >= y1) break;
            workers.emplace_back([&, y0, y1] { rasterize_band(tris, y0, y1, config.width, image, depth); });
        }
    }
    return image;
}

} // namespace sceneloop::scene
