#pragma once

#include "sceneloop/metrics/image_metrics.hpp"

#include <memory>

namespace sceneloop::metrics {

// Image -> unit vector.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(const scene::Image& image) = 0;
    virtual std::string name() const = 0;
};

class FallbackEmbedder final : public Embedder {
public:
    std::vector<double> embed(const scene::Image& image) override { return fallback_embed(image); }
    std::string name() const override { return "fallback-grid-histogram-72"; }
};

double n_clip(const scene::Image& a, const scene::Image& b, Embedder& embedder);

} // namespace sceneloop::metrics
