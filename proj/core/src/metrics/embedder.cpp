#include "sceneloop/metrics/embedder.hpp"

namespace sceneloop::metrics {

double n_clip(const scene::Image& a, const scene::Image& b, Embedder& embedder) {
    return n_clip_from_embeddings(embedder.embed(a), embedder.embed(b));
}

} // namespace sceneloop::metrics
