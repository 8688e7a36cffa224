#include "sceneloop/metrics/image_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace sceneloop::metrics {

std::vector<double> resample_bilinear(const scene::Image& image, int width, int height) {
    if (image.empty()) throw Error("cannot resample an empty image");
    std::vector<double> out(static_cast<size_t>(width) * height * 3);
    const double sx = static_cast<double>(image.width()) / width;
    const double sy = static_cast<double>(image.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, image.height() - 1);
        const double ty = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, image.width() - 1);
            const double tx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = image.at(x0, y0, c) * (1 - tx) + image.at(x1, y0, c) * tx;
                const double bottom = image.at(x0, y1, c) * (1 - tx) + image.at(x1, y1, c) * tx;
                out[(static_cast<size_t>(y) * width + x) * 3 + c] = top * (1 - ty) + bottom * ty;
            }
        }
    }
    return out;
}

double photometric_loss(const scene::Image& a, const scene::Image& b) {
    if (a.empty() || b.empty()) throw Error("photometric loss needs two non-empty images");
    if (a.width() == b.width() && a.height() == b.height()) {
        std::uint64_t sum = 0;
        const auto pa = a.bytes(), pb = b.bytes();
        for (size_t i = 0; i < pa.size(); ++i) sum += static_cast<std::uint64_t>(std::abs(int(pa[i]) - int(pb[i])));
        return 100.0 * static_cast<double>(sum) / (255.0 * static_cast<double>(pa.size()));
    }
    const auto ra = resample_bilinear(a, kResampleSize, kResampleSize);
    const auto rb = resample_bilinear(b, kResampleSize, kResampleSize);
    double sum = 0;
    for (size_t i = 0; i < ra.size(); ++i) sum += std::abs(ra[i] - rb[i]);
    return 100.0 * sum / (255.0 * static_cast<double>(ra.size()));
}

std::vector<double> fallback_embed(const scene::Image& image) {
    std::vector<double> v(kEmbedDim, 0.0);
    const int w = image.width(), h = image.height();
    for (int cy = 0; cy < 4; ++cy) {
        const int y0 = cy * h / 4, y1 = (cy + 1) * h / 4;
        for (int cx = 0; cx < 4; ++cx) {
            const int x0 = cx * w / 4, x1 = (cx + 1) * w / 4;
            const double count = static_cast<double>(y1 - y0) * (x1 - x0);
            if (count == 0) continue;
            double sum[3] = {0, 0, 0};
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    for (int c = 0; c < 3; ++c) sum[c] += image.at(x, y, c);
            for (int c = 0; c < 3; ++c) v[(cy * 4 + cx) * 3 + c] = sum[c] / (255.0 * count);
        }
    }
    const double pixels = static_cast<double>(w) * h;
    if (pixels > 0) {
        const auto bytes = image.bytes();
        for (size_t i = 0; i < bytes.size(); ++i) v[48 + (i % 3) * 8 + (bytes[i] >> 5)] += 1.0;
        for (int i = 48; i < kEmbedDim; ++i) v[i] /= pixels;
    }
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm > 0)
        for (double& x : v) x /= norm;
    return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error("embedding dimensions differ");
    const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    if (na == 0 || nb == 0) return 0.0;
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double n_clip_from_embeddings(const std::vector<double>& a, const std::vector<double>& b) {
    return 100.0 * (1.0 - cosine(a, b));
}

} // namespace sceneloop::metrics
