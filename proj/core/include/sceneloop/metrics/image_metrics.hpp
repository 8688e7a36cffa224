#pragma once

#include "sceneloop/scene/image.hpp"

#include <vector>

namespace sceneloop::metrics {

inline constexpr int kResampleSize = 256;

// Bilinear resample (pixel-centre aligned, edge clamped) without
// quantisation; values stay in [0, 255], row-major RGB.
std::vector<double> resample_bilinear(const scene::Image& image, int width, int height);

// 100 * mean |a - b| over pixels and channels, channels scaled to [0, 1].
// Images of different sizes are both resampled to 256x256 first.
double photometric_loss(const scene::Image& a, const scene::Image& b);

inline constexpr int kEmbedDim = 72;

// 4x4 grid of per-cell mean RGB in [0, 1] (48 values, row-major cells) then
// three 8-bin per-channel histograms as pixel fractions (24 values), L2
// normalised.
std::vector<double> fallback_embed(const scene::Image& image);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// 100 * (1 - cosine) for two embeddings.
double n_clip_from_embeddings(const std::vector<double>& a, const std::vector<double>& b);

} // namespace sceneloop::metrics
