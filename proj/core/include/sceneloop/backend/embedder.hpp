#pragma once

#include "sceneloop/backend/http.hpp"
#include "sceneloop/metrics/embedder.hpp"

namespace sceneloop::backend {

// POSTs {"model", "input": [<png data URL>]} to an embeddings endpoint and
// L2-normalises data[0].embedding.
class HttpEmbedder final : public metrics::Embedder {
public:
    HttpEmbedder(std::string endpoint, std::string model, std::string api_key,
                 std::shared_ptr<HttpTransport> transport = nullptr);

    std::vector<double> embed(const scene::Image& image) override;
    std::string name() const override { return "http:" + model_; }

private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_;
    std::shared_ptr<HttpTransport> transport_;
};

} // namespace sceneloop::backend
