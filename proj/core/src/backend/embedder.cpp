#include "sceneloop/backend/embedder.hpp"

#include "sceneloop/util/base64.hpp"

#include <fmt/format.h>

#include <cmath>

namespace sceneloop::backend {

HttpEmbedder::HttpEmbedder(std::string endpoint, std::string model, std::string api_key,
                           std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      api_key_(std::move(api_key)),
      transport_(transport ? std::move(transport) : std::make_shared<CurlTransport>()) {}

std::vector<double> HttpEmbedder::embed(const scene::Image& image) {
    HttpRequest req;
    req.url = endpoint_;
    req.headers["Content-Type"] = "application/json";
    if (!api_key_.empty()) req.headers["Authorization"] = "Bearer " + api_key_;
    const json body = {{"model", model_},
                       {"input", json::array({"data:image/png;base64," + base64::encode(scene::encode_png(image))})}};
    req.body = body.dump();
    const HttpResponse resp = transport_->post(req);
    if (resp.status == 401 || resp.status == 403) throw AuthError(fmt::format("embedder rejected credential (HTTP {})", resp.status));
    if (resp.status < 200 || resp.status >= 300) throw BackendError(fmt::format("embedder returned HTTP {}", resp.status));
    const json j = json::parse(resp.body, nullptr, false);
    if (j.is_discarded() || !j.contains("data") || j["data"].empty())
        throw BackendError("embedder response has no data[0].embedding");
    std::vector<double> v = j["data"][0].at("embedding").get<std::vector<double>>();
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0 || !std::isfinite(norm)) throw BackendError("embedder returned a zero or non-finite vector");
    for (double& x : v) x /= norm;
    return v;
}

} // namespace sceneloop::backend
