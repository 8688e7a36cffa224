#pragma once

#include "sceneloop/backend/chat.hpp"

#include <chrono>
#include <map>

namespace sceneloop::backend {

struct HttpRequest {
    std::string url;
    std::map<std::string, std::string> headers;
    std::string body;
    std::chrono::milliseconds timeout{120000};
};

struct HttpResponse {
    long status = 0;
    std::string body;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    // Throws TransportError when no HTTP response was obtained.
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

class CurlTransport final : public HttpTransport {
public:
    CurlTransport();
    HttpResponse post(const HttpRequest& request) override;
};

} // namespace sceneloop::backend
