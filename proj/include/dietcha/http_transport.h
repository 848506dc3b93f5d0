#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dietcha::net {

struct HttpRequest {
    std::string url;
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
    std::chrono::milliseconds timeout{30000};
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Outbound HTTP. Implementations throw Error(NetworkError) when no response
/// was received; any HTTP status, including 4xx/5xx, is returned as-is.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport. Safe for concurrent use: each call opens
/// its own connection.
class HttplibTransport final : public Transport {
public:
    HttpResponse post(const HttpRequest& request) override;
};

/// Process-wide transport used by clients constructed without one. Tests
/// swap in a sentinel to prove a code path stays offline.
std::shared_ptr<Transport> default_transport();
void set_default_transport(std::shared_ptr<Transport> transport);

struct ParsedUrl {
    std::string scheme_host_port;  // "https://host:443"
    std::string path;              // "/v2/natural/nutrients"
};

/// Splits an absolute http(s) URL. Throws Error(NetworkError) on anything else.
ParsedUrl split_url(const std::string& url);

}  // namespace dietcha::net
