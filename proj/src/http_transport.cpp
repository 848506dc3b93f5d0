#include "dietcha/http_transport.h"

#include <mutex>

#include <httplib.h>

#include "dietcha/error.h"

namespace dietcha::net {

namespace {

std::mutex g_transport_mutex;
std::shared_ptr<Transport> g_transport;

}  // namespace

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::NetworkError, "URL must be absolute: '" + url + "'", {{"url", url}});
    }
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorCode::NetworkError, "unsupported URL scheme '" + scheme + "'", {{"url", url}});
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

HttpResponse HttplibTransport::post(const HttpRequest& request) {
    const auto parts = split_url(request.url);
    httplib::Client client(parts.scheme_host_port);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(request.timeout).count();
    client.set_connection_timeout(static_cast<time_t>(seconds), 0);
    client.set_read_timeout(static_cast<time_t>(seconds), 0);

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
        if (k == "Content-Type") {
            content_type = v;
        } else {
            headers.emplace(k, v);
        }
    }
    auto result = client.Post(parts.path, headers, request.body, content_type);
    if (!result) {
        throw Error(ErrorCode::NetworkError,
                    "request to " + request.url + " failed: " + httplib::to_string(result.error()),
                    {{"url", request.url}});
    }
    return {result->status, result->body};
}

std::shared_ptr<Transport> default_transport() {
    std::lock_guard lock(g_transport_mutex);
    if (!g_transport) g_transport = std::make_shared<HttplibTransport>();
    return g_transport;
}

void set_default_transport(std::shared_ptr<Transport> transport) {
    std::lock_guard lock(g_transport_mutex);
    g_transport = std::move(transport);
}

}  // namespace dietcha::net
