#include <httplib.h>

#include "dietcha/error.h"
#include "dietcha/gateway.h"

namespace dietcha {

struct GatewayServer::Impl {
    Gateway& gateway;
    httplib::Server server;
    std::thread thread;

    explicit Impl(Gateway& g) : gateway(g) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            ApiRequest request{req.method, req.path, {}, req.body};
            for (const auto& [k, v] : req.params) request.query.emplace(k, v);
            const auto response = gateway.handle(request);
            for (const auto& [k, v] : gateway.cors_headers()) res.set_header(k, v);
            res.status = response.status;
            if (!response.body.is_null()) res.set_content(response.body.dump(), "application/json");
        };
        server.Get(".*", handler);
        server.Post(".*", handler);
        server.Options(".*", handler);
    }
};

GatewayServer::GatewayServer(Gateway& gateway) : impl_(std::make_unique<Impl>(gateway)) {}

GatewayServer::~GatewayServer() { stop(); }

int GatewayServer::start(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : impl_->server.bind_to_port(host, port)
                                                                               ? port
                                                                               : -1;
    if (bound < 0) throw Error(ErrorCode::NetworkError, "cannot listen on " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void GatewayServer::run(const std::string& host, int port) {
    if (!impl_->server.listen(host, port)) {
        throw Error(ErrorCode::NetworkError, "cannot listen on " + host + ":" + std::to_string(port));
    }
}

void GatewayServer::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace dietcha
