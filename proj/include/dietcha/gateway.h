#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "dietcha/agent.h"
#include "dietcha/food_index.h"
#include "dietcha/guidelines.h"
#include "dietcha/knowledge_source.h"

namespace dietcha {

struct ApiRequest {
    std::string method;  // "GET" | "POST" | "OPTIONS"
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;  // null for bodiless responses (204)
};

/// HTTP status for a library error code.
int http_status_for(ErrorCode code);

class SessionStore {
public:
    using IdGenerator = std::function<std::string()>;

    /// Random 128-bit hex ids unless a generator is supplied.
    explicit SessionStore(IdGenerator ids = {});

    std::shared_ptr<Session> create();
    std::shared_ptr<Session> find(const std::string& id) const;
    std::size_t size() const;

private:
    IdGenerator ids_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

struct GatewayOptions {
    std::shared_ptr<Agent> agent;
    /// Local food table behind /v1/foods and the healthz count.
    std::shared_ptr<const FoodIndex> index;
    /// Source behind /v1/assess.
    std::shared_ptr<const KnowledgeSource> source;
    std::shared_ptr<const GuidelineSet> guidelines;
    /// Append-only JSON Lines log per session when set.
    std::optional<std::filesystem::path> persist_dir;
    std::string cors_origin = "*";
    SessionStore::IdGenerator session_ids;
};

/// The /v1 JSON API, independent of any socket so it can be driven directly.
///
///   POST /v1/sessions                      -> 201 {session_id}
///   GET  /v1/sessions/{id}                 -> {session_id, created_at, transcript, day_totals}
///   POST /v1/sessions/{id}/messages {text} -> {reply, risk_report?, trace_id, warnings, timestamp, degraded}
///   GET  /v1/sessions/{id}/trace[?trace_id=]  -> {session_id, records}
///   POST /v1/assess {meal}                 -> risk report + items + warnings
///   GET  /v1/foods?q=<name>                -> food record
///   GET  /healthz                          -> {status, db_foods, mode}
///
/// Errors use {code, message, details}.
class Gateway {
public:
    explicit Gateway(GatewayOptions options);

    ApiResponse handle(const ApiRequest& request);

    /// Headers added to every HTTP response.
    std::map<std::string, std::string> cors_headers() const;

    SessionStore& sessions() { return sessions_; }

private:
    ApiResponse create_session();
    ApiResponse get_session(const std::string& id);
    ApiResponse post_message(const std::string& id, const ApiRequest& request);
    ApiResponse get_trace(const std::string& id, const ApiRequest& request);
    ApiResponse assess(const ApiRequest& request);
    ApiResponse foods(const ApiRequest& request);
    ApiResponse healthz();

    std::shared_ptr<Session> require_session(const std::string& id);
    void persist(const Session& session, const nlohmann::json& event);

    GatewayOptions options_;
    SessionStore sessions_;
    std::mutex persist_mutex_;
};

/// Serves a Gateway over HTTP/1.1 on a background thread.
class GatewayServer {
public:
    explicit GatewayServer(Gateway& gateway);
    ~GatewayServer();
    GatewayServer(const GatewayServer&) = delete;
    GatewayServer& operator=(const GatewayServer&) = delete;

    /// Binds (port 0 picks a free port) and starts serving; returns the port.
    int start(const std::string& host, int port);
    /// Blocks serving on the calling thread.
    void run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace dietcha
