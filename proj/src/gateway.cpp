#include "dietcha/gateway.h"

#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "dietcha/error.h"
#include "dietcha/format.h"

namespace dietcha {

namespace {

std::string random_session_id() {
    static std::mutex mutex;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mutex);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                  static_cast<unsigned long long>(rng()));
    return buf;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string part;
    for (char c : path) {
        if (c == '/') {
            if (!part.empty()) parts.push_back(std::move(part));
            part.clear();
        } else {
            part += c;
        }
    }
    if (!part.empty()) parts.push_back(std::move(part));
    return parts;
}

ApiResponse error_response(const Error& e) { return {http_status_for(e.code()), e.to_json()}; }

nlohmann::json parse_body(const std::string& body) {
    try {
        auto j = nlohmann::json::parse(body);
        if (!j.is_object()) throw Error(ErrorCode::InvalidRequest, "request body must be a JSON object");
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidRequest, "request body is not valid JSON", {{"parser", e.what()}});
    }
}

std::string required_text(const nlohmann::json& body, const std::string& field, ErrorCode empty_code) {
    auto it = body.find(field);
    if (it == body.end() || !it->is_string()) {
        throw Error(ErrorCode::InvalidRequest, "field '" + field + "' must be a string", {{"field", field}});
    }
    auto text = it->get<std::string>();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(empty_code, "field '" + field + "' is empty", {{"field", field}});
    }
    return text;
}

}  // namespace

int http_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyMeal:
        case ErrorCode::MalformedItem:
        case ErrorCode::MealUnresolvable:
        case ErrorCode::InvalidTaskInput:
        case ErrorCode::InvalidRequest:
        case ErrorCode::InvalidQuantity:
            return 422;
        case ErrorCode::FoodNotFound:
        case ErrorCode::SessionNotFound:
        case ErrorCode::TraceNotFound:
        case ErrorCode::RouteNotFound:
            return 404;
        case ErrorCode::TurnInProgress:
            return 409;
        case ErrorCode::BackendUnavailable:
        case ErrorCode::ScriptExhausted:
        case ErrorCode::NetworkError:
        case ErrorCode::AuthError:
        case ErrorCode::UnparseableResponse:
            return 503;
        default:
            return 500;
    }
}

SessionStore::SessionStore(IdGenerator ids) : ids_(ids ? std::move(ids) : IdGenerator(random_session_id)) {}

std::shared_ptr<Session> SessionStore::create() {
    std::lock_guard lock(mutex_);
    std::string id = ids_();
    while (sessions_.count(id)) id = ids_();
    auto session = std::make_shared<Session>(id);
    sessions_.emplace(std::move(id), session);
    return session;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionStore::size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

Gateway::Gateway(GatewayOptions options) : options_(std::move(options)), sessions_(options_.session_ids) {
    if (!options_.agent || !options_.index || !options_.source || !options_.guidelines) {
        throw Error(ErrorCode::InvalidRequest, "gateway needs an agent, a food index, a source and guidelines");
    }
    if (options_.persist_dir) std::filesystem::create_directories(*options_.persist_dir);
}

std::map<std::string, std::string> Gateway::cors_headers() const {
    return {
        {"Access-Control-Allow-Origin", options_.cors_origin},
        {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
        {"Access-Control-Allow-Headers", "Content-Type"},
    };
}

ApiResponse Gateway::handle(const ApiRequest& request) {
    try {
        if (request.method == "OPTIONS") return {204, nullptr};
        const auto parts = split_path(request.path);
        const auto& m = request.method;
        if (parts.size() == 1 && parts[0] == "healthz" && m == "GET") return healthz();
        if (parts.size() >= 2 && parts[0] == "v1") {
            if (parts.size() == 2 && parts[1] == "sessions" && m == "POST") return create_session();
            if (parts.size() == 3 && parts[1] == "sessions" && m == "GET") return get_session(parts[2]);
            if (parts.size() == 4 && parts[1] == "sessions" && parts[3] == "messages" && m == "POST") {
                return post_message(parts[2], request);
            }
            if (parts.size() == 4 && parts[1] == "sessions" && parts[3] == "trace" && m == "GET") {
                return get_trace(parts[2], request);
            }
            if (parts.size() == 2 && parts[1] == "assess" && m == "POST") return assess(request);
            if (parts.size() == 2 && parts[1] == "foods" && m == "GET") return foods(request);
        }
        throw Error(ErrorCode::RouteNotFound, "no route for " + m + " " + request.path,
                    {{"method", m}, {"path", request.path}});
    } catch (const Error& e) {
        return error_response(e);
    } catch (const std::exception& e) {
        return {500, {{"code", "Internal"}, {"message", e.what()}, {"details", nlohmann::json::object()}}};
    }
}

std::shared_ptr<Session> Gateway::require_session(const std::string& id) {
    auto session = sessions_.find(id);
    if (!session) throw Error(ErrorCode::SessionNotFound, "no session '" + id + "'", {{"session_id", id}});
    return session;
}

void Gateway::persist(const Session& session, const nlohmann::json& event) {
    if (!options_.persist_dir) return;
    std::lock_guard lock(persist_mutex_);
    std::ofstream out(*options_.persist_dir / (session.id() + ".jsonl"), std::ios::app);
    out << event.dump() << "\n";
}

ApiResponse Gateway::create_session() {
    auto session = sessions_.create();
    persist(*session, {{"event", "session"}, {"session_id", session->id()}, {"created_at", session->created_at()}});
    return {201, {{"session_id", session->id()}}};
}

ApiResponse Gateway::get_session(const std::string& id) {
    auto session = require_session(id);
    nlohmann::json transcript = nlohmann::json::array();
    for (const auto& t : session->transcript()) transcript.push_back(to_json(t));
    return {200,
            {{"session_id", session->id()},
             {"created_at", session->created_at()},
             {"transcript", std::move(transcript)},
             {"day_totals", to_json(session->day_totals())}}};
}

ApiResponse Gateway::post_message(const std::string& id, const ApiRequest& request) {
    auto session = require_session(id);
    const auto text = required_text(parse_body(request.body), "text", ErrorCode::InvalidRequest);
    if (!session->try_begin_turn()) {
        throw Error(ErrorCode::TurnInProgress, "a previous message in this session is still being processed",
                    {{"session_id", id}});
    }
    struct Release {
        Session& s;
        ~Release() { s.end_turn(); }
    } release{*session};

    const auto result = options_.agent->run_turn(*session, text);
    nlohmann::json body = {
        {"reply", result.response.text},
        {"trace_id", result.trace.trace_id},
        {"warnings", result.response.warnings},
        {"timestamp", result.timestamp},
        {"degraded", result.response.degraded},
    };
    if (result.response.risk_report) body["risk_report"] = to_json(*result.response.risk_report);
    persist(*session, {{"event", "turn"}, {"user", text}, {"reply", body}, {"trace", to_json(result.trace)}});
    return {200, std::move(body)};
}

ApiResponse Gateway::get_trace(const std::string& id, const ApiRequest& request) {
    auto session = require_session(id);
    std::vector<TraceRecord> records;
    nlohmann::json body = {{"session_id", session->id()}};
    if (auto it = request.query.find("trace_id"); it != request.query.end()) {
        auto trace = session->trace(it->second);
        if (!trace) {
            throw Error(ErrorCode::TraceNotFound, "no trace '" + it->second + "' in session '" + id + "'",
                        {{"trace_id", it->second}});
        }
        records = trace->records;
        body["trace_id"] = trace->trace_id;
        body["budget_exhausted"] = trace->budget_exhausted;
        body["degraded"] = trace->degraded;
    } else {
        records = session->records();
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : records) out.push_back(to_json(r));
    body["records"] = std::move(out);
    return {200, std::move(body)};
}

ApiResponse Gateway::assess(const ApiRequest& request) {
    const auto meal = required_text(parse_body(request.body), "meal", ErrorCode::EmptyMeal);
    const auto resolution = options_.source->resolve_meal(meal);
    const auto report = assess_risk(resolution.total, *options_.guidelines);
    auto body = to_json(report);
    const auto resolved = to_json(resolution);
    body["items"] = resolved.at("items");
    body["warnings"] = resolved.at("warnings");
    return {200, std::move(body)};
}

ApiResponse Gateway::foods(const ApiRequest& request) {
    auto it = request.query.find("q");
    if (it == request.query.end() || it->second.find_first_not_of(" \t") == std::string::npos) {
        throw Error(ErrorCode::InvalidRequest, "query parameter 'q' is required", {{"field", "q"}});
    }
    auto record = options_.index->find(it->second);
    if (!record) throw Error(ErrorCode::FoodNotFound, "no food named '" + it->second + "'", {{"name", it->second}});
    return {200, to_json(*record)};
}

ApiResponse Gateway::healthz() {
    return {200,
            {{"status", "ok"},
             {"db_foods", options_.index->size()},
             {"mode", std::string(to_string(options_.agent->mode()))}}};
}

}  // namespace dietcha
