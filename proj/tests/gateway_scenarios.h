#pragma once

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <string>

#include "dietcha/gateway.h"
#include "test_support.h"

namespace dietcha::testing {

inline GatewayOptions gateway_options() {
    GatewayOptions o;
    o.agent = make_deterministic_agent(bundled_source(), default_guidelines());
    o.index = bundled_index();
    o.source = bundled_source();
    o.guidelines = default_guidelines();
    auto n = std::make_shared<int>(0);
    o.session_ids = [n] { return "session-" + std::to_string(++*n); };
    return o;
}

inline ApiResponse call(Gateway& g, const std::string& method, const std::string& path,
                        const nlohmann::json& body = nullptr, std::map<std::string, std::string> query = {}) {
    return g.handle({method, path, std::move(query), body.is_null() ? "" : body.dump()});
}

// Clock-dependent fields vary run to run.
inline nlohmann::json mask(nlohmann::json j) {
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) {
            if (k == "timestamp" || k == "created_at" || k == "started_at" || k == "finished_at" ||
                k == "duration_ms") {
                v = "<masked>";
            } else {
                v = mask(v);
            }
        }
    } else if (j.is_array()) {
        for (auto& v : j) v = mask(v);
    }
    return j;
}

inline nlohmann::json exchange(Gateway& g, const std::string& method, const std::string& path,
                               const nlohmann::json& body = nullptr, std::map<std::string, std::string> query = {}) {
    const auto r = call(g, method, path, body, query);
    return {{"request", {{"method", method}, {"path", path}, {"body", body}, {"query", query}}},
            {"status", r.status},
            {"response", mask(r.body)}};
}

inline nlohmann::json conversation_scenario() {
    Gateway g(gateway_options());
    auto log = nlohmann::json::array();
    log.push_back(exchange(g, "GET", "/healthz"));
    log.push_back(exchange(g, "POST", "/v1/sessions"));
    log.push_back(exchange(g, "POST", "/v1/sessions/session-1/messages",
                           {{"text", "I had 2 slices of whole wheat toast and a boiled egg"}}));
    log.push_back(exchange(g, "POST", "/v1/sessions/session-1/messages", {{"text", "what about adding a candy bar?"}}));
    log.push_back(exchange(g, "POST", "/v1/sessions/session-1/messages", {{"text", "How did you compute that?"}}));
    log.push_back(exchange(g, "GET", "/v1/sessions/session-1/trace", nullptr, {{"trace_id", "session-1-t2"}}));
    log.push_back(exchange(g, "GET", "/v1/sessions/session-1"));
    log.push_back(exchange(g, "OPTIONS", "/v1/assess"));
    return log;
}

inline nlohmann::json stateless_scenario() {
    Gateway g(gateway_options());
    auto log = nlohmann::json::array();
    log.push_back(
        exchange(g, "POST", "/v1/assess", {{"meal", "1 1/2 cups rice, half an apple, a plate of unobtainium"}}));
    log.push_back(exchange(g, "GET", "/v1/foods", nullptr, {{"q", "Boiled Eggs"}}));
    return log;
}

inline nlohmann::json error_scenario() {
    Gateway g(gateway_options());
    auto log = nlohmann::json::array();
    log.push_back(exchange(g, "POST", "/v1/sessions/nope/messages", {{"text", "hi"}}));
    log.push_back(exchange(g, "GET", "/v1/sessions/nope"));
    log.push_back(exchange(g, "GET", "/v1/sessions/nope/trace"));
    log.push_back(exchange(g, "POST", "/v1/sessions"));
    log.push_back(exchange(g, "POST", "/v1/sessions/session-1/messages", {{"text", ""}}));
    log.push_back(exchange(g, "GET", "/v1/sessions/session-1/trace", nullptr, {{"trace_id", "zzz"}}));
    auto s = g.sessions().find("session-1");
    s->try_begin_turn();
    log.push_back(exchange(g, "POST", "/v1/sessions/session-1/messages", {{"text", "2 eggs"}}));
    s->end_turn();
    log.push_back(exchange(g, "POST", "/v1/assess", {{"meal", ""}}));
    log.push_back(exchange(g, "POST", "/v1/assess", {{"meal", "a plate of unobtainium"}}));
    log.push_back(exchange(g, "GET", "/v1/foods", nullptr, {{"q", "unobtainium"}}));
    log.push_back(exchange(g, "GET", "/v1/foods"));
    log.push_back(exchange(g, "GET", "/v2/whatever"));
    return log;
}

inline const std::map<std::string, nlohmann::json (*)()>& gateway_scenarios() {
    static const std::map<std::string, nlohmann::json (*)()> s = {
        {"conversation", conversation_scenario},
        {"stateless", stateless_scenario},
        {"errors", error_scenario},
    };
    return s;
}

// Returns an empty string on a match, otherwise what went wrong. Writes the
// file instead when UPDATE_GOLDEN is set.
inline std::string check_golden(const std::string& name, const nlohmann::json& actual) {
    const auto path = source_path("tests/golden/" + name + ".json");
    const auto text = actual.dump(2) + "\n";
    if (std::getenv("UPDATE_GOLDEN")) {
        std::ofstream(path) << text;
        return "";
    }
    std::ifstream in(path);
    if (!in) return "missing golden file " + path.string() + " (run with UPDATE_GOLDEN=1)";
    std::string expected((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text != expected) return "golden mismatch for " + name;
    return "";
}

}  // namespace dietcha::testing
