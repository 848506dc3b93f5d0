#include "dietcha/chat_backend.h"

#include <cstdlib>
#include <fstream>

#include "dietcha/error.h"

namespace dietcha {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return (v && *v) ? std::string(v) : fallback;
}

std::string joined_content(const ChatRequest& request) {
    std::string all;
    for (const auto& m : request.messages) {
        all += m.content;
        all += '\n';
    }
    return all;
}

}  // namespace

nlohmann::json to_json(const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", request.model}, {"messages", std::move(messages)}, {"temperature", request.temperature}};
}

ChatBackendConfig ChatBackendConfig::from_environment() {
    ChatBackendConfig c;
    c.endpoint = env_or("CHAT_API_URL", c.endpoint);
    c.model = env_or("CHAT_MODEL", c.model);
    c.api_key = env_or("CHAT_API_KEY", "");
    try {
        c.temperature = std::stod(env_or("CHAT_TEMPERATURE", "0"));
        c.max_steps = std::stoi(env_or("CHAT_MAX_STEPS", "5"));
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidTaskInput, "CHAT_TEMPERATURE / CHAT_MAX_STEPS must be numeric");
    }
    c.validate();
    return c;
}

void ChatBackendConfig::validate() const {
    if (max_steps < 1) throw Error(ErrorCode::InvalidTaskInput, "max_steps must be at least 1");
}

HttpChatBackend::HttpChatBackend(ChatBackendConfig config, std::shared_ptr<net::Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::string HttpChatBackend::complete(const ChatRequest& request) {
    net::HttpRequest http;
    http.url = config_.endpoint;
    http.body = to_json(request).dump();
    http.headers.emplace_back("Content-Type", "application/json");
    if (!config_.api_key.empty()) http.headers.emplace_back("Authorization", "Bearer " + config_.api_key);

    net::HttpResponse response;
    try {
        auto transport = transport_ ? transport_ : net::default_transport();
        response = transport->post(http);
    } catch (const Error& e) {
        throw Error(ErrorCode::BackendUnavailable, std::string("chat backend unreachable: ") + e.what(), e.details());
    }
    if (response.status < 200 || response.status >= 300) {
        throw Error(ErrorCode::BackendUnavailable, "chat backend returned HTTP " + std::to_string(response.status),
                    {{"status", response.status}, {"excerpt", response.body.substr(0, 200)}});
    }
    try {
        const auto j = nlohmann::json::parse(response.body);
        if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
            return j["choices"][0].at("message").at("content").get<std::string>();
        }
        if (j.contains("message") && j["message"].is_object()) return j["message"].at("content").get<std::string>();
        if (j.contains("content") && j["content"].is_string()) return j["content"].get<std::string>();
    } catch (const nlohmann::json::exception&) {
    }
    throw Error(ErrorCode::BackendUnavailable, "chat backend response has no assistant message",
                {{"excerpt", response.body.substr(0, 200)}});
}

ScriptedChatBackend::ScriptedChatBackend(std::vector<Exchange> script) : script_(std::move(script)) {}

std::shared_ptr<ScriptedChatBackend> ScriptedChatBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ScriptExhausted, "cannot open chat script " + path.string());
    std::vector<Exchange> script;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Exchange ex;
            ex.response = j.at("response").get<std::string>();
            if (j.contains("request") && j["request"].contains("contains")) {
                ex.expect_contains = j["request"]["contains"].get<std::vector<std::string>>();
            }
            script.push_back(std::move(ex));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ScriptExhausted, "chat script line " + std::to_string(line_no) + ": " + e.what(),
                        {{"line", line_no}});
        }
    }
    return std::make_shared<ScriptedChatBackend>(std::move(script));
}

std::string ScriptedChatBackend::complete(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    received_.push_back(request);
    if (next_ >= script_.size()) {
        throw Error(ErrorCode::ScriptExhausted, "chat script has no more responses",
                    {{"calls", received_.size()}});
    }
    const auto& ex = script_[next_++];
    const auto all = joined_content(request);
    for (const auto& needle : ex.expect_contains) {
        if (all.find(needle) == std::string::npos) {
            throw Error(ErrorCode::ScriptExhausted, "request does not match script entry: missing '" + needle + "'",
                        {{"entry", next_ - 1}});
        }
    }
    return ex.response;
}

std::vector<ChatRequest> ScriptedChatBackend::received() const {
    std::lock_guard lock(mutex_);
    return received_;
}

std::size_t ScriptedChatBackend::remaining() const {
    std::lock_guard lock(mutex_);
    return script_.size() - next_;
}

std::string EchoChatBackend::complete(const ChatRequest& request) { return joined_content(request); }

}  // namespace dietcha
