#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dietcha/http_transport.h"

namespace dietcha {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
};

nlohmann::json to_json(const ChatRequest& request);

struct ChatBackendConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-3.5-turbo";
    std::string api_key;
    double temperature = 0.0;
    /// Planner loop bound per turn.
    int max_steps = 5;

    /// CHAT_API_URL, CHAT_API_KEY, CHAT_MODEL, CHAT_TEMPERATURE, CHAT_MAX_STEPS.
    static ChatBackendConfig from_environment();
    /// Throws InvalidTaskInput when max_steps < 1.
    void validate() const;
};

/// A chat-completion service. Implementations must tolerate concurrent calls.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    /// Returns the assistant message text. Throws BackendUnavailable when the
    /// service cannot be reached or answers with an error.
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// POSTs {"model","messages","temperature"} and reads
/// choices[0].message.content (or a bare "content"/"message" field).
class HttpChatBackend final : public ChatBackend {
public:
    explicit HttpChatBackend(ChatBackendConfig config, std::shared_ptr<net::Transport> transport = nullptr);
    std::string complete(const ChatRequest& request) override;

private:
    ChatBackendConfig config_;
    std::shared_ptr<net::Transport> transport_;
};

/// Replays recorded exchanges in order. Fixture format is JSON Lines:
///
///     {"request": {"contains": ["Action:"]}, "response": "Thought: ...\nAction: Final\nAction Input: {}"}
///
/// "request" is optional; when given, every "contains" string must occur in
/// the concatenated request messages or the call fails with ScriptExhausted.
class ScriptedChatBackend final : public ChatBackend {
public:
    struct Exchange {
        std::vector<std::string> expect_contains;
        std::string response;
    };

    explicit ScriptedChatBackend(std::vector<Exchange> script);
    static std::shared_ptr<ScriptedChatBackend> from_file(const std::filesystem::path& path);

    std::string complete(const ChatRequest& request) override;

    std::vector<ChatRequest> received() const;
    std::size_t remaining() const;

private:
    mutable std::mutex mutex_;
    std::vector<Exchange> script_;
    std::size_t next_ = 0;
    std::vector<ChatRequest> received_;
};

/// Answers with the request's messages concatenated; handy for checking what
/// actually reached the model.
class EchoChatBackend final : public ChatBackend {
public:
    std::string complete(const ChatRequest& request) override;
};

}  // namespace dietcha
