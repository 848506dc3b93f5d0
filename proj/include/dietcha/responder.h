#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dietcha/chat_backend.h"
#include "dietcha/data_pipe.h"
#include "dietcha/risk.h"
#include "dietcha/trace.h"

namespace dietcha {

struct ResponseContext {
    std::string query;
    /// Pipe entries written during this turn, oldest first.
    std::vector<std::shared_ptr<const DataPipeEntry>> payloads;
    /// This turn's executed steps, including failures.
    std::vector<TraceRecord> steps;
    /// The trace of the turn before this one, if any.
    std::optional<TurnTrace> previous_trace;
    bool explain = false;
    bool budget_exhausted = false;
};

struct Response {
    std::string text;
    std::optional<RiskReport> risk_report;
    nlohmann::json warnings = nlohmann::json::array();
    bool degraded = false;
};

class Responder {
public:
    virtual ~Responder() = default;
    virtual Response respond(const ResponseContext& ctx) = 0;
};

/// Fixed template. Numbers are copied from the payloads' preformatted
/// "display" strings, never recomputed.
class DeterministicResponder final : public Responder {
public:
    Response respond(const ResponseContext& ctx) override;
};

/// Asks a chat model to phrase the answer from the payload JSON. Any backend
/// failure falls back to the deterministic template with degraded = true.
class LlmResponder final : public Responder {
public:
    LlmResponder(std::shared_ptr<ChatBackend> backend, ChatBackendConfig config);
    Response respond(const ResponseContext& ctx) override;

private:
    std::shared_ptr<ChatBackend> backend_;
    ChatBackendConfig config_;
    DeterministicResponder fallback_;
};

/// The risk report and warnings a reply carries, taken from this turn's
/// payloads. Shared by both responders so attachments never depend on prose.
void attach_results(const ResponseContext& ctx, Response& response);

std::vector<ChatMessage> render_responder_prompt(const ResponseContext& ctx);

}  // namespace dietcha
