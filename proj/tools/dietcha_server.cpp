#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "dietcha/agent.h"
#include "dietcha/error.h"
#include "dietcha/gateway.h"
#include "dietcha/remote_nutrition.h"

namespace {

dietcha::GatewayServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diabetic diet-assessment agent: HTTP gateway"};
    std::string db = "data/foods.jsonl";
    std::string guidelines_path;
    std::string mode_name = "deterministic";
    std::string listen = "127.0.0.1:8080";
    std::string persist;
    std::string chat_script;
    bool remote_kb = false;
    int max_steps = 5;
    app.add_option("--db", db, "food database (JSON Lines)")->check(CLI::ExistingFile);
    app.add_option("--guidelines", guidelines_path, "guideline set (JSON); built-in defaults when omitted")
        ->check(CLI::ExistingFile);
    app.add_option("--mode", mode_name, "deterministic | llm")->check(CLI::IsMember({"deterministic", "llm"}));
    app.add_option("--listen", listen, "address:port");
    app.add_option("--persist", persist, "directory for per-session JSON Lines logs");
    app.add_option("--chat-script", chat_script, "llm mode: replay this scripted backend instead of CHAT_API_URL")
        ->check(CLI::ExistingFile);
    app.add_flag("--remote-kb", remote_kb, "resolve meals through the NUTRITION_API_* service instead of --db");
    app.add_option("--max-steps", max_steps, "deterministic mode planner step bound")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        const auto colon = listen.rfind(':');
        if (colon == std::string::npos) throw std::invalid_argument("--listen must be address:port");
        const auto host = listen.substr(0, colon);
        const int port = std::stoi(listen.substr(colon + 1));

        auto index = std::make_shared<const dietcha::FoodIndex>(dietcha::FoodIndex::ingest(db));
        auto guidelines = std::make_shared<const dietcha::GuidelineSet>(
            guidelines_path.empty() ? dietcha::GuidelineSet::ada_aha_default()
                                    : dietcha::load_guidelines(guidelines_path));
        std::shared_ptr<const dietcha::KnowledgeSource> local = std::make_shared<dietcha::LocalKnowledgeBase>(index);
        std::shared_ptr<const dietcha::KnowledgeSource> source = local;
        if (remote_kb) {
            source = std::make_shared<dietcha::RemoteNutritionSource>(
                dietcha::RemoteNutritionConfig::from_environment());
        }

        std::shared_ptr<dietcha::Agent> agent;
        if (*dietcha::agent_mode_from_string(mode_name) == dietcha::AgentMode::Llm) {
            auto config = dietcha::ChatBackendConfig::from_environment();
            std::shared_ptr<dietcha::ChatBackend> backend;
            if (!chat_script.empty()) {
                backend = dietcha::ScriptedChatBackend::from_file(chat_script);
            } else {
                backend = std::make_shared<dietcha::HttpChatBackend>(config);
            }
            agent = dietcha::make_llm_agent(source, guidelines, backend, config);
        } else {
            agent = dietcha::make_deterministic_agent(source, guidelines, max_steps);
        }

        dietcha::GatewayOptions options;
        options.agent = agent;
        options.index = index;
        options.source = source;
        options.guidelines = guidelines;
        if (!persist.empty()) options.persist_dir = persist;
        dietcha::Gateway gateway(std::move(options));
        dietcha::GatewayServer server(gateway);
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "serving " << index->size() << " foods in " << mode_name << " mode on " << listen << "\n";
        server.run(host, port);
    } catch (const dietcha::Error& e) {
        std::cerr << "error: " << e.to_json().dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
