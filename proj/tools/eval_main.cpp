#include <fstream>
#include <sstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "dietcha/agent.h"
#include "dietcha/error.h"
#include "dietcha/eval.h"

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-assessment accuracy evaluation"};
    app.require_subcommand(1);

    std::string corpus_path;
    std::string db = "data/foods.jsonl";
    std::string guidelines_path;
    std::string out_path;

    auto* run = app.add_subcommand("run", "score a target against a corpus");
    std::string url;
    bool in_process = false;
    std::string format_name = "table";
    std::string system = "Proposed CHA";
    bool baseline = false;
    std::string chat_script;
    unsigned jobs = 1;
    run->add_option("--corpus", corpus_path, "corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
    auto* url_opt = run->add_option("--url", url, "gateway base URL, e.g. http://127.0.0.1:8080");
    run->add_flag("--in-process", in_process, "run the deterministic stack in this process (default)")
        ->excludes(url_opt);
    run->add_option("--db", db, "food database for --in-process")->check(CLI::ExistingFile);
    run->add_option("--guidelines", guidelines_path, "guideline set for --in-process")->check(CLI::ExistingFile);
    run->add_option("--out", out_path, "write the report here instead of stdout");
    run->add_option("--format", format_name, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));
    run->add_option("--system", system, "row label for the target");
    run->add_flag("--baseline", baseline, "also score a plain chat-model baseline (CHAT_API_* or --chat-script)");
    run->add_option("--chat-script", chat_script, "scripted backend for --baseline")->check(CLI::ExistingFile);
    run->add_option("--jobs", jobs, "questions in flight at once")->check(CLI::PositiveNumber);

    auto* truth = app.add_subcommand("ground-truth", "relabel a corpus with the independent oracle");
    truth->add_option("--corpus", corpus_path, "corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
    truth->add_option("--db", db, "food database")->check(CLI::ExistingFile);
    truth->add_option("--guidelines", guidelines_path, "guideline set; published thresholds when omitted")
        ->check(CLI::ExistingFile);
    truth->add_option("--out", out_path, "write the relabelled corpus here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto corpus = dietcha::load_corpus(corpus_path);
        if (*truth) {
            const auto foods = dietcha::oracle::FoodTable::from_jsonl(db);
            auto thresholds = dietcha::oracle::Thresholds::published();
            if (!guidelines_path.empty()) {
                std::ifstream in(guidelines_path);
                thresholds = dietcha::oracle::Thresholds::from_json(nlohmann::json::parse(in));
            }
            const auto labelled = dietcha::oracle::make_ground_truth(corpus, foods, thresholds);
            std::vector<dietcha::EvalQuestion> kept;
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                if (!labelled[i].labels) {
                    std::cerr << "excluded " << labelled[i].id << ": " << labelled[i].reason << "\n";
                    continue;
                }
                kept.push_back({corpus[i].id, corpus[i].question, *labelled[i].labels});
            }
            std::ostringstream out;
            dietcha::write_corpus(out, kept);
            emit(out.str(), out_path);
            return 0;
        }

        std::vector<dietcha::EvalReport> reports;
        if (!url.empty()) {
            dietcha::GatewayTarget target(url);
            reports.push_back(dietcha::run_eval(corpus, target, system, jobs));
        } else {
            auto index = std::make_shared<const dietcha::FoodIndex>(dietcha::FoodIndex::ingest(db));
            auto guidelines = std::make_shared<const dietcha::GuidelineSet>(
                guidelines_path.empty() ? dietcha::GuidelineSet::ada_aha_default()
                                        : dietcha::load_guidelines(guidelines_path));
            auto agent = dietcha::make_deterministic_agent(std::make_shared<dietcha::LocalKnowledgeBase>(index),
                                                           guidelines);
            dietcha::InProcessTarget target(agent);
            reports.push_back(dietcha::run_eval(corpus, target, system, jobs));
        }
        if (baseline) {
            auto config = dietcha::ChatBackendConfig::from_environment();
            std::shared_ptr<dietcha::ChatBackend> backend;
            if (!chat_script.empty()) {
                backend = dietcha::ScriptedChatBackend::from_file(chat_script);
            } else {
                backend = std::make_shared<dietcha::HttpChatBackend>(config);
            }
            dietcha::ChatBaselineTarget target(backend, config);
            reports.insert(reports.begin(), dietcha::run_eval(corpus, target, config.model + " baseline", 1));
        }
        emit(dietcha::render_report(reports, *dietcha::report_format_from_string(format_name)), out_path);
    } catch (const dietcha::Error& e) {
        std::cerr << "error: " << e.to_json().dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
