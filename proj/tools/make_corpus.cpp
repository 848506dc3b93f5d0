#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dietcha/error.h"
#include "dietcha/eval.h"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic, oracle-labelled evaluation corpus"};
    std::string db = "data/foods.jsonl";
    std::string out_path;
    dietcha::oracle::CorpusOptions options;
    app.add_option("--db", db, "food database (JSON Lines)")->check(CLI::ExistingFile);
    app.add_option("--seed", options.seed, "random seed");
    app.add_option("--count", options.questions, "number of questions")->check(CLI::PositiveNumber);
    app.add_option("--boundary", options.boundary_adjacent, "questions with some value within 5% of a bound");
    app.add_option("--out", out_path, "output file; stdout when omitted");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto foods = dietcha::oracle::FoodTable::from_jsonl(db);
        const auto corpus =
            dietcha::oracle::generate_corpus(foods, dietcha::oracle::Thresholds::published(), options);
        std::ostringstream text;
        dietcha::write_corpus(text, corpus);
        if (out_path.empty()) {
            std::cout << text.str();
        } else {
            std::ofstream(out_path) << text.str();
        }
        std::cerr << corpus.size() << " questions\n";
    } catch (const dietcha::Error& e) {
        std::cerr << "error: " << e.to_json().dump() << "\n";
        return 1;
    }
    return 0;
}
