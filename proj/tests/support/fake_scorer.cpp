// Line-oriented stand-in for a remote scorer, driven by the process transport
// tests. Usage: fake_scorer MODE [N]
//   overlap      score = share of query words found in the passage
//   extra        one score too many
//   garbage      a line that is not JSON
//   error        {"error": ...}
//   exit-after N answer N requests normally, then exit without answering

#include <cctype>
#include <iostream>
#include <set>
#include <string>

#include "json.hpp"

namespace {

std::set<std::string> words(const std::string& text)
{
    std::set<std::string> out;
    std::string word;
    for (char c : text + " ") {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!word.empty()) {
            out.insert(word);
            word.clear();
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    std::string mode = argc > 1 ? argv[1] : "overlap";
    long limit = argc > 2 ? std::stol(argv[2]) : -1;
    std::string line;
    long answered = 0;
    while (std::getline(std::cin, line)) {
        if (mode == "exit-after" && answered >= limit) {
            return 0;
        }
        ++answered;
        if (mode == "garbage") {
            std::cout << "this is not json" << std::endl;
            continue;
        }
        if (mode == "error") {
            std::cout << R"({"error":"model not loaded"})" << std::endl;
            continue;
        }
        auto request = nlohmann::json::parse(line, nullptr, false);
        if (request.is_discarded() || !request.contains("pairs")) {
            std::cout << R"({"error":"malformed request"})" << std::endl;
            continue;
        }
        auto scores = nlohmann::json::array();
        for (const auto& pair : request["pairs"]) {
            auto query = words(pair["query"].get<std::string>());
            auto passage = words(pair["passage"].get<std::string>());
            double hits = 0;
            for (const auto& w : query) {
                hits += passage.contains(w) ? 1 : 0;
            }
            double score = query.empty() ? 0.0 : hits / static_cast<double>(query.size());
            scores.push_back({{"id", pair["id"]}, {"score", score}});
        }
        if (mode == "extra") {
            scores.push_back({{"id", "extra"}, {"score", 0.5}});
        }
        std::cout << nlohmann::json{{"scores", scores}}.dump() << std::endl;
    }
    return 0;
}
