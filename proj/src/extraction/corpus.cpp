#include "dkg/extraction/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dkg/error.hpp"

namespace dkg::extraction {

using nlohmann::json;

std::vector<Document> parse_corpus(std::string_view jsonl) {
    std::vector<Document> docs;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= jsonl.size()) {
        std::size_t end = jsonl.find('\n', start);
        if (end == std::string_view::npos) end = jsonl.size();
        const std::string_view line = jsonl.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        auto fail = [&](const std::string& why) -> Error {
            return Error(ErrorCode::CorruptDocument, "corpus line " + std::to_string(line_no) + ": " + why);
        };
        try {
            const json j = json::parse(line.begin(), line.end());
            Document d;
            d.doc_id = j.at("doc_id").get<std::string>();
            const auto source = document_source_from_string(j.value("source", std::string("synthetic")));
            if (!source) throw fail("unknown source");
            d.source = *source;
            d.context_tag = j.value("context_tag", std::string(kDefaultContext));
            d.text = j.at("text").get<std::string>();
            if (d.doc_id.empty()) throw fail("empty doc_id");
            if (!seen.insert(d.doc_id).second) throw fail("duplicate doc_id " + d.doc_id);
            docs.push_back(std::move(d));
        } catch (const json::exception& e) {
            throw fail(e.what());
        }
    }
    return docs;
}

std::string to_jsonl(const std::vector<Document>& docs) {
    std::string out;
    for (const auto& d : docs) {
        json j{{"doc_id", d.doc_id},
               {"source", std::string(to_string(d.source))},
               {"context_tag", d.context_tag},
               {"text", d.text}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<Document> load_corpus_file(const std::filesystem::path& path) {
    return parse_corpus(read_file(path));
}

Lexicon load_lexicon_file(const std::filesystem::path& path) {
    return Lexicon::from_json(read_file(path));
}

}  // namespace dkg::extraction
