#include "varigen/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "varigen/errors.hpp"

namespace varigen::prompt {

namespace detail {
const char* builtin_lexicon_tsv();  // generated from assets/lexicon at build time
}

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

Relation parse_relation(const std::string& s, int lineno) {
    if (s == "synonym") return Relation::Synonym;
    if (s == "hypernym") return Relation::Hypernym;
    if (s == "hyponym") return Relation::Hyponym;
    if (s == "part_whole") return Relation::PartWhole;
    raise(ErrorCode::ConfigError,
          "lexicon snapshot line " + std::to_string(lineno) + ": unknown relation '" + s + "'");
}

}  // namespace

SnapshotLexicon SnapshotLexicon::from_text(const std::string& tsv, const std::string& source_id) {
    SnapshotLexicon lex;
    lex.source_id_ = source_id;
    std::istringstream in(tsv);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            raise(ErrorCode::ConfigError, "lexicon snapshot line " + std::to_string(lineno) +
                                              ": expected headword<TAB>relation<TAB>word");
        }
        const std::string head = lowercase(line.substr(0, t1));
        const Relation rel = parse_relation(line.substr(t1 + 1, t2 - t1 - 1), lineno);
        const std::string word = lowercase(line.substr(t2 + 1));
        if (head.empty() || word.empty()) {
            raise(ErrorCode::ConfigError,
                  "lexicon snapshot line " + std::to_string(lineno) + ": empty field");
        }
        auto& list = lex.entries_[head][rel];
        if (std::find(list.begin(), list.end(), word) == list.end()) list.push_back(word);
    }
    for (auto& [head, rels] : lex.entries_) {
        for (auto& [rel, words] : rels) std::sort(words.begin(), words.end());
    }
    return lex;
}

SnapshotLexicon SnapshotLexicon::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open lexicon snapshot: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str(), path.filename().string());
}

const SnapshotLexicon& SnapshotLexicon::builtin() {
    static const SnapshotLexicon lex =
        from_text(detail::builtin_lexicon_tsv(), "builtin-snapshot");
    return lex;
}

bool SnapshotLexicon::contains(const std::string& word) const {
    return entries_.count(lowercase(word)) != 0;
}

std::vector<std::string> SnapshotLexicon::related(const std::string& word, Relation rel) const {
    auto it = entries_.find(lowercase(word));
    if (it == entries_.end()) return {};
    auto rit = it->second.find(rel);
    if (rit == it->second.end()) return {};
    return rit->second;
}

}  // namespace varigen::prompt
