#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace varigen::prompt {

enum class Relation { Synonym, Hypernym, Hyponym, PartWhole };

/// Deterministic word-relation source. Expansions of the same word are
/// deterministic and ordered.
class Lexicon {
public:
    virtual ~Lexicon() = default;
    virtual const std::string& source_id() const = 0;
    virtual bool contains(const std::string& word) const = 0;
    /// Related words of one relation type, unique, lowercase, alphabetical.
    virtual std::vector<std::string> related(const std::string& word, Relation rel) const = 0;
};

/// Frozen snapshot loaded from a line-oriented TSV
/// (headword<TAB>relation<TAB>related_word, UTF-8, sorted), so runs never
/// depend on a live lexical-database install.
class SnapshotLexicon final : public Lexicon {
public:
    static SnapshotLexicon from_file(const std::filesystem::path& path);
    static SnapshotLexicon from_text(const std::string& tsv, const std::string& source_id);
    /// Copy of the snapshot shipped with the repository, embedded at build time.
    static const SnapshotLexicon& builtin();

    const std::string& source_id() const override { return source_id_; }
    bool contains(const std::string& word) const override;
    std::vector<std::string> related(const std::string& word, Relation rel) const override;

private:
    std::string source_id_;
    std::map<std::string, std::map<Relation, std::vector<std::string>>> entries_;
};

}  // namespace varigen::prompt
