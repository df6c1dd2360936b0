#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semflow/vec.hpp"

namespace semflow {

struct AxisGroup {
    std::string name;
    std::vector<std::string> tokens;
};

// Construction recipe for a vocabulary. Axis groups are assigned disjoint
// coordinate blocks in sorted-by-name order, so (dimension, seed, axes)
// reproduces the embeddings bit for bit.
struct VocabularySpec {
    int dimension = 32;
    std::uint64_t seed = 0;
    std::vector<AxisGroup> axes;
    std::vector<std::string> extra_concepts;  // free concepts outside any group
};

class Vocabulary {
public:
    static Vocabulary build(const VocabularySpec& spec);

    // The stock world used by the CLI default and the test fixtures.
    static VocabularySpec default_spec(std::uint64_t seed);

    int dimension() const { return spec_.dimension; }
    std::uint64_t seed() const { return spec_.seed; }
    const VocabularySpec& spec() const { return spec_; }

    bool contains(const std::string& token) const;
    const Vec& embedding(const std::string& token) const;  // throws UnknownTokenError

    // Group containing the token, or nullptr for free concepts.
    const AxisGroup* group_of(const std::string& token) const;

    // Coordinate block (offset, size) reserved for a group.
    std::pair<int, int> group_block(const std::string& group_name) const;

    std::vector<std::string> tokens() const;  // sorted

private:
    VocabularySpec spec_;
    std::map<std::string, Vec> embeddings_;
    std::map<std::string, int> group_index_;         // token -> index into spec_.axes
    std::map<std::string, std::pair<int, int>> blocks_;  // group name -> (offset, size)
};

// Tokens skipped when embedding captions: articles, relation words,
// separators, and the neutral slot fillers.
const std::set<std::string>& stop_words();
bool is_stop_word(const std::string& token);

// Renormalized mean of the content-token embeddings, summed in sorted token
// order so the result is permutation-invariant bitwise. All content tokens
// are embedded once per occurrence. An all-stop-word or empty prompt yields
// the zero vector (the null prompt).
Vec embed_prompt(const Vocabulary& vocab, const std::vector<std::string>& tokens);

// embedding(to) - embedding(from): the relocation vector between concepts.
Vec semantic_offset(const Vocabulary& vocab, const std::string& from, const std::string& to);

// 5 * (cos(z, p) + 1), mapping cosine [-1, 1] onto [0, 10]. Throws DomainError
// for a zero-norm z or p (the null prompt carries no similarity signal).
double similarity_score(const Vec& z, const Vec& p);

}  // namespace semflow
