#include "semflow/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "semflow/errors.hpp"
#include "semflow/rng.hpp"
#include "semflow/task_type.hpp"

namespace semflow {

namespace {

// In-block Gram-Schmidt: raw normal draw per token, orthogonalized against
// the group's previous vectors, normalized. Redraws on (near-)collinearity.
Vec draw_group_vector(std::uint64_t seed, const std::string& token, int block_size,
                      const std::vector<Vec>& previous) {
    for (int attempt = 0;; ++attempt) {
        Rng rng(mix_seed(seed, "vocab:" + token + (attempt ? ":" + std::to_string(attempt) : "")));
        Vec v = rng.normal_vec(block_size);
        for (const Vec& p : previous) {
            double c = dot(v, p);
            axpy(v, -c, p);
        }
        double n = norm(v);
        if (n > 1e-9) return scale(v, 1.0 / n);
        if (attempt > 16) throw VocabularyError("degenerate axis group draw for token: " + token);
    }
}

}  // namespace

Vocabulary Vocabulary::build(const VocabularySpec& spec) {
    if (spec.dimension <= 0) throw VocabularyError("dimension must be positive");

    Vocabulary vocab;
    vocab.spec_ = spec;
    std::sort(vocab.spec_.axes.begin(), vocab.spec_.axes.end(),
              [](const AxisGroup& a, const AxisGroup& b) { return a.name < b.name; });
    std::sort(vocab.spec_.extra_concepts.begin(), vocab.spec_.extra_concepts.end());

    int total = 0;
    std::set<std::string> seen_groups;
    std::set<std::string> seen_tokens;
    for (const AxisGroup& g : vocab.spec_.axes) {
        if (g.tokens.empty()) throw VocabularyError("empty axis group: " + g.name);
        if (!seen_groups.insert(g.name).second)
            throw VocabularyError("duplicate axis group: " + g.name);
        for (const std::string& t : g.tokens) {
            if (t.empty()) throw VocabularyError("empty token in group: " + g.name);
            if (is_stop_word(t))
                throw VocabularyError("token shadows a stop word: " + t);
            if (!seen_tokens.insert(t).second)
                throw VocabularyError("token in more than one group: " + t);
        }
        total += static_cast<int>(g.tokens.size());
    }
    if (static_cast<int>(vocab.spec_.axes.size()) > spec.dimension)
        throw VocabularyError("dimension smaller than the number of axis groups");
    if (total > spec.dimension)
        throw VocabularyError("axis groups need " + std::to_string(total) +
                              " dimensions, have " + std::to_string(spec.dimension));
    for (const std::string& t : vocab.spec_.extra_concepts) {
        if (is_stop_word(t)) throw VocabularyError("token shadows a stop word: " + t);
        if (!seen_tokens.insert(t).second)
            throw VocabularyError("duplicate concept token: " + t);
    }

    int offset = 0;
    for (std::size_t gi = 0; gi < vocab.spec_.axes.size(); ++gi) {
        const AxisGroup& g = vocab.spec_.axes[gi];
        int block = static_cast<int>(g.tokens.size());
        vocab.blocks_[g.name] = {offset, block};
        std::vector<Vec> basis;
        for (const std::string& token : g.tokens) {
            Vec local = draw_group_vector(vocab.spec_.seed, token, block, basis);
            basis.push_back(local);
            Vec full = zeros(static_cast<std::size_t>(spec.dimension));
            for (int i = 0; i < block; ++i) full[static_cast<std::size_t>(offset + i)] = local[static_cast<std::size_t>(i)];
            vocab.embeddings_[token] = std::move(full);
            vocab.group_index_[token] = static_cast<int>(gi);
        }
        offset += block;
    }
    for (const std::string& token : vocab.spec_.extra_concepts) {
        Rng rng(mix_seed(vocab.spec_.seed, "vocab:" + token));
        vocab.embeddings_[token] = normalized(rng.normal_vec(spec.dimension));
    }
    return vocab;
}

VocabularySpec Vocabulary::default_spec(std::uint64_t seed) {
    VocabularySpec spec;
    spec.dimension = 32;
    spec.seed = seed;
    spec.axes = {
        {"background", {"beach", "forest", "street"}},
        {"color", {"blue", "brown", "green", "red"}},
        {"gender", {"man", "woman"}},
        {"material", {"glass", "metal", "wood"}},
        {"objects", {"bird", "car", "cat", "dog", "grass", "hat"}},
        {"pose", {"running", "sitting", "standing"}},
        {"rank", {"common", "royal"}},
        {"style", {"cartoon", "realistic", "sketch"}},
        {"tone", {"cool", "vintage", "warm"}},
    };
    return spec;
}

bool Vocabulary::contains(const std::string& token) const {
    return embeddings_.count(token) != 0;
}

const Vec& Vocabulary::embedding(const std::string& token) const {
    auto it = embeddings_.find(token);
    if (it == embeddings_.end()) throw UnknownTokenError("token not in vocabulary: " + token);
    return it->second;
}

const AxisGroup* Vocabulary::group_of(const std::string& token) const {
    auto it = group_index_.find(token);
    if (it == group_index_.end()) return nullptr;
    return &spec_.axes[static_cast<std::size_t>(it->second)];
}

std::pair<int, int> Vocabulary::group_block(const std::string& group_name) const {
    auto it = blocks_.find(group_name);
    if (it == blocks_.end()) throw VocabularyError("unknown axis group: " + group_name);
    return it->second;
}

std::vector<std::string> Vocabulary::tokens() const {
    std::vector<std::string> out;
    out.reserve(embeddings_.size());
    for (const auto& [token, _] : embeddings_) out.push_back(token);
    return out;
}

const std::set<std::string>& stop_words() {
    static const std::set<std::string> kStop = {
        // articles, conjunctions, prepositions, separators
        "a", "an", "the", "of", "on", "in", "at", "to", "it", "is", "and",
        "with", "next", "under", "beside", "portrait", ".",
        // neutral slot fillers (see default_slot_token)
        "plain", "bare", "untitled", "still", "natural", "blank", "neutral", "usual",
    };
    return kStop;
}

bool is_stop_word(const std::string& token) { return stop_words().count(token) != 0; }

Vec embed_prompt(const Vocabulary& vocab, const std::vector<std::string>& tokens) {
    std::vector<std::string> content;
    for (const std::string& t : tokens) {
        if (is_stop_word(t)) continue;
        if (!vocab.contains(t)) throw UnknownTokenError("token not in vocabulary: " + t);
        content.push_back(t);
    }
    if (content.empty()) return zeros(static_cast<std::size_t>(vocab.dimension()));
    // Sorted accumulation keeps the mean permutation-invariant bitwise.
    std::sort(content.begin(), content.end());
    Vec sum = zeros(static_cast<std::size_t>(vocab.dimension()));
    for (const std::string& t : content) axpy(sum, 1.0, vocab.embedding(t));
    Vec mean = scale(sum, 1.0 / static_cast<double>(content.size()));
    return normalized(mean);
}

Vec semantic_offset(const Vocabulary& vocab, const std::string& from, const std::string& to) {
    return sub(vocab.embedding(to), vocab.embedding(from));
}

double similarity_score(const Vec& z, const Vec& p) {
    if (is_zero(p)) throw DomainError("similarity_score: null prompt embedding");
    if (is_zero(z)) throw DomainError("similarity_score: zero-norm latent");
    return 5.0 * (cosine(z, p) + 1.0);
}

}  // namespace semflow
