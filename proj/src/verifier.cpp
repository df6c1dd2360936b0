#include "semflow/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semflow/errors.hpp"

namespace semflow {

void VerifierConfig::validate() const {
    if (!(threshold_sigma >= 0.0 && threshold_sigma <= 10.0))
        throw ConfigError("sigma must lie in [0, 10]");
    if (patience_window < 1) throw ConfigError("patience window must be at least 1");
    if (!(min_improvement >= 0.0)) throw ConfigError("min improvement must be non-negative");
    if (max_rounds < 1) throw ConfigError("max rounds must be at least 1");
}

void VerifierState::observe(double score, const Vec& latent, const VerifierConfig& config) {
    int idx = static_cast<int>(history.size());
    history.push_back(score);
    bool take = best_step < 0 ||
                (config.best_pick == VerifierConfig::BestPick::first ? score > best_score
                                                                     : score >= best_score);
    if (take) {
        best_score = score;
        best_step = idx;
        best_latent = latent;
    }
    // Patience only resets on material improvements; flat noise near the best
    // keeps the clock running.
    if (sig_best_step < 0 || score >= sig_best_score + config.min_improvement) {
        sig_best_score = score;
        sig_best_step = idx;
    }
}

void VerifierState::observe(const StepRecord& record, const VerifierConfig& config) {
    observe(record.score, record.z_edit, config);
}

bool should_stop(const VerifierState& state, const VerifierConfig& config) {
    config.validate();
    if (state.history.empty()) return false;
    int last = static_cast<int>(state.history.size()) - 1;
    return state.best_score >= config.threshold_sigma &&
           (last - state.sig_best_step) >= config.patience_window;
}

VerifierState replay_scores(const std::vector<double>& scores, const VerifierConfig& config) {
    VerifierState state;
    for (double s : scores) state.observe(s, Vec{}, config);
    return state;
}

double score_step(const Vec& z_edit, const Vec& target_embedding) {
    return similarity_score(z_edit, target_embedding);
}

namespace {

// Highest-cosine token within a group; exact dot ties break to the
// lexicographically smaller token. Embeddings are unit norm, so comparing
// dots is comparing cosines.
std::string nearest_in_group(const Vec& z, const AxisGroup& group, const Vocabulary& vocab) {
    std::string best;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (const auto& tok : group.tokens) {
        double d = dot(z, vocab.embedding(tok));
        if (d > best_dot || (d == best_dot && (best.empty() || tok < best))) {
            best_dot = d;
            best = tok;
        }
    }
    if (best.empty()) throw VocabularyError("group '" + group.name + "' has no tokens");
    return best;
}

std::string observed_token_for(const Vec& z, const std::string& target,
                               const Vocabulary& vocab) {
    const AxisGroup* group = vocab.group_of(target);
    if (!group) return target;  // free concept: nothing to decode against
    return nearest_in_group(z, *group, vocab);
}

}  // namespace

const FeedbackEntry& FeedbackVector::worst() const {
    if (entries.empty()) throw DomainError("feedback vector is empty");
    const FeedbackEntry* w = &entries.front();
    for (const auto& e : entries)
        if (std::abs(e.residual) > std::abs(w->residual)) w = &e;
    return *w;
}

double FeedbackVector::total() const {
    double t = 0.0;
    for (const auto& e : entries) t += std::abs(e.residual);
    return t;
}

FeedbackVector compute_feedback(const Vec& z, const SceneGraph& graph_tar,
                                const Vocabulary& vocab) {
    graph_tar.validate();
    if (graph_tar.nodes.empty()) throw DomainError("feedback needs a non-empty target graph");
    if (is_zero(z)) throw DomainError("feedback needs a non-zero latent");
    FeedbackVector fv;
    for (const auto& node : graph_tar.nodes) {
        FeedbackEntry name_entry;
        name_entry.node_id = node.id;
        name_entry.is_name = true;
        name_entry.target_token = node.name;
        name_entry.observed_token = observed_token_for(z, node.name, vocab);
        name_entry.residual = 1.0 - cosine(z, vocab.embedding(node.name));
        fv.entries.push_back(std::move(name_entry));
        for (const auto& slot : canonical_slot_order()) {
            auto it = node.attributes.find(slot);
            if (it == node.attributes.end()) continue;
            FeedbackEntry e;
            e.node_id = node.id;
            e.is_name = false;
            e.slot = slot;
            e.target_token = it->second;
            e.observed_token = observed_token_for(z, it->second, vocab);
            e.residual = 1.0 - cosine(z, vocab.embedding(it->second));
            fv.entries.push_back(std::move(e));
        }
    }
    return fv;
}

std::string corrective_instruction(const FeedbackVector& feedback, const SceneGraph& graph_tar) {
    const FeedbackEntry& w = feedback.worst();
    const ObjectNode* node = graph_tar.find(w.node_id);
    if (!node) throw DomainError("feedback references a node missing from the target graph");
    if (w.is_name) return "replace the " + w.observed_token + " with a " + w.target_token;
    return "change the " + w.slot + " of " + node->name + " to " + w.target_token;
}

SceneGraph decode_to_graph(const Vec& z, const Vocabulary& vocab, const SceneGraph& skeleton) {
    skeleton.validate();
    if (is_zero(z)) throw DomainError("cannot decode the zero latent");
    SceneGraph out = skeleton;
    for (auto& node : out.nodes) {
        node.name = observed_token_for(z, node.name, vocab);
        for (auto& [slot, token] : node.attributes) token = observed_token_for(z, token, vocab);
    }
    return out;
}

}  // namespace semflow
