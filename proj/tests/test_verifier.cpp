#include <doctest.h>

#include <cmath>

#include "semflow/errors.hpp"
#include "semflow/instruction.hpp"
#include "semflow/rng.hpp"
#include "semflow/verifier.hpp"

using namespace semflow;

namespace {

VerifierConfig base_config() {
    VerifierConfig c;
    c.threshold_sigma = 9.0;
    c.patience_window = 8;
    return c;
}

// Feeds scores one by one and returns the step at which should_stop first
// fires, or -1 if it never does.
int stop_step(const std::vector<double>& scores, const VerifierConfig& cfg) {
    VerifierState st;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        st.observe(scores[i], {}, cfg);
        if (should_stop(st, cfg)) return static_cast<int>(i);
    }
    return -1;
}

ObjectNode node(int id, const std::string& name,
                std::map<std::string, std::string> attrs = {}) {
    ObjectNode n;
    n.id = id;
    n.name = name;
    n.attributes = std::move(attrs);
    return n;
}

}  // namespace

TEST_CASE("config validation") {
    VerifierConfig c = base_config();
    CHECK_NOTHROW(c.validate());
    c.threshold_sigma = 10.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.patience_window = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.min_improvement = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.max_rounds = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("plateau after a threshold-clearing score stops after the window") {
    // 8.0, 9.2, then 9.2 repeated: the significant best lands at step 1, the
    // plateau adds no significant improvement, so eight observations later
    // (step 9) the run stops.
    std::vector<double> scores = {8.0, 9.2, 9.2, 9.2, 9.2, 9.2, 9.2, 9.2, 9.2, 9.2, 9.2};
    CHECK(stop_step(scores, base_config()) == 9);
}

TEST_CASE("scores below the threshold never stop") {
    std::vector<double> scores(40, 8.9);
    scores[3] = 8.99;
    CHECK(stop_step(scores, base_config()) == -1);
}

TEST_CASE("early spike still waits out the patience window") {
    // 9.5 at step 0 clears the threshold; the next seven flat scores are not
    // enough patience, the eighth (step 8) is.
    std::vector<double> scores = {9.5, 7.0, 7.0, 7.0, 7.0, 7.0, 7.0, 7.0, 7.0};
    CHECK(stop_step(scores, base_config()) == 8);
    std::vector<double> shorter = {9.5, 7.0, 7.0, 7.0, 7.0, 7.0, 7.0, 7.0};
    CHECK(stop_step(shorter, base_config()) == -1);
}

TEST_CASE("hair-width maxima do not reset the patience") {
    VerifierConfig cfg = base_config();
    cfg.min_improvement = 1e-3;
    // A new raw maximum within min_improvement keeps sig_best_step in place.
    std::vector<double> scores = {9.2, 9.2004, 9.2006, 9.2007, 9.2008, 9.2008,
                                  9.2008, 9.2008, 9.2008};
    VerifierState st = replay_scores(scores, cfg);
    CHECK(st.best_score == doctest::Approx(9.2008));
    CHECK(st.sig_best_step == 0);
    CHECK(stop_step(scores, cfg) == 8);

    // A genuine improvement resets it.
    std::vector<double> jump = {9.2, 9.21, 9.21, 9.21};
    VerifierState st2 = replay_scores(jump, cfg);
    CHECK(st2.sig_best_step == 1);
}

TEST_CASE("best pick keeps the first or last occurrence of the maximum") {
    std::vector<double> scores = {8.0, 9.0, 9.0, 8.5};
    VerifierConfig cfg = base_config();
    cfg.best_pick = VerifierConfig::BestPick::first;
    CHECK(replay_scores(scores, cfg).best_step == 1);
    cfg.best_pick = VerifierConfig::BestPick::last;
    CHECK(replay_scores(scores, cfg).best_step == 2);
}

TEST_CASE("observe keeps the latent of the best step") {
    VerifierConfig cfg = base_config();
    VerifierState st;
    st.observe(8.0, {1.0, 0.0}, cfg);
    st.observe(9.5, {0.0, 1.0}, cfg);
    st.observe(9.0, {0.5, 0.5}, cfg);
    CHECK(st.best_score == 9.5);
    CHECK(st.best_step == 1);
    CHECK(st.best_latent == Vec{0.0, 1.0});
    CHECK(st.history.size() == 3);
}

TEST_CASE("replay matches incremental observation") {
    Rng rng(mix_seed(21, "verify"));
    VerifierConfig cfg = base_config();
    std::vector<double> scores;
    for (int i = 0; i < 60; ++i) scores.push_back(7.0 + 3.0 * rng.uniform());
    VerifierState inc;
    for (double s : scores) inc.observe(s, {}, cfg);
    VerifierState rep = replay_scores(scores, cfg);
    CHECK(inc.best_score == rep.best_score);
    CHECK(inc.best_step == rep.best_step);
    CHECK(inc.sig_best_step == rep.sig_best_step);
    CHECK(inc.history == rep.history);
}

TEST_CASE("best score at stop never decreases with the patience window") {
    Rng rng(mix_seed(77, "window-mono"));
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> scores;
        int n = 20 + static_cast<int>(rng.next_u64() % 30);
        for (int i = 0; i < n; ++i) scores.push_back(6.0 + 4.5 * rng.uniform());
        double prev_best = -1.0;
        for (int w = 1; w <= 10; ++w) {
            VerifierConfig cfg = base_config();
            cfg.patience_window = w;
            VerifierState st;
            double best_at_stop = -1.0;
            for (double s : scores) {
                st.observe(s, {}, cfg);
                if (should_stop(st, cfg)) {
                    best_at_stop = st.best_score;
                    break;
                }
            }
            if (best_at_stop < 0.0) best_at_stop = st.best_score;  // ran to the end
            CHECK(best_at_stop >= prev_best);
            prev_best = best_at_stop;
        }
    }
}

TEST_CASE("score_step matches the similarity scale") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(0));
    Vec a = v.embedding("dog");
    CHECK(score_step(a, a) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(score_step(a, v.embedding("cat")) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK_THROWS_AS(score_step(zeros(a.size()), a), DomainError);
}

TEST_CASE("feedback lists names and filled slots with residuals") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(0));
    SceneGraph g;
    g.nodes = {node(0, "man", {{"rank", "royal"}})};
    Vec z = embed_prompt(v, {"royal", "man"});
    FeedbackVector fb = compute_feedback(z, g, v);
    REQUIRE(fb.entries.size() == 2);
    CHECK(fb.entries[0].is_name);
    CHECK(fb.entries[0].target_token == "man");
    CHECK(fb.entries[0].observed_token == "man");
    CHECK(fb.entries[1].slot == "rank");
    CHECK(fb.entries[1].target_token == "royal");
    for (const auto& e : fb.entries) {
        CHECK(e.residual == doctest::Approx(1.0 - cosine(z, v.embedding(e.target_token)))
                                .epsilon(1e-12));
    }
    CHECK(fb.total() == doctest::Approx(fb.entries[0].residual + fb.entries[1].residual)
                            .epsilon(1e-12));
}

TEST_CASE("worst feedback entry drives the corrective instruction") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(0));
    SceneGraph g;
    g.nodes = {node(0, "woman", {{"rank", "royal"}})};
    // The latent still points at the source subject: the name entry is worst
    // and the corrective asks for the replacement.
    Vec z = embed_prompt(v, {"royal", "man"});
    FeedbackVector fb = compute_feedback(z, g, v);
    const FeedbackEntry& w = fb.worst();
    CHECK(w.is_name);
    CHECK(w.observed_token == "man");
    CHECK(w.target_token == "woman");
    std::string fix = corrective_instruction(fb, g);
    CHECK(fix == "replace the man with a woman");

    // A slot residual produces the change form.
    SceneGraph g2;
    g2.nodes = {node(0, "man", {{"rank", "royal"}})};
    Vec z2 = embed_prompt(v, {"common", "man"});
    FeedbackVector fb2 = compute_feedback(z2, g2, v);
    CHECK_FALSE(fb2.worst().is_name);
    CHECK(corrective_instruction(fb2, g2) == "change the rank of man to royal");
}

TEST_CASE("corrective instructions re-parse under every task grammar") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(0));
    SceneGraph g;
    g.nodes = {node(0, "woman", {{"rank", "royal"}})};
    Vec z = embed_prompt(v, {"common", "man"});
    FeedbackVector fb = compute_feedback(z, g, v);
    std::string fix = corrective_instruction(fb, g);
    SceneGraph current;
    current.nodes = {node(0, "man", {{"rank", "common"}})};
    for (TaskType task : {TaskType::ps_human, TaskType::color_alter, TaskType::subject_add,
                          TaskType::tone_transfer, TaskType::subject_remove}) {
        CHECK_NOTHROW(parse_instruction(fix, task, current, v));
    }
}

TEST_CASE("decode recovers tokens from clean embeddings") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(0));
    SceneGraph tmpl;
    tmpl.nodes = {node(0, "dog", {{"color", "brown"}})};
    Vec z = embed_prompt(v, {"blue", "cat"});
    SceneGraph decoded = decode_to_graph(z, v, tmpl);
    REQUIRE(decoded.nodes.size() == 1);
    CHECK(decoded.nodes[0].name == "cat");
    CHECK(decoded.nodes[0].attributes.at("color") == "blue");
    // Structure and ids come from the template.
    CHECK(decoded.nodes[0].id == 0);
}

TEST_CASE("decode leaves free concepts alone") {
    VocabularySpec spec = Vocabulary::default_spec(0);
    spec.extra_concepts.push_back("gizmo");
    Vocabulary v = Vocabulary::build(spec);
    SceneGraph tmpl;
    tmpl.nodes = {node(0, "gizmo", {{"color", "red"}})};
    Vec z = embed_prompt(v, {"green", "gizmo"});
    SceneGraph decoded = decode_to_graph(z, v, tmpl);
    CHECK(decoded.nodes[0].name == "gizmo");
    CHECK(decoded.nodes[0].attributes.at("color") == "green");
}

TEST_CASE("feedback requires a nonzero latent") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(0));
    SceneGraph g;
    g.nodes = {node(0, "dog")};
    CHECK_THROWS_AS(compute_feedback(zeros(v.dimension()), g, v), DomainError);
}
