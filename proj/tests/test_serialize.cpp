#include <doctest.h>

#include <filesystem>
#include <string>

#include "semflow/errors.hpp"
#include "semflow/serialize.hpp"

using namespace semflow;
namespace fs = std::filesystem;

namespace {

ObjectNode node(int id, const std::string& name,
                std::map<std::string, std::string> attrs = {}) {
    ObjectNode n;
    n.id = id;
    n.name = name;
    n.attributes = std::move(attrs);
    return n;
}

SceneGraph sample_graph() {
    SceneGraph g;
    g.nodes = {node(0, "man", {{"rank", "royal"}}), node(1, "hat")};
    g.edges = {{1, "on", 0}};
    return g;
}

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "semflow-serialize-test";
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("vocabulary round-trips bit for bit") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(42));
    json j = vocabulary_to_json(v);
    Vocabulary back = vocabulary_from_json(j);
    CHECK(back.dimension() == v.dimension());
    CHECK(back.seed() == v.seed());
    CHECK(back.tokens() == v.tokens());
    for (const auto& tok : v.tokens()) CHECK(back.embedding(tok) == v.embedding(tok));
}

TEST_CASE("tampered embeddings are rejected on load") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(1));
    json j = vocabulary_to_json(v);
    j["embeddings"]["dog"][0] = j["embeddings"]["dog"][0].get<double>() + 1e-9;
    CHECK_THROWS_AS(vocabulary_from_json(j), VocabularyError);
    json missing = vocabulary_to_json(v);
    missing["embeddings"].erase("dog");
    CHECK_THROWS_AS(vocabulary_from_json(missing), VocabularyError);
}

TEST_CASE("scene graphs round-trip through json") {
    SceneGraph g = sample_graph();
    json j = scene_graph_to_json(g);
    CHECK(j["nodes"].size() == 2);
    CHECK(j["edges"][0] == json::array({1, "on", 0}));
    SceneGraph back = scene_graph_from_json(j);
    CHECK(back == g);
}

TEST_CASE("patches round-trip through json") {
    SceneGraph g = sample_graph();
    GraphPatch patch = {
        PatchOp::set_attribute(0, "rank", "common"),
        PatchOp::relabel(0, "woman"),
        PatchOp::remove_relation({1, "on", 0}),
        PatchOp::remove_node(1),
        PatchOp::add_node(node(2, "dog", {{"color", "brown"}})),
        PatchOp::set_relation({2, "beside", 0}),
    };
    json j = patch_to_json(patch);
    GraphPatch back = patch_from_json(j);
    REQUIRE(back.size() == patch.size());
    for (std::size_t i = 0; i < patch.size(); ++i) CHECK(back[i] == patch[i]);
    CHECK_THROWS_AS(patch_op_from_json(json{{"op", "explode"}}), IoError);
}

TEST_CASE("edit plans serialize their captions and replacements") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(0));
    SceneGraph g;
    g.nodes = {node(0, "dog", {{"color", "brown"}})};
    EditPlan plan = build_edit_plan(g, "make the dog blue", TaskType::color_alter, v);
    json j = edit_plan_to_json(plan);
    CHECK(j["task"] == "color_alter");
    CHECK(j["instruction"] == "make the dog blue");
    CHECK(j["caption_src"].size() == plan.caption_src.size());
    CHECK(j["replacements"].size() == 1);
    CHECK(j["replacements"][0]["before"] == "brown");
    CHECK(j["replacements"][0]["after"] == "blue");
}

TEST_CASE("trajectories serialize to json and csv") {
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(0));
    Vec z0 = v.embedding("dog");
    Vec ref = v.embedding("cat");
    DseConfig cfg;
    cfg.steps = 6;
    cfg.schedule = AlphaSchedule::decayed(6);
    cfg.seed = 3;
    Trajectory tr = run_dse(z0, PromptTarget::from_embedding(z0, 3.0, 0.25),
                            PromptTarget::from_embedding(ref, 3.0, 0.25), ref, cfg);
    json j = trajectory_to_json(tr, cfg);
    CHECK(j["halt_reason"] == "completed");
    CHECK(j["config"]["steps"] == 6);
    CHECK(j["config"]["schedule"]["kind"] == "decayed");
    CHECK(j["config"]["schedule"]["gains"].size() == 6);
    CHECK(j["steps"].size() == 7);
    CHECK(j["steps"][0]["k"] == 0);
    CHECK(j["steps"][0]["t"] == 1.0);

    std::string csv = trajectory_to_csv(tr);
    CHECK(csv.rfind("k,t,score,delta_v_norm,cos_to_source,cos_to_target", 0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 8);  // header + 7 records
}

TEST_CASE("format_double is round-trip exact and locale-free") {
    for (double x : {0.0, 1.0, -1.5, 0.1, 1e-17, 3.141592653589793, -2.2250738585072014e-308}) {
        std::string s = format_double(x);
        CHECK(std::stod(s) == x);
        CHECK(s.find(',') == std::string::npos);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("atomic writes create parents and replace content") {
    fs::path dir = temp_dir();
    fs::path file = dir / "nested" / "deeper" / "out.txt";
    fs::remove_all(dir / "nested");
    atomic_write_file(file, "first");
    CHECK(read_text_file(file) == "first");
    atomic_write_file(file, "second");
    CHECK(read_text_file(file) == "second");
    // No stray temp files left behind.
    int count = 0;
    for (const auto& entry : fs::directory_iterator(file.parent_path())) {
        (void)entry;
        ++count;
    }
    CHECK(count == 1);
    fs::remove_all(dir);
}

TEST_CASE("json files save and load through the atomic path") {
    fs::path dir = temp_dir();
    fs::path file = dir / "doc.json";
    json j = {{"alpha", 1}, {"beta", {1, 2, 3}}};
    save_json(file, j);
    std::string text = read_text_file(file);
    CHECK(text.back() == '\n');
    CHECK(load_json(file) == j);

    atomic_write_file(file, "{not json");
    CHECK_THROWS_AS(load_json(file), IoError);
    CHECK_THROWS_AS(read_text_file(dir / "absent.json"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("serialized graphs are stable across dumps") {
    SceneGraph g = sample_graph();
    CHECK(scene_graph_to_json(g).dump(2) == scene_graph_to_json(g).dump(2));
    Vocabulary v = Vocabulary::build(Vocabulary::default_spec(9));
    CHECK(vocabulary_to_json(v).dump() == vocabulary_to_json(v).dump());
}

TEST_CASE("malformed scene json is rejected") {
    CHECK_THROWS_AS(scene_graph_from_json(json{{"nodes", 5}}), IoError);
    json bad;
    bad["nodes"] = json::array({{{"id", 0}, {"name", "dog"}}});
    bad["edges"] = json::array({json::array({0, "on"})});  // wrong arity
    CHECK_THROWS_AS(scene_graph_from_json(bad), IoError);
}
