#include "semflow/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "semflow/errors.hpp"

namespace semflow {

namespace {

json vec_to_json(const Vec& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw IoError("expected a number array");
    Vec v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(x.get<double>());
    return v;
}

}  // namespace

json vocabulary_to_json(const Vocabulary& vocab) {
    json j;
    j["dimension"] = vocab.dimension();
    j["seed"] = vocab.seed();
    json axes = json::object();
    for (const auto& g : vocab.spec().axes) axes[g.name] = g.tokens;
    j["axes"] = axes;
    if (!vocab.spec().extra_concepts.empty()) j["extra_concepts"] = vocab.spec().extra_concepts;
    json emb = json::object();
    for (const auto& tok : vocab.tokens()) emb[tok] = vec_to_json(vocab.embedding(tok));
    j["embeddings"] = emb;
    return j;
}

Vocabulary vocabulary_from_json(const json& j) {
    VocabularySpec spec;
    try {
        spec.dimension = j.at("dimension").get<int>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [name, tokens] : j.at("axes").items()) {
            AxisGroup g;
            g.name = name;
            for (const auto& t : tokens) g.tokens.push_back(t.get<std::string>());
            spec.axes.push_back(std::move(g));
        }
        if (j.contains("extra_concepts"))
            for (const auto& t : j.at("extra_concepts"))
                spec.extra_concepts.push_back(t.get<std::string>());
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed vocabulary json: ") + e.what());
    }
    Vocabulary vocab = Vocabulary::build(spec);
    if (!j.contains("embeddings"))
        throw VocabularyError("vocabulary json is missing the embeddings block");
    const json& emb = j.at("embeddings");
    auto tokens = vocab.tokens();
    if (emb.size() != tokens.size())
        throw VocabularyError("stored embeddings do not cover the vocabulary");
    for (const auto& tok : tokens) {
        if (!emb.contains(tok))
            throw VocabularyError("stored embeddings are missing token '" + tok + "'");
        Vec stored = vec_from_json(emb.at(tok));
        if (stored != vocab.embedding(tok))
            throw VocabularyError("stored embedding for '" + tok +
                                  "' does not match its seeded reconstruction");
    }
    return vocab;
}

json scene_graph_to_json(const SceneGraph& g) {
    json j;
    j["nodes"] = json::array();
    for (const auto& n : g.nodes) {
        json node;
        node["id"] = n.id;
        node["name"] = n.name;
        node["attributes"] = json::object();
        for (const auto& [slot, token] : n.attributes) node["attributes"][slot] = token;
        j["nodes"].push_back(node);
    }
    j["edges"] = json::array();
    for (const auto& e : g.edges) j["edges"].push_back(json::array({e.subject, e.relation, e.object}));
    return j;
}

SceneGraph scene_graph_from_json(const json& j) {
    SceneGraph g;
    try {
        for (const auto& node : j.at("nodes")) {
            ObjectNode n;
            n.id = node.at("id").get<int>();
            n.name = node.at("name").get<std::string>();
            if (node.contains("attributes"))
                for (const auto& [slot, token] : node.at("attributes").items())
                    n.attributes[slot] = token.get<std::string>();
            g.nodes.push_back(std::move(n));
        }
        if (j.contains("edges"))
            for (const auto& e : j.at("edges")) {
                if (!e.is_array() || e.size() != 3)
                    throw IoError("edge must be [subject, relation, object]");
                g.edges.push_back(Edge{e.at(0).get<int>(), e.at(1).get<std::string>(),
                                       e.at(2).get<int>()});
            }
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed scene graph json: ") + e.what());
    }
    g.validate();
    return g;
}

json patch_op_to_json(const PatchOp& op) {
    json j;
    j["op"] = to_string(op.kind);
    switch (op.kind) {
        case PatchOpKind::add_node: {
            json node;
            node["id"] = op.node.id;
            node["name"] = op.node.name;
            node["attributes"] = json::object();
            for (const auto& [slot, token] : op.node.attributes) node["attributes"][slot] = token;
            j["node"] = node;
            break;
        }
        case PatchOpKind::remove_node: j["id"] = op.id; break;
        case PatchOpKind::relabel:
            j["id"] = op.id;
            j["name"] = op.name;
            break;
        case PatchOpKind::set_attribute:
            j["id"] = op.id;
            j["slot"] = op.slot;
            j["token"] = op.token;
            break;
        case PatchOpKind::clear_attribute:
            j["id"] = op.id;
            j["slot"] = op.slot;
            break;
        case PatchOpKind::set_relation:
        case PatchOpKind::remove_relation:
            j["edge"] = json::array({op.edge.subject, op.edge.relation, op.edge.object});
            break;
    }
    return j;
}

PatchOp patch_op_from_json(const json& j) {
    try {
        std::string kind = j.at("op").get<std::string>();
        if (kind == "add_node") {
            ObjectNode n;
            const json& node = j.at("node");
            n.id = node.at("id").get<int>();
            n.name = node.at("name").get<std::string>();
            if (node.contains("attributes"))
                for (const auto& [slot, token] : node.at("attributes").items())
                    n.attributes[slot] = token.get<std::string>();
            return PatchOp::add_node(std::move(n));
        }
        if (kind == "remove_node") return PatchOp::remove_node(j.at("id").get<int>());
        if (kind == "relabel")
            return PatchOp::relabel(j.at("id").get<int>(), j.at("name").get<std::string>());
        if (kind == "set_attribute")
            return PatchOp::set_attribute(j.at("id").get<int>(), j.at("slot").get<std::string>(),
                                          j.at("token").get<std::string>());
        if (kind == "clear_attribute")
            return PatchOp::clear_attribute(j.at("id").get<int>(), j.at("slot").get<std::string>());
        if (kind == "set_relation" || kind == "remove_relation") {
            const json& e = j.at("edge");
            Edge edge{e.at(0).get<int>(), e.at(1).get<std::string>(), e.at(2).get<int>()};
            return kind == "set_relation" ? PatchOp::set_relation(edge)
                                          : PatchOp::remove_relation(edge);
        }
        throw IoError("unknown patch op '" + kind + "'");
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed patch op json: ") + e.what());
    }
}

json patch_to_json(const GraphPatch& patch) {
    json arr = json::array();
    for (const auto& op : patch) arr.push_back(patch_op_to_json(op));
    return arr;
}

GraphPatch patch_from_json(const json& j) {
    if (!j.is_array()) throw IoError("patch json must be an array");
    GraphPatch patch;
    for (const auto& op : j) patch.push_back(patch_op_from_json(op));
    return patch;
}

json edit_plan_to_json(const EditPlan& plan) {
    json j;
    j["task"] = to_string(plan.task);
    j["instruction"] = plan.instruction;
    j["graph_src"] = scene_graph_to_json(plan.graph_src);
    j["graph_tar"] = scene_graph_to_json(plan.graph_tar);
    j["patch"] = patch_to_json(plan.patch);
    j["caption_src"] = plan.caption_src;
    j["caption_tar"] = plan.caption_tar;
    j["replacements"] = json::array();
    for (const auto& r : plan.replacements) {
        json rep;
        rep["pos"] = r.pos;
        rep["before"] = r.before;
        rep["after"] = r.after;
        j["replacements"].push_back(rep);
    }
    return j;
}

json trajectory_to_json(const Trajectory& traj, const DseConfig& config) {
    json j;
    j["config"] = {
        {"steps", config.steps},
        {"schedule", {{"kind", to_string(config.schedule.kind)},
                      {"gains", vec_to_json(config.schedule.gains)}}},
        {"guidance", {{"scale_src", config.guidance.scale_src},
                      {"scale_tar", config.guidance.scale_tar}}},
        {"seed", config.seed},
    };
    j["halt_reason"] = traj.halt_reason;
    j["score_ref"] = vec_to_json(traj.score_ref);
    j["steps"] = json::array();
    for (const auto& s : traj.steps) {
        json rec;
        rec["k"] = s.k;
        rec["t"] = s.t;
        rec["z_src_t"] = vec_to_json(s.z_src_t);
        rec["z_tar_t"] = vec_to_json(s.z_tar_t);
        rec["z_edit"] = vec_to_json(s.z_edit);
        rec["delta_v"] = vec_to_json(s.delta_v);
        rec["score"] = s.score;
        j["steps"].push_back(rec);
    }
    return j;
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "k,t,score,delta_v_norm,cos_to_source,cos_to_target\n";
    if (traj.steps.empty()) return out;
    const Vec& z0 = traj.steps.front().z_edit;
    for (const auto& s : traj.steps) {
        out += std::to_string(s.k);
        out += ',';
        out += format_double(s.t);
        out += ',';
        out += format_double(s.score);
        out += ',';
        out += format_double(norm(s.delta_v));
        out += ',';
        out += format_double(cosine(s.z_edit, z0));
        out += ',';
        out += format_double(cosine(s.z_edit, traj.score_ref));
        out += '\n';
    }
    return out;
}

json edit_result_to_json(const EditResult& result) {
    json j;
    j["converged"] = result.converged;
    j["rounds_used"] = result.rounds_used;
    j["final_score"] = result.final_score;
    j["final_latent"] = vec_to_json(result.final_latent);
    j["final_graph"] = scene_graph_to_json(result.final_graph);
    j["rounds"] = json::array();
    for (const auto& r : result.rounds) {
        json round;
        round["round"] = r.round;
        round["plan"] = edit_plan_to_json(r.plan);
        round["best_score"] = r.best_score;
        round["best_step"] = r.best_step;
        round["stopped_early"] = r.stopped_early;
        round["decoded_best"] = scene_graph_to_json(r.decoded_best);
        if (!r.corrective.empty()) round["corrective"] = r.corrective;
        round["trajectory"] = "round-" + std::to_string(r.round) + "/trajectory.json";
        j["rounds"].push_back(round);
    }
    return j;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw DomainError("cannot format double");
    return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                          "': " + ec.message());
}

void save_json(const std::filesystem::path& path, const json& j) {
    atomic_write_file(path, j.dump(2) + "\n");
}

json load_json(const std::filesystem::path& path) {
    std::string text = read_text_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw IoError("invalid json in '" + path.string() + "'");
    return j;
}

}  // namespace semflow
