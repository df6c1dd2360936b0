#include "semflow/scene_graph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "semflow/errors.hpp"

namespace semflow {

const ObjectNode* SceneGraph::find(int id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

ObjectNode* SceneGraph::find(int id) {
    for (auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const ObjectNode* SceneGraph::find_by_name(const std::string& name) const {
    for (const auto& n : nodes)
        if (n.name == name) return &n;
    return nullptr;
}

int SceneGraph::next_id() const {
    int m = 0;
    for (const auto& n : nodes) m = std::max(m, n.id + 1);
    return m;
}

void SceneGraph::validate() const {
    std::set<int> ids;
    for (const auto& n : nodes) {
        if (n.name.empty())
            throw DomainError("scene graph: node " + std::to_string(n.id) + " has an empty name");
        if (!ids.insert(n.id).second)
            throw DomainError("scene graph: duplicate node id " + std::to_string(n.id));
        for (const auto& [slot, token] : n.attributes)
            if (slot.empty() || token.empty())
                throw DomainError("scene graph: empty attribute entry on node " +
                                  std::to_string(n.id));
    }
    std::set<Edge> seen;
    for (const auto& e : edges) {
        if (!ids.count(e.subject) || !ids.count(e.object))
            throw DomainError("scene graph: edge references a missing node");
        if (e.subject == e.object) throw DomainError("scene graph: self-loop edge");
        if (!seen.insert(e).second) throw DomainError("scene graph: duplicate edge");
    }
}

std::string to_string(PatchOpKind k) {
    switch (k) {
        case PatchOpKind::add_node: return "add_node";
        case PatchOpKind::remove_node: return "remove_node";
        case PatchOpKind::relabel: return "relabel";
        case PatchOpKind::set_attribute: return "set_attribute";
        case PatchOpKind::clear_attribute: return "clear_attribute";
        case PatchOpKind::set_relation: return "set_relation";
        case PatchOpKind::remove_relation: return "remove_relation";
    }
    throw ConfigError("invalid patch op kind");
}

PatchOp PatchOp::add_node(ObjectNode n) {
    PatchOp op;
    op.kind = PatchOpKind::add_node;
    op.node = std::move(n);
    return op;
}

PatchOp PatchOp::remove_node(int id) {
    PatchOp op;
    op.kind = PatchOpKind::remove_node;
    op.id = id;
    return op;
}

PatchOp PatchOp::relabel(int id, std::string name) {
    PatchOp op;
    op.kind = PatchOpKind::relabel;
    op.id = id;
    op.name = std::move(name);
    return op;
}

PatchOp PatchOp::set_attribute(int id, std::string slot, std::string token) {
    PatchOp op;
    op.kind = PatchOpKind::set_attribute;
    op.id = id;
    op.slot = std::move(slot);
    op.token = std::move(token);
    return op;
}

PatchOp PatchOp::clear_attribute(int id, std::string slot) {
    PatchOp op;
    op.kind = PatchOpKind::clear_attribute;
    op.id = id;
    op.slot = std::move(slot);
    return op;
}

PatchOp PatchOp::set_relation(Edge e) {
    PatchOp op;
    op.kind = PatchOpKind::set_relation;
    op.edge = e;
    return op;
}

PatchOp PatchOp::remove_relation(Edge e) {
    PatchOp op;
    op.kind = PatchOpKind::remove_relation;
    op.edge = e;
    return op;
}

SceneGraph apply_patch(const SceneGraph& g, const GraphPatch& patch) {
    SceneGraph out = g;
    for (std::size_t i = 0; i < patch.size(); ++i) {
        const PatchOp& op = patch[i];
        int idx = static_cast<int>(i);
        switch (op.kind) {
            case PatchOpKind::add_node: {
                if (op.node.name.empty()) throw PatchError(idx, "add_node with an empty name");
                if (out.find(op.node.id))
                    throw PatchError(idx, "add_node id " + std::to_string(op.node.id) + " already exists");
                out.nodes.push_back(op.node);
                break;
            }
            case PatchOpKind::remove_node: {
                if (!out.find(op.id))
                    throw PatchError(idx, "remove_node: no node " + std::to_string(op.id));
                for (const auto& e : out.edges)
                    if (e.subject == op.id || e.object == op.id)
                        throw PatchError(idx, "remove_node: node " + std::to_string(op.id) +
                                                  " still has incident edges");
                std::erase_if(out.nodes, [&](const ObjectNode& n) { return n.id == op.id; });
                break;
            }
            case PatchOpKind::relabel: {
                ObjectNode* n = out.find(op.id);
                if (!n) throw PatchError(idx, "relabel: no node " + std::to_string(op.id));
                if (op.name.empty()) throw PatchError(idx, "relabel to an empty name");
                n->name = op.name;
                break;
            }
            case PatchOpKind::set_attribute: {
                ObjectNode* n = out.find(op.id);
                if (!n) throw PatchError(idx, "set_attribute: no node " + std::to_string(op.id));
                if (op.slot.empty() || op.token.empty())
                    throw PatchError(idx, "set_attribute with empty slot or token");
                n->attributes[op.slot] = op.token;
                break;
            }
            case PatchOpKind::clear_attribute: {
                ObjectNode* n = out.find(op.id);
                if (!n) throw PatchError(idx, "clear_attribute: no node " + std::to_string(op.id));
                if (!n->attributes.erase(op.slot))
                    throw PatchError(idx, "clear_attribute: slot '" + op.slot + "' not set");
                break;
            }
            case PatchOpKind::set_relation: {
                if (!out.find(op.edge.subject) || !out.find(op.edge.object))
                    throw PatchError(idx, "set_relation references a missing node");
                if (op.edge.subject == op.edge.object)
                    throw PatchError(idx, "set_relation would create a self-loop");
                if (std::find(out.edges.begin(), out.edges.end(), op.edge) != out.edges.end())
                    throw PatchError(idx, "set_relation: edge already present");
                out.edges.push_back(op.edge);
                break;
            }
            case PatchOpKind::remove_relation: {
                auto it = std::find(out.edges.begin(), out.edges.end(), op.edge);
                if (it == out.edges.end()) throw PatchError(idx, "remove_relation: edge not present");
                out.edges.erase(it);
                break;
            }
        }
    }
    out.validate();
    return out;
}

const std::vector<std::string>& canonical_slot_order() {
    static const std::vector<std::string> kOrder = {
        "color", "material", "rank", "pose", "style", "background", "tone", "misc",
    };
    return kOrder;
}

bool is_known_slot(const std::string& slot) {
    const auto& order = canonical_slot_order();
    return std::find(order.begin(), order.end(), slot) != order.end();
}

namespace {

// Canonical position for slot emission: listed slots first, then the rest
// alphabetically.
std::vector<std::string> ordered_slots(const std::set<std::string>& slots) {
    std::vector<std::string> out;
    for (const auto& s : canonical_slot_order())
        if (slots.count(s)) out.push_back(s);
    for (const auto& s : slots)
        if (!is_known_slot(s)) out.push_back(s);
    return out;
}

int attr_op_count(const ObjectNode& a, const ObjectNode& b) {
    int ops = 0;
    for (const auto& [slot, v] : b.attributes) {
        auto it = a.attributes.find(slot);
        if (it == a.attributes.end() || it->second != v) ++ops;  // set_attribute
    }
    for (const auto& [slot, _] : a.attributes)
        if (!b.attributes.count(slot)) ++ops;  // clear_attribute
    return ops;
}

int attr_overlap(const ObjectNode& a, const ObjectNode& b) {
    int n = 0;
    for (const auto& [slot, v] : a.attributes) {
        auto it = b.attributes.find(slot);
        if (it != b.attributes.end() && it->second == v) ++n;
    }
    return n;
}

int pair_cost(const ObjectNode& s, const ObjectNode& t) {
    return (s.name != t.name ? 1 : 0) + attr_op_count(s, t);
}

// tar-node index -> src-node index, -1 for unmatched.
using Matching = std::vector<int>;

int matching_cost(const SceneGraph& src, const SceneGraph& tar, const Matching& m) {
    int cost = 0;
    std::vector<bool> src_used(src.nodes.size(), false);
    std::map<int, int> src_to_tar;  // node ids
    for (std::size_t ti = 0; ti < m.size(); ++ti) {
        if (m[ti] < 0) {
            cost += 1;  // add_node
            continue;
        }
        src_used[static_cast<std::size_t>(m[ti])] = true;
        const auto& s = src.nodes[static_cast<std::size_t>(m[ti])];
        const auto& t = tar.nodes[ti];
        src_to_tar[s.id] = t.id;
        cost += pair_cost(s, t);
    }
    for (std::size_t si = 0; si < src.nodes.size(); ++si)
        if (!src_used[si]) cost += 1;  // remove_node
    int surviving = 0;
    for (const auto& e : src.edges) {
        auto a = src_to_tar.find(e.subject);
        auto b = src_to_tar.find(e.object);
        if (a == src_to_tar.end() || b == src_to_tar.end()) continue;
        Edge mapped{a->second, e.relation, b->second};
        if (std::find(tar.edges.begin(), tar.edges.end(), mapped) != tar.edges.end()) ++surviving;
    }
    cost += static_cast<int>(src.edges.size()) - surviving;  // remove_relation
    cost += static_cast<int>(tar.edges.size()) - surviving;  // set_relation
    return cost;
}

// Candidate src indices for a tar node, in greedy preference order: same name
// first, then higher attribute overlap, then node order; unmatched (-1) last.
std::vector<int> candidate_order(const SceneGraph& src, const ObjectNode& t,
                                 const std::vector<bool>& used) {
    std::vector<int> cands;
    for (std::size_t si = 0; si < src.nodes.size(); ++si)
        if (!used[si]) cands.push_back(static_cast<int>(si));
    std::stable_sort(cands.begin(), cands.end(), [&](int x, int y) {
        const auto& a = src.nodes[static_cast<std::size_t>(x)];
        const auto& b = src.nodes[static_cast<std::size_t>(y)];
        bool an = a.name == t.name, bn = b.name == t.name;
        if (an != bn) return an;
        int ao = attr_overlap(a, t), bo = attr_overlap(b, t);
        if (ao != bo) return ao > bo;
        return x < y;
    });
    cands.push_back(-1);
    return cands;
}

void search_matchings(const SceneGraph& src, const SceneGraph& tar, std::size_t ti,
                      Matching& current, std::vector<bool>& used, Matching& best, int& best_cost) {
    if (ti == tar.nodes.size()) {
        int cost = matching_cost(src, tar, current);
        if (cost < best_cost) {
            best_cost = cost;
            best = current;
        }
        return;
    }
    for (int cand : candidate_order(src, tar.nodes[ti], used)) {
        current[ti] = cand;
        if (cand >= 0) used[static_cast<std::size_t>(cand)] = true;
        search_matchings(src, tar, ti + 1, current, used, best, best_cost);
        if (cand >= 0) used[static_cast<std::size_t>(cand)] = false;
    }
}

Matching greedy_matching(const SceneGraph& src, const SceneGraph& tar) {
    Matching m(tar.nodes.size(), -1);
    std::vector<bool> used(src.nodes.size(), false);
    // Same-name pass, then a best-overlap pass for the rest.
    for (std::size_t ti = 0; ti < tar.nodes.size(); ++ti) {
        const auto& cands = candidate_order(src, tar.nodes[ti], used);
        if (!cands.empty() && cands[0] >= 0 &&
            src.nodes[static_cast<std::size_t>(cands[0])].name == tar.nodes[ti].name) {
            m[ti] = cands[0];
            used[static_cast<std::size_t>(cands[0])] = true;
        }
    }
    for (std::size_t ti = 0; ti < tar.nodes.size(); ++ti) {
        if (m[ti] >= 0) continue;
        for (int cand : candidate_order(src, tar.nodes[ti], used)) {
            if (cand < 0) break;
            // Relabel only when not costlier than remove+add.
            if (pair_cost(src.nodes[static_cast<std::size_t>(cand)], tar.nodes[ti]) <= 2) {
                m[ti] = cand;
                used[static_cast<std::size_t>(cand)] = true;
            }
            break;
        }
    }
    return m;
}

}  // namespace

GraphPatch graph_diff(const SceneGraph& src, const SceneGraph& tar) {
    src.validate();
    tar.validate();

    constexpr std::size_t kExhaustiveLimit = 6;
    Matching matching;
    if (src.nodes.size() <= kExhaustiveLimit && tar.nodes.size() <= kExhaustiveLimit) {
        Matching current(tar.nodes.size(), -1);
        std::vector<bool> used(src.nodes.size(), false);
        int best_cost = std::numeric_limits<int>::max();
        search_matchings(src, tar, 0, current, used, matching, best_cost);
    } else {
        matching = greedy_matching(src, tar);
    }

    std::map<int, int> src_to_tar, tar_to_out;  // node ids; out id = src id or fresh id
    std::vector<bool> src_used(src.nodes.size(), false);
    for (std::size_t ti = 0; ti < matching.size(); ++ti) {
        if (matching[ti] < 0) continue;
        src_used[static_cast<std::size_t>(matching[ti])] = true;
        int sid = src.nodes[static_cast<std::size_t>(matching[ti])].id;
        src_to_tar[sid] = tar.nodes[ti].id;
        tar_to_out[tar.nodes[ti].id] = sid;
    }

    auto survives = [&](const Edge& e) {
        auto a = src_to_tar.find(e.subject);
        auto b = src_to_tar.find(e.object);
        if (a == src_to_tar.end() || b == src_to_tar.end()) return false;
        Edge mapped{a->second, e.relation, b->second};
        return std::find(tar.edges.begin(), tar.edges.end(), mapped) != tar.edges.end();
    };

    GraphPatch patch;
    for (const auto& e : src.edges)
        if (!survives(e)) patch.push_back(PatchOp::remove_relation(e));
    for (std::size_t si = 0; si < src.nodes.size(); ++si)
        if (!src_used[si]) patch.push_back(PatchOp::remove_node(src.nodes[si].id));

    // Matched-pair ops in src node order.
    std::vector<std::pair<int, int>> pairs;  // (src index, tar index)
    for (std::size_t ti = 0; ti < matching.size(); ++ti)
        if (matching[ti] >= 0) pairs.emplace_back(matching[ti], static_cast<int>(ti));
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [si, ti] : pairs) {
        const auto& s = src.nodes[static_cast<std::size_t>(si)];
        const auto& t = tar.nodes[static_cast<std::size_t>(ti)];
        if (s.name != t.name) patch.push_back(PatchOp::relabel(s.id, t.name));
        std::set<std::string> slots;
        for (const auto& [slot, _] : s.attributes) slots.insert(slot);
        for (const auto& [slot, _] : t.attributes) slots.insert(slot);
        for (const auto& slot : ordered_slots(slots)) {
            auto sit = s.attributes.find(slot);
            auto tit = t.attributes.find(slot);
            if (tit == t.attributes.end())
                patch.push_back(PatchOp::clear_attribute(s.id, slot));
            else if (sit == s.attributes.end() || sit->second != tit->second)
                patch.push_back(PatchOp::set_attribute(s.id, slot, tit->second));
        }
    }

    int fresh = src.next_id();
    for (std::size_t ti = 0; ti < matching.size(); ++ti) {
        if (matching[ti] >= 0) continue;
        ObjectNode n = tar.nodes[ti];
        n.id = fresh++;
        tar_to_out[tar.nodes[ti].id] = n.id;
        patch.push_back(PatchOp::add_node(std::move(n)));
    }
    for (const auto& e : tar.edges) {
        bool covered = false;
        for (const auto& se : src.edges) {
            auto a = src_to_tar.find(se.subject);
            auto b = src_to_tar.find(se.object);
            if (a != src_to_tar.end() && b != src_to_tar.end() &&
                Edge{a->second, se.relation, b->second} == e) {
                covered = true;
                break;
            }
        }
        if (!covered)
            patch.push_back(PatchOp::set_relation(Edge{tar_to_out.at(e.subject), e.relation,
                                                       tar_to_out.at(e.object)}));
    }
    return patch;
}

namespace {

bool equivalent_search(const SceneGraph& a, const SceneGraph& b, std::size_t ai,
                       std::vector<int>& assign, std::vector<bool>& used) {
    if (ai == a.nodes.size()) {
        std::map<int, int> id_map;
        for (std::size_t i = 0; i < a.nodes.size(); ++i)
            id_map[a.nodes[i].id] = b.nodes[static_cast<std::size_t>(assign[i])].id;
        std::vector<Edge> mapped;
        for (const auto& e : a.edges)
            mapped.push_back(Edge{id_map.at(e.subject), e.relation, id_map.at(e.object)});
        std::vector<Edge> be = b.edges;
        std::sort(mapped.begin(), mapped.end());
        std::sort(be.begin(), be.end());
        return mapped == be;
    }
    for (std::size_t bi = 0; bi < b.nodes.size(); ++bi) {
        if (used[bi]) continue;
        if (a.nodes[ai].name != b.nodes[bi].name) continue;
        if (a.nodes[ai].attributes != b.nodes[bi].attributes) continue;
        used[bi] = true;
        assign[ai] = static_cast<int>(bi);
        if (equivalent_search(a, b, ai + 1, assign, used)) return true;
        used[bi] = false;
    }
    return false;
}

}  // namespace

bool equivalent(const SceneGraph& a, const SceneGraph& b) {
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
    std::vector<int> assign(a.nodes.size(), -1);
    std::vector<bool> used(b.nodes.size(), false);
    return equivalent_search(a, b, 0, assign, used);
}

std::vector<std::string> caption_tokens(const SceneGraph& g, TaskType task) {
    const auto& rules = required_slots(task);
    std::vector<std::vector<std::string>> phrases;
    for (std::size_t ni = 0; ni < g.nodes.size(); ++ni) {
        const auto& node = g.nodes[ni];
        std::vector<std::string> phrase{"a"};
        std::set<std::string> slots;
        for (const auto& [slot, _] : node.attributes) slots.insert(slot);
        for (const auto& rule : rules)
            if (rule.all_nodes || ni == 0) slots.insert(rule.slot);
        for (const auto& slot : ordered_slots(slots)) {
            auto it = node.attributes.find(slot);
            phrase.push_back(it != node.attributes.end() ? it->second : default_slot_token(slot));
        }
        phrase.push_back(node.name);
        phrases.push_back(std::move(phrase));
    }
    for (const auto& e : g.edges) {
        const ObjectNode* s = g.find(e.subject);
        const ObjectNode* o = g.find(e.object);
        phrases.push_back({s->name, e.relation, o->name});
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (i) out.push_back(".");
        out.insert(out.end(), phrases[i].begin(), phrases[i].end());
    }
    return out;
}

std::string caption_string(const SceneGraph& g, TaskType task) {
    std::string out;
    for (const auto& t : caption_tokens(g, task)) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace semflow
