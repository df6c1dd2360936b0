#include "semflow/instruction.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "semflow/errors.hpp"

namespace semflow {

std::vector<std::string> tokenize_instruction(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (c == '.' || c == ',') {
            flush();
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return out;
}

namespace {

using Tokens = std::vector<std::string>;

std::vector<Tokens> split_clauses(const Tokens& tokens) {
    std::vector<Tokens> clauses;
    Tokens cur;
    for (const auto& t : tokens) {
        if (t == "and") {
            if (!cur.empty()) clauses.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(t);
        }
    }
    if (!cur.empty()) clauses.push_back(std::move(cur));
    return clauses;
}

std::string join(const Tokens& tokens, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (!out.empty()) out += ' ';
        out += tokens[i];
    }
    return out;
}

// Referent = optional "the", then zero or more attribute tokens, then a node
// name. "it" names the first node. Returns the matched node.
const ObjectNode* resolve_referent(const Tokens& ref, const SceneGraph& g,
                                   const std::string& clause) {
    if (g.nodes.empty())
        throw UnresolvableReferentError("clause '" + clause + "' refers into an empty scene");
    Tokens r = ref;
    if (!r.empty() && r.front() == "the") r.erase(r.begin());
    if (r.empty())
        throw GrammarError("clause '" + clause + "' is missing a referent");
    if (r.size() == 1 && r[0] == "it") return &g.nodes[0];
    const std::string& name = r.back();
    for (const auto& node : g.nodes) {
        if (node.name != name) continue;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            bool found = false;
            for (const auto& [_, v] : node.attributes)
                if (v == r[i]) found = true;
            if (!found) {
                ok = false;
                break;
            }
        }
        if (ok) return &node;
    }
    throw UnresolvableReferentError("no node matches 'the " + join(r, 0, r.size()) + "'");
}

void require_token(const std::string& token, const Vocabulary& vocab) {
    if (!vocab.contains(token))
        throw VocabularyError("token '" + token + "' is not in the vocabulary");
}

std::size_t skip_article(const Tokens& t, std::size_t i) {
    if (i < t.size() && (t[i] == "a" || t[i] == "an" || t[i] == "the")) return i + 1;
    return i;
}

struct ClauseContext {
    const SceneGraph& graph;
    const Vocabulary& vocab;
    TaskType task;
    std::string clause_text;
    int add_count = 0;  // fresh ids handed out so far in this instruction
};

[[noreturn]] void grammar_fail(const ClauseContext& ctx) {
    static const std::map<TaskType, std::string> kForms = {
        {TaskType::color_alter, "'make (the) <ref> <color>'"},
        {TaskType::material_alter, "'make (the) <ref> <material>'"},
        {TaskType::motion_change, "'make (the) <ref> <pose>'"},
        {TaskType::ps_human, "'make it a <name>'"},
        {TaskType::subject_add, "'add a <name> (on|next to (the) <ref>)'"},
        {TaskType::subject_remove, "'remove the <ref>'"},
        {TaskType::subject_replace, "'replace the <ref> with a <name>'"},
        {TaskType::style_change, "'change the style to <token>'"},
        {TaskType::background_change, "'change the background to <token>'"},
        {TaskType::tone_transfer, "'change the tone to <token>'"},
        {TaskType::text_change, "'change the text to <token>'"},
    };
    std::string forms = "'change (the) <slot> (of (the) <ref>) to <token>', "
                        "'replace (the) <ref> with (a) <token>'";
    auto it = kForms.find(ctx.task);
    if (it != kForms.end()) forms = it->second + ", " + forms;
    throw GrammarError("cannot parse clause '" + ctx.clause_text + "' for task " +
                       to_string(ctx.task) + "; accepted forms: " + forms);
}

// "change (the)? <slot> (of (the)? <ref>)? to <token>"
bool parse_change_form(const Tokens& t, ClauseContext& ctx, GraphPatch& patch) {
    if (t.empty() || t[0] != "change") return false;
    std::size_t i = 1;
    if (i < t.size() && t[i] == "the") ++i;
    if (i >= t.size()) grammar_fail(ctx);
    std::string slot = t[i++];
    auto to_it = std::find(t.begin() + static_cast<long>(i), t.end(), "to");
    if (to_it == t.end() || to_it + 1 == t.end()) grammar_fail(ctx);
    std::size_t to_pos = static_cast<std::size_t>(to_it - t.begin());
    if (to_pos + 2 != t.size()) grammar_fail(ctx);
    std::string value = t.back();

    if (slot == "text") {
        // Well-formed text clause: the pipeline has no text channel.
        throw UnsupportedTaskError("text edits are not representable in this scene space");
    }
    if (!is_known_slot(slot))
        throw GrammarError("unknown slot '" + slot + "' in clause '" + ctx.clause_text + "'");

    const ObjectNode* node = nullptr;
    if (to_pos > i) {
        if (t[i] != "of") grammar_fail(ctx);
        Tokens ref(t.begin() + static_cast<long>(i) + 1, t.begin() + static_cast<long>(to_pos));
        node = resolve_referent(ref, ctx.graph, ctx.clause_text);
    } else {
        if (ctx.graph.nodes.empty())
            throw UnresolvableReferentError("clause '" + ctx.clause_text +
                                            "' refers into an empty scene");
        node = &ctx.graph.nodes[0];
    }
    require_token(value, ctx.vocab);
    auto it = node->attributes.find(slot);
    if (it == node->attributes.end() || it->second != value)
        patch.push_back(PatchOp::set_attribute(node->id, slot, value));
    return true;
}

// "replace (the)? <ref> with (a|an)? <token>"
bool parse_replace_form(const Tokens& t, ClauseContext& ctx, GraphPatch& patch) {
    if (t.empty() || t[0] != "replace") return false;
    auto with_it = std::find(t.begin(), t.end(), "with");
    if (with_it == t.end()) grammar_fail(ctx);
    std::size_t with_pos = static_cast<std::size_t>(with_it - t.begin());
    Tokens ref(t.begin() + 1, t.begin() + static_cast<long>(with_pos));
    std::size_t vi = skip_article(t, with_pos + 1);
    if (vi + 1 != t.size()) grammar_fail(ctx);
    std::string value = t[vi];
    const ObjectNode* node = resolve_referent(ref, ctx.graph, ctx.clause_text);
    require_token(value, ctx.vocab);
    if (node->name != value) patch.push_back(PatchOp::relabel(node->id, value));
    return true;
}

// "make (the)? <ref> <token>" writing the task's attribute slot.
bool parse_make_attribute(const Tokens& t, ClauseContext& ctx, const std::string& slot,
                          GraphPatch& patch) {
    if (t.size() < 3 || t[0] != "make") return false;
    Tokens ref(t.begin() + 1, t.end() - 1);
    std::string value = t.back();
    const ObjectNode* node = resolve_referent(ref, ctx.graph, ctx.clause_text);
    require_token(value, ctx.vocab);
    auto it = node->attributes.find(slot);
    if (it == node->attributes.end() || it->second != value)
        patch.push_back(PatchOp::set_attribute(node->id, slot, value));
    return true;
}

// "make it (a|an)? <token>" relabeling the first node.
bool parse_make_subject(const Tokens& t, ClauseContext& ctx, GraphPatch& patch) {
    if (t.size() < 3 || t[0] != "make" || t[1] != "it") return false;
    std::size_t vi = skip_article(t, 2);
    if (vi + 1 != t.size()) grammar_fail(ctx);
    std::string value = t[vi];
    if (ctx.graph.nodes.empty())
        throw UnresolvableReferentError("clause '" + ctx.clause_text +
                                        "' refers into an empty scene");
    const ObjectNode& node = ctx.graph.nodes[0];
    require_token(value, ctx.vocab);
    if (node.name != value) patch.push_back(PatchOp::relabel(node.id, value));
    return true;
}

// "add (a|an)? <token> ((on|next to) (the)? <ref>)?"
bool parse_add_form(const Tokens& t, ClauseContext& ctx, GraphPatch& patch) {
    if (t.empty() || t[0] != "add") return false;
    std::size_t vi = skip_article(t, 1);
    if (vi >= t.size()) grammar_fail(ctx);
    std::string value = t[vi];
    require_token(value, ctx.vocab);
    std::size_t i = vi + 1;
    std::string relation;
    const ObjectNode* anchor = nullptr;
    if (i < t.size()) {
        if (t[i] == "on") {
            relation = "on";
            ++i;
        } else if (t[i] == "next" && i + 1 < t.size() && t[i + 1] == "to") {
            relation = "beside";
            i += 2;
        } else {
            grammar_fail(ctx);
        }
        Tokens ref(t.begin() + static_cast<long>(i), t.end());
        anchor = resolve_referent(ref, ctx.graph, ctx.clause_text);
    }
    ObjectNode fresh;
    fresh.id = ctx.graph.next_id() + ctx.add_count++;
    fresh.name = value;
    patch.push_back(PatchOp::add_node(fresh));
    if (anchor) patch.push_back(PatchOp::set_relation(Edge{fresh.id, relation, anchor->id}));
    return true;
}

// "remove (the)? <ref>" dropping the node's edges first.
bool parse_remove_form(const Tokens& t, ClauseContext& ctx, GraphPatch& patch) {
    if (t.empty() || t[0] != "remove") return false;
    Tokens ref(t.begin() + 1, t.end());
    const ObjectNode* node = resolve_referent(ref, ctx.graph, ctx.clause_text);
    for (const auto& e : ctx.graph.edges)
        if (e.subject == node->id || e.object == node->id)
            patch.push_back(PatchOp::remove_relation(e));
    patch.push_back(PatchOp::remove_node(node->id));
    return true;
}

void parse_clause(const Tokens& t, ClauseContext& ctx, GraphPatch& patch) {
    if (t.empty()) grammar_fail(ctx);
    switch (ctx.task) {
        case TaskType::color_alter:
            if (parse_make_attribute(t, ctx, "color", patch)) return;
            break;
        case TaskType::material_alter:
            if (parse_make_attribute(t, ctx, "material", patch)) return;
            break;
        case TaskType::motion_change:
            if (parse_make_attribute(t, ctx, "pose", patch)) return;
            break;
        case TaskType::ps_human:
            if (parse_make_subject(t, ctx, patch)) return;
            break;
        case TaskType::subject_add:
            if (parse_add_form(t, ctx, patch)) return;
            break;
        case TaskType::subject_remove:
            if (parse_remove_form(t, ctx, patch)) return;
            break;
        default:
            break;
    }
    // Corrective forms are valid under every task.
    if (parse_change_form(t, ctx, patch)) return;
    if (parse_replace_form(t, ctx, patch)) return;
    grammar_fail(ctx);
}

}  // namespace

GraphPatch parse_instruction(const std::string& instruction, TaskType task, const SceneGraph& g,
                             const Vocabulary& vocab) {
    g.validate();
    Tokens tokens = tokenize_instruction(instruction);
    auto clauses = split_clauses(tokens);
    if (clauses.empty()) throw GrammarError("empty instruction");
    GraphPatch patch;
    ClauseContext ctx{g, vocab, task, "", 0};
    for (const auto& clause : clauses) {
        ctx.clause_text = join(clause, 0, clause.size());
        parse_clause(clause, ctx, patch);
    }
    apply_patch(g, patch);  // surfaces conflicts between clauses early
    return patch;
}

std::vector<Replacement> token_diff(const std::vector<std::string>& src,
                                    const std::vector<std::string>& tar) {
    const std::size_t n = src.size(), m = tar.size();
    // lcs[i][j] = LCS length of src[i:], tar[j:]
    std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            lcs[i][j] = src[i] == tar[j] ? lcs[i + 1][j + 1] + 1
                                         : std::max(lcs[i + 1][j], lcs[i][j + 1]);

    std::vector<Replacement> out;
    std::vector<int> del_pos;
    std::vector<std::string> ins_tok;
    auto flush_gap = [&](int next_src_pos) {
        std::size_t k = std::min(del_pos.size(), ins_tok.size());
        for (std::size_t x = 0; x < k; ++x)
            out.push_back({del_pos[x], src[static_cast<std::size_t>(del_pos[x])], ins_tok[x]});
        for (std::size_t x = k; x < del_pos.size(); ++x)
            out.push_back({del_pos[x], src[static_cast<std::size_t>(del_pos[x])], ""});
        for (std::size_t x = k; x < ins_tok.size(); ++x)
            out.push_back({next_src_pos, "", ins_tok[x]});
        del_pos.clear();
        ins_tok.clear();
    };

    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && src[i] == tar[j] && lcs[i][j] == lcs[i + 1][j + 1] + 1) {
            flush_gap(static_cast<int>(i));
            ++i;
            ++j;
        } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
            del_pos.push_back(static_cast<int>(i));
            ++i;
        } else {
            ins_tok.push_back(tar[j]);
            ++j;
        }
    }
    flush_gap(static_cast<int>(n));
    return out;
}

std::vector<std::string> apply_replacements(const std::vector<std::string>& src,
                                            const std::vector<Replacement>& reps) {
    std::map<int, std::vector<std::string>> inserts;
    std::map<int, Replacement> at;  // substitutions and deletions keyed by src pos
    for (const auto& r : reps) {
        if (r.pos < 0 || r.pos > static_cast<int>(src.size()))
            throw DomainError("replacement position out of range");
        if (r.before.empty()) {
            inserts[r.pos].push_back(r.after);
            continue;
        }
        if (r.pos == static_cast<int>(src.size()) ||
            src[static_cast<std::size_t>(r.pos)] != r.before)
            throw DomainError("replacement source token mismatch at position " +
                              std::to_string(r.pos));
        if (!at.emplace(r.pos, r).second)
            throw DomainError("duplicate replacement at position " + std::to_string(r.pos));
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i <= src.size(); ++i) {
        auto ins = inserts.find(static_cast<int>(i));
        if (ins != inserts.end())
            out.insert(out.end(), ins->second.begin(), ins->second.end());
        if (i == src.size()) break;
        auto sub = at.find(static_cast<int>(i));
        if (sub == at.end())
            out.push_back(src[i]);
        else if (!sub->second.after.empty())
            out.push_back(sub->second.after);
    }
    return out;
}

EditPlan build_edit_plan(const SceneGraph& g, const std::string& instruction, TaskType task,
                         const Vocabulary& vocab) {
    EditPlan plan;
    plan.task = task;
    plan.instruction = instruction;
    plan.graph_src = g;
    plan.caption_src = caption_tokens(g, task);
    plan.patch = parse_instruction(instruction, task, g, vocab);
    plan.graph_tar = apply_patch(g, plan.patch);
    plan.caption_tar = caption_tokens(plan.graph_tar, task);
    plan.replacements = token_diff(plan.caption_src, plan.caption_tar);
    return plan;
}

}  // namespace semflow
