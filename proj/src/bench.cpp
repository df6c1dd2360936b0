#include "semflow/bench.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semflow/batch.hpp"
#include "semflow/errors.hpp"
#include "semflow/instruction.hpp"
#include "semflow/rng.hpp"
#include "semflow/serialize.hpp"

namespace semflow {

void BenchSuite::validate(const Vocabulary& vocab) const {
    std::set<std::string> ids;
    for (const auto& c : cases) {
        if (c.id.empty()) throw ConfigError("bench case with an empty id");
        if (!ids.insert(c.id).second) throw ConfigError("duplicate bench case id '" + c.id + "'");
        c.scene.validate();
        if (c.expect_unsupported) {
            try {
                parse_instruction(c.instruction, c.task, c.scene, vocab);
                throw ConfigError("case '" + c.id + "' expected unsupported_task but parsed");
            } catch (const UnsupportedTaskError&) {
                // expected
            }
        } else {
            try {
                parse_instruction(c.instruction, c.task, c.scene, vocab);
            } catch (const Error& e) {
                throw ConfigError("case '" + c.id + "' does not parse: " + e.what());
            }
        }
    }
}

namespace {

const std::vector<std::string>& group_tokens(const Vocabulary& vocab, const std::string& name) {
    for (const auto& g : vocab.spec().axes)
        if (g.name == name) return g.tokens;
    throw ConfigError("the default suite needs axis group '" + name + "'");
}

std::string pick(const std::vector<std::string>& tokens, Rng& rng) {
    return tokens[static_cast<std::size_t>(rng.next_u64() % tokens.size())];
}

std::string pick_other(const std::vector<std::string>& tokens, const std::string& avoid,
                       Rng& rng) {
    if (tokens.size() < 2) throw ConfigError("axis group too small for a swap case");
    std::string t;
    do {
        t = pick(tokens, rng);
    } while (t == avoid);
    return t;
}

ObjectNode make_node(int id, const std::string& name) {
    ObjectNode n;
    n.id = id;
    n.name = name;
    return n;
}

}  // namespace

BenchSuite BenchSuite::default_suite(const Vocabulary& vocab, int per_category,
                                     std::uint64_t seed) {
    if (per_category < 1) throw ConfigError("per_category must be at least 1");
    const auto& objects = group_tokens(vocab, "objects");
    const auto& colors = group_tokens(vocab, "color");
    const auto& materials = group_tokens(vocab, "material");
    const auto& poses = group_tokens(vocab, "pose");
    const auto& styles = group_tokens(vocab, "style");
    const auto& backgrounds = group_tokens(vocab, "background");
    const auto& tones = group_tokens(vocab, "tone");
    const auto& genders = group_tokens(vocab, "gender");
    const auto& ranks = group_tokens(vocab, "rank");

    BenchSuite suite;
    Rng rng(mix_seed(seed, "bench-suite"));
    auto add_case = [&](TaskType task, int i, SceneGraph scene, std::string instruction) {
        BenchCase c;
        c.id = to_string(task) + "-" + std::to_string(i);
        c.task = task;
        c.scene = std::move(scene);
        c.instruction = std::move(instruction);
        suite.cases.push_back(std::move(c));
    };

    for (int i = 0; i < per_category; ++i) {
        {
            SceneGraph g;
            g.nodes.push_back(make_node(0, pick(objects, rng)));
            add_case(TaskType::background_change, i, g,
                     "change the background to " + pick(backgrounds, rng));
        }
        {
            std::string c1 = pick(colors, rng);
            SceneGraph g;
            ObjectNode n = make_node(0, pick(objects, rng));
            n.attributes["color"] = c1;
            g.nodes.push_back(n);
            add_case(TaskType::color_alter, i, g,
                     "make the " + g.nodes[0].name + " " + pick_other(colors, c1, rng));
        }
        {
            std::string m1 = pick(materials, rng);
            SceneGraph g;
            ObjectNode n = make_node(0, pick(objects, rng));
            n.attributes["material"] = m1;
            g.nodes.push_back(n);
            add_case(TaskType::material_alter, i, g,
                     "change the material of the " + g.nodes[0].name + " to " +
                         pick_other(materials, m1, rng));
        }
        {
            std::string p1 = pick(poses, rng);
            SceneGraph g;
            ObjectNode n = make_node(0, pick(objects, rng));
            n.attributes["pose"] = p1;
            g.nodes.push_back(n);
            add_case(TaskType::motion_change, i, g,
                     "make the " + g.nodes[0].name + " " + pick_other(poses, p1, rng));
        }
        {
            std::string g1 = pick(genders, rng);
            SceneGraph g;
            ObjectNode n = make_node(0, g1);
            n.attributes["rank"] = pick(ranks, rng);
            g.nodes.push_back(n);
            add_case(TaskType::ps_human, i, g, "make it a " + pick_other(genders, g1, rng));
        }
        {
            SceneGraph g;
            g.nodes.push_back(make_node(0, pick(objects, rng)));
            add_case(TaskType::style_change, i, g, "change the style to " + pick(styles, rng));
        }
        {
            SceneGraph g;
            std::string base = pick(objects, rng);
            g.nodes.push_back(make_node(0, base));
            std::string added = pick_other(objects, base, rng);
            add_case(TaskType::subject_add, i, g,
                     i % 2 == 0 ? "add a " + added + " next to the " + base : "add a " + added);
        }
        {
            SceneGraph g;
            std::string keep = pick(objects, rng);
            std::string drop = pick_other(objects, keep, rng);
            g.nodes.push_back(make_node(0, keep));
            g.nodes.push_back(make_node(1, drop));
            g.edges.push_back(Edge{1, "beside", 0});
            add_case(TaskType::subject_remove, i, g, "remove the " + drop);
        }
        {
            SceneGraph g;
            std::string from = pick(objects, rng);
            g.nodes.push_back(make_node(0, from));
            add_case(TaskType::subject_replace, i, g,
                     "replace the " + from + " with a " + pick_other(objects, from, rng));
        }
        {
            SceneGraph g;
            g.nodes.push_back(make_node(0, pick(objects, rng)));
            add_case(TaskType::tone_transfer, i, g, "change the tone to " + pick(tones, rng));
        }
    }
    return suite;
}

BenchReport run_bench(const BenchSuite& suite, const Vocabulary& vocab, const UevConfig& config,
                      bool parallel) {
    BenchReport report;
    report.cases.assign(suite.cases.size(), BenchCaseResult{});

    auto run_case = [&](int i) {
        const BenchCase& c = suite.cases[static_cast<std::size_t>(i)];
        BenchCaseResult& r = report.cases[static_cast<std::size_t>(i)];
        r.id = c.id;
        r.task = c.task;
        r.expected_unsupported = c.expect_unsupported;
        UevConfig case_cfg = config;
        case_cfg.dse.seed = mix_seed(config.dse.seed, static_cast<std::uint64_t>(i));
        try {
            EditResult res = run_uev(c.scene, c.instruction, c.task, vocab, case_cfg);
            r.converged = res.converged;
            r.rounds = res.rounds_used;
            r.final_score = res.final_score;
        } catch (const Error& e) {
            r.error = true;
            r.error_kind = e.kind();
        } catch (const std::exception&) {
            r.error = true;
            r.error_kind = "internal";
        }
    };
    if (parallel)
        for_each_index_parallel(static_cast<int>(suite.cases.size()), run_case);
    else
        for_each_index_serial(static_cast<int>(suite.cases.size()), run_case);

    // Category rows in task enum order, then an unweighted average row.
    for (TaskType task : all_task_types()) {
        BenchCategoryRow row;
        row.category = to_string(task);
        int scored = 0;
        double score_sum = 0.0, rounds_sum = 0.0;
        for (const auto& r : report.cases) {
            if (r.task != task) continue;
            ++row.cases;
            if (r.converged) ++row.converged;
            if (!r.error) {
                ++scored;
                score_sum += r.final_score;
                rounds_sum += r.rounds;
            }
        }
        if (row.cases == 0) continue;
        row.convergence_rate = static_cast<double>(row.converged) / row.cases;
        row.mean_final_score = scored ? score_sum / scored : 0.0;
        row.mean_rounds = scored ? rounds_sum / scored : 0.0;
        report.categories.push_back(row);
    }
    if (!report.categories.empty()) {
        BenchCategoryRow avg;
        avg.category = "average";
        for (const auto& row : report.categories) {
            avg.cases += row.cases;
            avg.converged += row.converged;
            avg.convergence_rate += row.convergence_rate;
            avg.mean_final_score += row.mean_final_score;
            avg.mean_rounds += row.mean_rounds;
        }
        double n = static_cast<double>(report.categories.size());
        avg.convergence_rate /= n;
        avg.mean_final_score /= n;
        avg.mean_rounds /= n;
        report.categories.push_back(avg);
    }
    return report;
}

nlohmann::json bench_suite_to_json(const BenchSuite& suite) {
    nlohmann::json j;
    j["cases"] = nlohmann::json::array();
    for (const auto& c : suite.cases) {
        nlohmann::json jc;
        jc["id"] = c.id;
        jc["task"] = to_string(c.task);
        jc["scene"] = scene_graph_to_json(c.scene);
        jc["instruction"] = c.instruction;
        if (c.expect_unsupported) jc["expect_unsupported"] = true;
        j["cases"].push_back(jc);
    }
    return j;
}

BenchSuite bench_suite_from_json(const nlohmann::json& j) {
    BenchSuite suite;
    try {
        for (const auto& jc : j.at("cases")) {
            BenchCase c;
            c.id = jc.at("id").get<std::string>();
            c.task = task_type_from_string(jc.at("task").get<std::string>());
            c.scene = scene_graph_from_json(jc.at("scene"));
            c.instruction = jc.at("instruction").get<std::string>();
            if (jc.contains("expect_unsupported"))
                c.expect_unsupported = jc.at("expect_unsupported").get<bool>();
            suite.cases.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed bench suite json: ") + e.what());
    }
    return suite;
}

nlohmann::json bench_report_to_json(const BenchReport& report) {
    nlohmann::json j;
    j["cases"] = nlohmann::json::array();
    for (const auto& r : report.cases) {
        nlohmann::json jr;
        jr["id"] = r.id;
        jr["task"] = to_string(r.task);
        jr["error"] = r.error;
        if (r.error) jr["error_kind"] = r.error_kind;
        if (r.expected_unsupported) jr["expected_unsupported"] = true;
        jr["converged"] = r.converged;
        jr["rounds"] = r.rounds;
        jr["final_score"] = r.final_score;
        j["cases"].push_back(jr);
    }
    j["categories"] = nlohmann::json::array();
    for (const auto& row : report.categories) {
        nlohmann::json jrow;
        jrow["category"] = row.category;
        jrow["cases"] = row.cases;
        jrow["converged"] = row.converged;
        jrow["convergence_rate"] = row.convergence_rate;
        jrow["mean_final_score"] = row.mean_final_score;
        jrow["mean_rounds"] = row.mean_rounds;
        j["categories"].push_back(jrow);
    }
    return j;
}

std::string bench_report_to_csv(const BenchReport& report) {
    std::string out = "category,cases,converged,convergence_rate,mean_final_score,mean_rounds\n";
    for (const auto& row : report.categories) {
        out += row.category;
        out += ',';
        out += std::to_string(row.cases);
        out += ',';
        out += std::to_string(row.converged);
        out += ',';
        out += format_double(row.convergence_rate);
        out += ',';
        out += format_double(row.mean_final_score);
        out += ',';
        out += format_double(row.mean_rounds);
        out += '\n';
    }
    return out;
}

}  // namespace semflow
