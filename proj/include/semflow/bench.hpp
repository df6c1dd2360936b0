#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "semflow/scene_graph.hpp"
#include "semflow/uev.hpp"
#include "semflow/vocabulary.hpp"

namespace semflow {

struct BenchCase {
    std::string id;
    TaskType task = TaskType::color_alter;
    SceneGraph scene;
    std::string instruction;
    bool expect_unsupported = false;  // text_change cases
};

struct BenchSuite {
    std::vector<BenchCase> cases;

    void validate(const Vocabulary& vocab) const;

    // Seeded generator covering the ten executable categories with
    // per_category cases each, built from the vocabulary's axis groups.
    static BenchSuite default_suite(const Vocabulary& vocab, int per_category,
                                    std::uint64_t seed);
};

struct BenchCaseResult {
    std::string id;
    TaskType task = TaskType::color_alter;
    bool error = false;
    std::string error_kind;
    bool expected_unsupported = false;
    bool converged = false;
    int rounds = 0;
    double final_score = 0.0;
};

struct BenchCategoryRow {
    std::string category;
    int cases = 0;
    int converged = 0;
    double convergence_rate = 0.0;
    double mean_final_score = 0.0;
    double mean_rounds = 0.0;
};

struct BenchReport {
    std::vector<BenchCaseResult> cases;
    std::vector<BenchCategoryRow> categories;  // per category plus an "average" row
};

// Runs every case through the loop in a work pool with per-case isolated
// state (per-case seed = mix(seed, case index)). Case errors are recorded on
// the case row; the pool keeps going.
BenchReport run_bench(const BenchSuite& suite, const Vocabulary& vocab,
                      const UevConfig& config, bool parallel = true);

nlohmann::json bench_suite_to_json(const BenchSuite& suite);
BenchSuite bench_suite_from_json(const nlohmann::json& j);

nlohmann::json bench_report_to_json(const BenchReport& report);
// category,cases,converged,convergence_rate,mean_final_score,mean_rounds
std::string bench_report_to_csv(const BenchReport& report);

}  // namespace semflow
