#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nchardy/model.hpp"

namespace nchardy {

/// Configuration for a seeded verification suite run.
struct SuiteConfig {
    std::string suite = "all";
    int trials = 200;
    std::uint64_t seed = 1;
    // default models: MatrixBlock n=4 blocks [1,1,2]; TorusMatrix n=2, N=4, K=17
    std::vector<int> blocks = {1, 1, 2};
    int torus_n = 2;
    int degree = 4;
    int quad_nodes = 17;
    std::map<std::string, double> tol_override;  // check name -> tolerance
    std::string output;                          // optional JSON report path
};

struct CheckRecord {
    std::string name;
    int trials = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckRecord> checks;
    std::string fingerprint;        // compiler / Eigen / build flags
    double runtime_seconds = 0.0;   // informational; excluded from the JSON payload

    bool all_pass() const;
};

/// Known suite names: contractivity, jensen, holder, arveson,
/// szego-projection, riesz, outer, wilson, szego-formula, det-limit, all.
/// Throws std::invalid_argument for unknown names.
SuiteReport run_suite(const SuiteConfig& cfg);

const std::vector<std::string>& suite_names();

/// Deterministic under fixed (config, seed): runtime is not serialized.
nlohmann::json suite_report_to_json(const SuiteReport& r);

std::string format_suite_report(const SuiteReport& r);

}  // namespace nchardy
