// Command-line surface over the library.  Every command produces a RunReport:
// a list of named checks plus command-specific results.
#pragma once

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace symplectic::cli {

struct Check {
    std::string id;
    bool passed = false;
    double metric = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct RunReport {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::vector<Check> checks;
    nlohmann::json results = nlohmann::json::object();

    void check(std::string id, bool passed, double metric, double threshold, std::string detail = {});
    bool passed() const;
    // empty when everything passed
    std::string first_failure() const;
    nlohmann::json to_json() const;
};

// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.
// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symplectic::cli
