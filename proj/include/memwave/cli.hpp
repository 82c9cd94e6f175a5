#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "memwave/model.hpp"

namespace memwave {

inline constexpr const char* commands[] = {"spectrum", "gaps", "riesz", "biorth", "control", "simulate", "beam",
                                           "verify-all"};

struct RunConfig {
    std::string command = "verify-all";
    ModelParams params;
    FourierField y0;  // empty selects the default data at params.N
    FourierField y1;
    int N_prod = 10000;
    int N_t = 8192;
    double reg = 0.0;
    std::vector<double> eps_sweep = {0.05, 0.02, 0.01, 0.005};
    std::uint64_t seed = 20191105;
    std::string out_dir = "memwave_out";
    int n_max = 10000;  // spectrum suite range
    int gap_N = 200;
    int biorth_N = 8;
};

// Default data: 0.1 (e^{ix} + e^{-ix}) + 0.05 (e^{2ix} + e^{-2ix}) and zero velocity.
FourierField default_displacement(int N);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;  // how value is compared with threshold
    bool asserted = true;  // informational checks do not affect the exit status
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct SuiteResult {
    std::string name;
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    bool warning_status = false;  // raised for a subcritical control horizon
    nlohmann::json results = nlohmann::json::object();
    std::map<std::string, CsvTable> tables;
};

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_warning = 2, exit_invalid = 3 };

struct RunResult {
    int exit_code = exit_ok;
    nlohmann::json report;  // header.timestamp left empty
    std::map<std::string, CsvTable> tables;
};

SuiteResult spectrum_suite(const RunConfig& cfg);
SuiteResult gaps_suite(const RunConfig& cfg);
SuiteResult riesz_suite(const RunConfig& cfg);
SuiteResult biorth_suite(const RunConfig& cfg);
SuiteResult control_suite(const RunConfig& cfg);
SuiteResult simulate_suite(const RunConfig& cfg);
SuiteResult beam_suite(const RunConfig& cfg);

// Runs the configured command without touching the file system.
RunResult run(const RunConfig& cfg);

// Writes report.json (with the given timestamp) and one CSV per table.
void write_outputs(const RunResult& result, const std::string& out_dir, const std::string& timestamp);

std::string format_csv(const CsvTable& table);

}  // namespace memwave
