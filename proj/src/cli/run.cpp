#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "memwave/cli.hpp"
#include "memwave/error.hpp"

namespace memwave {

namespace {

using nlohmann::json;

FourierField field_from_json(const json& modes, int N) {
    FourierField f(N);
    for (const auto& m : modes) {
        if (!m.is_array() || m.size() < 2 || m.size() > 3)
            throw InvalidParameter("data modes are written as [n, re] or [n, re, im]");
        const int n = m[0].get<int>();
        if (n == 0) throw InvalidParameter("data must have zero mean (mode 0 is excluded)");
        if (std::abs(n) > N)
            throw DimensionError("data mode " + std::to_string(n) + " exceeds the truncation N = " + std::to_string(N));
        f.at(n) = cplx(m[1].get<double>(), m.size() == 3 ? m[2].get<double>() : 0.0);
    }
    return f;
}

json field_to_json(const FourierField& f) {
    json out = json::array();
    for (int n = -f.N(); n <= f.N(); ++n)
        if (n != 0 && f[n] != 0.0) out.push_back({n, f[n].real(), f[n].imag()});
    return out;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw InvalidParameter("unknown key '" + k + "' in " + where);
}

json suite_json(const SuiteResult& s) {
    json checks = json::array();
    for (const auto& c : s.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"relation", c.relation},
                          {"asserted", c.asserted}});
    return {{"name", s.name}, {"checks", checks}, {"warnings", s.warnings}, {"results", s.results}};
}

}  // namespace

FourierField default_displacement(int N) {
    FourierField f(std::max(N, 2));
    f.at(1) = f.at(-1) = 0.1;
    f.at(2) = f.at(-2) = 0.05;
    return f.resized(std::max(N, 2));
}

RunConfig config_from_json(const json& j) {
    reject_unknown(j, {"command", "params", "data", "N_prod", "N_t", "reg", "eps_sweep", "seed", "out", "n_max", "gap_N",
                       "biorth_N"},
                   "config");
    RunConfig cfg;
    try {
        if (j.contains("command")) cfg.command = j["command"].get<std::string>();
        if (j.contains("params")) {
            const json& p = j["params"];
            reject_unknown(p, {"M", "c", "T", "N", "sigma", "omega0"}, "params");
            if (p.contains("M")) cfg.params.M = p["M"].get<double>();
            if (p.contains("c")) cfg.params.c = p["c"].get<double>();
            if (p.contains("T")) cfg.params.T = p["T"].get<double>();
            if (p.contains("N")) cfg.params.N = p["N"].get<int>();
            if (p.contains("sigma")) cfg.params.sigma = p["sigma"].get<double>();
            if (p.contains("omega0"))
                cfg.params.omega0 = ControlSet::from_intervals(p["omega0"].get<std::vector<std::pair<double, double>>>());
        }
        if (j.contains("data")) {
            const json& d = j["data"];
            reject_unknown(d, {"y0", "y1"}, "data");
            const int N = std::max(cfg.params.N, 1);
            cfg.y0 = field_from_json(d.value("y0", json::array()), N);
            cfg.y1 = field_from_json(d.value("y1", json::array()), N);
        }
        if (j.contains("N_prod")) cfg.N_prod = j["N_prod"].get<int>();
        if (j.contains("N_t")) cfg.N_t = j["N_t"].get<int>();
        if (j.contains("reg")) cfg.reg = j["reg"].get<double>();
        if (j.contains("eps_sweep")) cfg.eps_sweep = j["eps_sweep"].get<std::vector<double>>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
        if (j.contains("n_max")) cfg.n_max = j["n_max"].get<int>();
        if (j.contains("gap_N")) cfg.gap_N = j["gap_N"].get<int>();
        if (j.contains("biorth_N")) cfg.biorth_N = j["biorth_N"].get<int>();
    } catch (const json::exception& e) {
        throw InvalidParameter(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    json p = {{"M", cfg.params.M},
              {"c", cfg.params.c},
              {"T", cfg.params.T},
              {"N", cfg.params.N},
              {"sigma", cfg.params.sigma},
              {"omega0", cfg.params.omega0.intervals()}};
    json j = {{"command", cfg.command}, {"params", p},       {"N_prod", cfg.N_prod}, {"N_t", cfg.N_t},
              {"reg", cfg.reg},         {"eps_sweep", cfg.eps_sweep}, {"seed", cfg.seed}, {"out", cfg.out_dir},
              {"n_max", cfg.n_max},     {"gap_N", cfg.gap_N}, {"biorth_N", cfg.biorth_N}};
    if (cfg.y0.N() > 0 || cfg.y1.N() > 0) j["data"] = {{"y0", field_to_json(cfg.y0)}, {"y1", field_to_json(cfg.y1)}};
    return j;
}

RunResult run(const RunConfig& cfg) {
    RunResult r;
    r.report = {{"header", {{"tool", "memwave"}, {"version", "1.0.0"}, {"timestamp", ""}}},
                {"command", cfg.command},
                {"config", config_to_json(cfg)}};
    using Suite = SuiteResult (*)(const RunConfig&);
    std::vector<Suite> suites;
    const std::string& c = cfg.command;
    if (c == "spectrum") suites = {spectrum_suite};
    else if (c == "gaps") suites = {gaps_suite};
    else if (c == "riesz") suites = {riesz_suite};
    else if (c == "biorth") suites = {biorth_suite};
    else if (c == "control") suites = {control_suite};
    else if (c == "simulate") suites = {simulate_suite};
    else if (c == "beam") suites = {beam_suite};
    else if (c == "verify-all")
        suites = {spectrum_suite, gaps_suite, riesz_suite, biorth_suite, control_suite, simulate_suite, beam_suite};

    auto fail_invalid = [&](const std::string& msg) {
        r.exit_code = exit_invalid;
        r.report["status"] = "invalid";
        r.report["error"] = msg;
        r.report["exit_code"] = r.exit_code;
        return r;
    };
    if (suites.empty()) return fail_invalid("unknown command '" + c + "'");
    try {
        validate_memory(cfg.params.M);
        if (c != "spectrum" && c != "beam") cfg.params.validate();
    } catch (const InvalidParameter& e) {
        return fail_invalid(e.what());
    }

    bool failed = false, warn = false;
    json out = json::array();
    for (Suite suite : suites) {
        SuiteResult s;
        try {
            s = suite(cfg);
        } catch (const InvalidParameter& e) {
            return fail_invalid(e.what());
        } catch (const DimensionError& e) {
            return fail_invalid(e.what());
        } catch (const Error& e) {
            s.name = "error";
            s.checks.push_back({"completed", false, 0.0, 0.0, "holds", true});
            s.warnings.push_back(e.what());
        }
        for (const auto& ch : s.checks)
            if (ch.asserted && !ch.passed) failed = true;
        warn = warn || s.warning_status;
        for (auto& [name, table] : s.tables) r.tables[s.name + "_" + name] = std::move(table);
        out.push_back(suite_json(s));
    }
    r.exit_code = failed ? exit_check_failed : (warn ? exit_warning : exit_ok);
    r.report["status"] = failed ? "fail" : (warn ? "warning" : "pass");
    r.report["exit_code"] = r.exit_code;
    r.report["suites"] = std::move(out);
    return r;
}

std::string format_csv(const CsvTable& table) {
    std::ostringstream os;
    for (std::size_t k = 0; k < table.header.size(); ++k) os << (k ? "," : "") << table.header[k];
    os << '\n';
    char buf[32];
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", row[k]);
            os << (k ? "," : "") << buf;
        }
        os << '\n';
    }
    return os.str();
}

void write_outputs(const RunResult& result, const std::string& out_dir, const std::string& timestamp) {
    std::filesystem::create_directories(out_dir);
    json report = result.report;
    report["header"]["timestamp"] = timestamp;
    std::ofstream(std::filesystem::path(out_dir) / "report.json") << report.dump(2) << '\n';
    for (const auto& [name, table] : result.tables)
        std::ofstream(std::filesystem::path(out_dir) / (name + ".csv")) << format_csv(table);
}

}  // namespace memwave
