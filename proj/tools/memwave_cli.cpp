#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "memwave/cli.hpp"
#include "memwave/error.hpp"

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void apply_thread_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("MEMWAVE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_env();
    CLI::App app{"memwave: spectral analysis, moment-method control synthesis and simulation of a wave equation "
                 "with memory under a moving control"};
    std::string command, config_path, out_dir, eps_list;
    std::uint64_t seed = 0;
    double M = 0, c = 0, T = 0, reg = 0;
    int N = 0, Nt = 0, N_prod = 0;
    app.add_option("command", command, "spectrum | gaps | riesz | biorth | control | simulate | beam | verify-all");
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory");
    auto* o_seed = app.add_option("--seed", seed, "seed for every randomized check");
    auto* o_M = app.add_option("--M", M, "memory parameter");
    auto* o_c = app.add_option("--c", c, "control velocity");
    auto* o_T = app.add_option("--T", T, "time horizon");
    auto* o_N = app.add_option("--N", N, "mode truncation");
    auto* o_Nt = app.add_option("--Nt", Nt, "time steps");
    auto* o_reg = app.add_option("--reg", reg, "Gram regularization");
    auto* o_np = app.add_option("--N-prod", N_prod, "product truncation");
    app.add_option("--eps-sweep", eps_list, "comma-separated beam epsilons");
    CLI11_PARSE(app, argc, argv);

    memwave::RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw memwave::InvalidParameter("cannot open config file " + config_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw memwave::InvalidParameter(std::string("config is not valid JSON: ") + e.what());
            }
            cfg = memwave::config_from_json(j);
        }
        if (!command.empty()) cfg.command = command;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (*o_seed) cfg.seed = seed;
        if (*o_M) cfg.params.M = M;
        if (*o_c) cfg.params.c = c;
        if (*o_T) cfg.params.T = T;
        if (*o_N) cfg.params.N = N;
        if (*o_Nt) cfg.N_t = Nt;
        if (*o_reg) cfg.reg = reg;
        if (*o_np) cfg.N_prod = N_prod;
        if (!eps_list.empty()) {
            cfg.eps_sweep.clear();
            std::stringstream ss(eps_list);
            for (std::string tok; std::getline(ss, tok, ',');) cfg.eps_sweep.push_back(std::stod(tok));
        }
        if (cfg.y0.N() > 0 && cfg.y0.N() != cfg.params.N) cfg.y0 = cfg.y0.resized(cfg.params.N);
        if (cfg.y1.N() > 0 && cfg.y1.N() != cfg.params.N) cfg.y1 = cfg.y1.resized(cfg.params.N);
    } catch (const std::exception& e) {
        std::cerr << "memwave: " << e.what() << '\n';
        return memwave::exit_invalid;
    }

    const memwave::RunResult result = memwave::run(cfg);
    memwave::write_outputs(result, cfg.out_dir, utc_timestamp());
    if (result.report.contains("error")) std::cerr << "memwave: " << result.report["error"].get<std::string>() << '\n';
    std::cout << "memwave " << cfg.command << ": " << result.report["status"].get<std::string>() << " (report in "
              << cfg.out_dir << "/report.json)\n";
    return result.exit_code;
}
