#include <chrono>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "mmsgeo/common.hpp"
#include "mmsgeo/config.hpp"
#include "mmsgeo/tasks.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kVerdictFail = 2;
constexpr int kConfigError = 3;
constexpr int kRuntimeError = 4;

std::filesystem::path output_dir(const std::string& flag, const mmsgeo::app::Config& cfg) {
    if (!flag.empty()) return flag;
    if (!cfg.output.empty()) return cfg.output;
    if (const char* env = std::getenv("MMSGEO_OUT_DIR"); env && *env) return std::filesystem::path(env) / cfg.task;
    return std::filesystem::path("mmsgeo-out") / cfg.task;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mmsgeo;
    CLI::App cli{"Numerical geometry of metric measure spaces"};
    std::string task, config_path, out, space, level, suite_csv;
    unsigned workers = 0;
    std::uint64_t seed = 1;
    bool list = false;
    std::string tasks_help;
    for (const auto& t : app::task_names()) tasks_help += (tasks_help.empty() ? "" : ", ") + t;
    cli.add_option("task", task, "one of: " + tasks_help);
    cli.add_option("-c,--config", config_path, "YAML experiment config");
    cli.add_option("-o,--out", out, "output directory (default: config output, then $MMSGEO_OUT_DIR/<task>, then mmsgeo-out/<task>)");
    cli.add_option("-w,--workers", workers, "worker threads (0: all cores)");
    auto* seed_opt = cli.add_option("-s,--seed", seed, "random seed");
    cli.add_option("--space", space, "verify: preset name, YAML file or kind:key=value,...");
    cli.add_option("--level", level, "verify: quick or full")->check(CLI::IsMember({"quick", "full"}));
    cli.add_option("--suite", suite_csv, "repro: comma-separated suite names");
    cli.add_flag("--list-suites", list, "list repro suites and exit");
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? kPass : kConfigError;
    }

    if (list) {
        for (const auto& s : app::suites()) std::cout << s.name << "\t" << s.description << "\n";
        std::cout << "\nspace presets:";
        for (const auto& p : app::space_presets()) std::cout << " " << p;
        std::cout << "\n";
        return kPass;
    }

    app::Config cfg;
    try {
        if (task.empty()) throw Error(ErrorCode::Config, "no task given (see --help)");
        const auto& names = app::task_names();
        if (std::find(names.begin(), names.end(), task) == names.end()) {
            throw Error(ErrorCode::Config, "unknown task '" + task + "' (one of: " + tasks_help + ")");
        }
        if (!config_path.empty()) {
            cfg = app::load_config(config_path);
            if (!cfg.task.empty() && cfg.task != task) {
                throw Error(ErrorCode::Config, config_path + ": config is for task '" + cfg.task + "', not '" + task + "'");
            }
        } else if (task != "verify" && task != "repro") {
            throw Error(ErrorCode::Config, "task '" + task + "' needs --config");
        }
        cfg.task = task;
        if (!space.empty()) cfg.space = app::parse_space_argument(space);
        if (!level.empty()) cfg.verify.level = level;
        if (!suite_csv.empty()) {
            cfg.repro.suites.clear();
            std::stringstream ss(suite_csv);
            for (std::string s; std::getline(ss, s, ',');) cfg.repro.suites.push_back(s);
            (void)app::expand_suites(cfg.repro.suites);
        }
        if (task == "verify" && !cfg.space) throw Error(ErrorCode::Config, "verify needs --space or a config space section");
        if (seed_opt->count() > 0) {
            cfg.seed = seed;
            cfg.cheeger.family.seed = seed;
        }
    } catch (const Error& e) {
        std::cerr << "mmsgeo: config error: " << e.what() << "\n";
        return kConfigError;
    }

    set_workers(workers);
    const auto dir = output_dir(out, cfg);
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const Report report = app::run_task(cfg);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        auto record = app::run_record(cfg.task, cfg.source.empty() ? "<command line>" : cfg.source, cfg.text, cfg.seed,
                                      mmsgeo::workers(), wall);
        app::write_artifacts(dir, report, record);
        std::size_t informational = 0;
        for (const auto& v : report.verdicts) {
            if (v.informational) ++informational;
            if (!v.pass) {
                std::cout << (v.informational ? "INFO " : "FAIL ") << v.name << ": " << v.anchor << " measured "
                          << v.measured << " " << v.relation << " " << v.bound << " (tol " << v.tolerance << ")"
                          << (v.note.empty() ? "" : " [" + v.note + "]") << "\n";
            }
        }
        std::cout << report.title << ": " << report.verdicts.size() << " verdicts, " << report.failures()
                  << " failed, " << informational << " informational; " << wall << " s; artifacts in " << dir.string()
                  << "\n";
        return report.passed() ? kPass : kVerdictFail;
    } catch (const Error& e) {
        std::cerr << "mmsgeo: " << to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == ErrorCode::Config ? kConfigError : kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "mmsgeo: runtime error: " << e.what() << "\n";
        return kRuntimeError;
    }
}
