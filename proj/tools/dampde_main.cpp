#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dampde/dampde.h"

namespace {

namespace fs = std::filesystem;

struct Args {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    bool svg = false;
    bool dump_fields = false;
    int n = 0;
    long long m = 0;
    std::string m_list;
    std::string n_list;
};

int fail(int code, const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return code;
}

// Exit 2 is bad input, exit 1 is a numerical failure at run time.
int exit_code(dampde_status status) {
    switch (status) {
    case DAMPDE_OK:
        return 0;
    case DAMPDE_ERR_NUMERIC:
        return 1;
    case DAMPDE_ERR_CONFIG:
    case DAMPDE_ERR_INVALID_ARGUMENT:
        return 2;
    }
    return 2;
}

class JobHandle {
public:
    JobHandle() : job_(dampde_job_create()) {}
    ~JobHandle() { dampde_job_destroy(job_); }
    JobHandle(const JobHandle&) = delete;
    JobHandle& operator=(const JobHandle&) = delete;
    dampde_job* get() const { return job_; }

private:
    dampde_job* job_;
};

int run_mode(const std::string& mode, const Args& args) {
    std::string config_text;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path, std::ios::binary);
        if (!in) {
            return fail(2, "cannot open config file \"" + args.config_path + "\"");
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        config_text = buf.str();
    }

    fs::path out_dir = args.out_dir;
    if (out_dir.empty()) {
        if (const char* env = std::getenv("DAMPDE_OUT"); env != nullptr && *env != '\0') {
            out_dir = env;
        } else {
            out_dir = ".";
        }
    }

    JobHandle job;
    if (job.get() == nullptr) {
        return fail(1, dampde_last_error());
    }
    if (!config_text.empty() &&
        dampde_job_set_config_json(job.get(), config_text.c_str()) != DAMPDE_OK) {
        return fail(2, dampde_last_error());
    }

    const auto set_option = [&](const char* key, const std::string& value) {
        return dampde_job_set_option(job.get(), key, value.c_str()) == DAMPDE_OK;
    };
    bool options_ok = set_option("threads", std::to_string(args.threads));
    if (args.svg) {
        options_ok = options_ok && set_option("svg", "true");
    }
    if (args.dump_fields) {
        options_ok = options_ok && set_option("dump-fields", "true");
    }
    if (args.n > 0) {
        options_ok = options_ok && set_option("n", std::to_string(args.n));
    }
    if (args.m > 0) {
        options_ok = options_ok && set_option("m", std::to_string(args.m));
    }
    if (!args.m_list.empty()) {
        options_ok = options_ok && set_option("m-list", args.m_list);
    }
    if (!args.n_list.empty()) {
        options_ok = options_ok && set_option("n-list", args.n_list);
    }
    if (!options_ok) {
        return fail(2, dampde_last_error());
    }

    const dampde_status status = dampde_job_run(job.get(), mode.c_str());
    if (status == DAMPDE_ERR_CONFIG || status == DAMPDE_ERR_INVALID_ARGUMENT) {
        return fail(2, dampde_last_error());
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        return fail(2, "cannot create output directory \"" + out_dir.string() +
                           "\": " + ec.message());
    }
    for (size_t i = 0; i < dampde_job_output_count(job.get()); ++i) {
        const fs::path path = out_dir / dampde_job_output_name(job.get(), i);
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            return fail(2, "cannot write output file \"" + path.string() + "\"");
        }
        out << dampde_job_output_text(job.get(), i);
        if (!out.good()) {
            return fail(2, "cannot write output file \"" + path.string() + "\"");
        }
        std::cout << "wrote " << path.string() << "\n";
    }
    std::cout << dampde_job_summary(job.get());

    if (status != DAMPDE_OK) {
        return fail(exit_code(status), dampde_last_error());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled elliptic/evolution solver, convergence studies, and "
                 "tracking-type optimal control"};
    app.set_version_flag("--version", dampde_version());
    app.require_subcommand(1);

    Args args;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON configuration file");
        sub->add_option("--out", args.out_dir,
                        "output directory (default: $DAMPDE_OUT or the working directory)");
        sub->add_option("--threads", args.threads,
                        "worker threads for study cells (0 = one per hardware thread)");
        return sub;
    };

    CLI::App* simulate = add_common(app.add_subcommand(
        "simulate", "run one forward solve and write an error/diagnostics row"));
    simulate->add_option("--n", args.n, "mesh resolution override");
    simulate->add_option("--m", args.m, "time step count override");
    simulate->add_flag("--dump-fields", args.dump_fields,
                       "also write per-interval nodal snapshots of both fields");

    CLI::App* conv_time = add_common(app.add_subcommand(
        "convergence-time", "error study under time refinement at fixed resolution"));
    conv_time->add_option("--n", args.n, "fixed mesh resolution");
    conv_time->add_option("--m-list", args.m_list, "comma-separated step counts");
    conv_time->add_flag("--svg", args.svg, "also write a log-log plot");

    CLI::App* conv_space = add_common(app.add_subcommand(
        "convergence-space", "error study under mesh refinement at fixed step count"));
    conv_space->add_option("--m", args.m, "fixed time step count");
    conv_space->add_option("--n-list", args.n_list, "comma-separated mesh resolutions");
    conv_space->add_flag("--svg", args.svg, "also write a log-log plot");

    CLI::App* optimize = add_common(app.add_subcommand(
        "optimize", "solve the tracking-type control problem once"));
    optimize->add_option("--n", args.n, "mesh resolution override");
    optimize->add_option("--m", args.m, "time step count override");

    CLI::App* opt_conv = add_common(app.add_subcommand(
        "optimize-convergence", "control error study under time or space refinement"));
    opt_conv->add_option("--n", args.n, "fixed resolution (time sweeps) or override");
    opt_conv->add_option("--m", args.m, "fixed step count (space sweeps) or override");
    opt_conv->add_option("--m-list", args.m_list, "comma-separated step counts (time sweep)");
    opt_conv->add_option("--n-list", args.n_list, "comma-separated resolutions (space sweep)");
    opt_conv->add_flag("--svg", args.svg, "also write a log-log plot");

    add_common(app.add_subcommand("verify", "run the built-in invariant suites"));

    CLI11_PARSE(app, argc, argv);

    const std::string mode = app.get_subcommands().front()->get_name();
    try {
        return run_mode(mode, args);
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }
}
