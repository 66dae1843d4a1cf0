#include "commands.hpp"

#include "vineuq/error.hpp"
#include "vineuq/kernels.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using vuq::Json;

enum class Kind { Str, Int, Real, Flag, List };

struct OptDef {
    const char* flag;
    const char* key;
    Kind kind;
    const char* help;
};

// Options shared by every subcommand.
const std::vector<OptDef> kCommon = {
    {"--config", "config", Kind::Str, "JSON config file; command-line flags override its entries"},
    {"--seed", "seed", Kind::Int, "64-bit run seed (default 1)"},
    {"--output,-o", "output", Kind::Str, "primary output file (JSON or CSV); stdout if omitted"},
    {"--result", "result", Kind::Str, "also write the result JSON envelope here (table commands)"},
    {"--threads", "threads", Kind::Int, "OpenMP thread count (overrides VINEUQ_NUM_THREADS)"},
};

const std::vector<OptDef> kInput = {
    {"--input", "input", Kind::Str, "input model JSON file or preset (truss-indep, truss-gauss, truss-vine)"},
    {"--copula", "copula", Kind::Str, "indep, truss-gauss, truss-vine, or copula JSON file"},
    {"--marginals", "marginals", Kind::Str, "uniform, normal, gumbel-truss, or marginals JSON file"},
    {"--m", "m", Kind::Int, "dimension for the independence copula"},
};

const std::vector<OptDef> kModel = {
    {"--model", "model", Kind::Str, "truss23 (metres), truss23-cm, linear-sum, product, quadratic, external:CMD"},
};

const std::map<std::string, std::pair<std::string, std::vector<OptDef>>> kCommands = {
    {"sample",
     {"draw samples from an input model",
      {{"--n", "n", Kind::Int, "number of samples"},
       {"--space", "space", Kind::Str, "x (physical, default) or u (copula scale)"},
       {"--sobol", "sobol", Kind::Flag, "use the Sobol sequence instead of pseudo-random numbers"}}}},
    {"fit",
     {"fit a C- or D-vine to a CSV sample",
      {{"--data", "data", Kind::Str, "CSV file with a header row"},
       {"--kind", "kind", Kind::Str, "cvine (default) or dvine"},
       {"--families", "families", Kind::List, "candidate families (independence,gaussian,gumbel_hougaard)"},
       {"--order", "order", Kind::List, "given variable order, 1-based"},
       {"--global-refit", "global_refit", Kind::Flag, "refit all parameters jointly after sequential fitting"},
       {"--pseudo-obs", "pseudo_obs", Kind::Str, "auto (default), true or false"},
       {"--min-rows", "min_rows", Kind::Int, "minimum sample size (default 30)"}}}},
    {"rosenblatt",
     {"apply the Rosenblatt / isoprobabilistic transform to a CSV sample",
      {{"--data", "data", Kind::Str, "CSV file with a header row"},
       {"--from", "from", Kind::Str, "x (default) or u"},
       {"--to", "to", Kind::Str, "z (default) or w"},
       {"--inverse", "inverse", Kind::Flag, "map z/w back to x/u"}}}},
    {"moments",
     {"estimate response mean and standard deviation",
      {{"--method", "method", Kind::Str, "mcs (default) or pce"},
       {"--n", "n", Kind::Int, "sample or design size"},
       {"--degree-max", "degree_max", Kind::Int, "maximum PCE degree (default 10)"},
       {"--q", "q", Kind::Real, "hyperbolic truncation norm (default 0.75)"},
       {"--ols", "sparse", Kind::Flag, "full-basis least squares instead of sparse regression"},
       {"--sobol", "sobol", Kind::Flag, "Sobol points (default for pce)"},
       {"--sweep", "sweep", Kind::List, "convergence sweep sizes; writes a CSV of (n, error)"},
       {"--reference-mean", "reference_mean", Kind::Real, "reference mean for the sweep"},
       {"--reference-std", "reference_std", Kind::Real, "reference standard deviation for the sweep"},
       {"--reference-n", "reference_n", Kind::Int, "MC size for the sweep reference (default 1e6)"}}}},
    {"reliability",
     {"estimate a failure probability",
      {{"--method", "method", Kind::Str, "mcs, form (default), is, form+is"},
       {"--threshold", "threshold", Kind::Real, "response threshold y*"},
       {"--direction", "direction", Kind::Str, "ge (default: failure when y >= y*) or le"},
       {"--n", "n", Kind::Int, "MC sample size"},
       {"--cov-target", "cov_target", Kind::Real, "IS stopping CoV (default 0.1)"},
       {"--batch", "batch", Kind::Int, "IS batch size (default 100)"},
       {"--n-max", "n_max", Kind::Int, "IS evaluation budget (default 1e5)"},
       {"--design-point", "design_point", Kind::List, "IS centre in z-space (method is)"},
       {"--max-iterations", "max_iterations", Kind::Int, "FORM iteration limit (default 100)"},
       {"--fd-step", "fd_step", Kind::Real, "FORM finite-difference step (default 1e-4)"}}}},
    {"truss-bench",
     {"truss moments and failure probabilities for all load couplings",
      {{"--n-moments", "n_moments", Kind::Int, "MC size for moments (default 1e6)"},
       {"--n-pf", "n_pf", Kind::Int, "MC size for failure probabilities (default 1e7)"},
       {"--pce-n", "pce_n", Kind::Int, "PCE design size (default 200)"},
       {"--fit-n", "fit_n", Kind::Int, "sample size for the fitted vine (default 300)"},
       {"--fit-structure", "fit_structure", Kind::Str, "heuristic (default) or given"},
       {"--threshold", "threshold", Kind::Real, "deflection threshold in cm (default 11)"},
       {"--copulas", "copulas", Kind::List, "subset of indep,gauss,vine,vine-fitted"}}}},
};

Json convert(const std::string& value, Kind kind, const std::string& key) {
    try {
        switch (kind) {
            case Kind::Str: return value;
            case Kind::Int: {
                std::size_t pos = 0;
                const double d = std::stod(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
                if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
                return d;
            }
            case Kind::Real: {
                std::size_t pos = 0;
                const double d = std::stod(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
                return d;
            }
            case Kind::Flag: return true;
            case Kind::List: return value;
        }
    } catch (const std::exception&) {
        throw vuq::ConfigError("option --" + key + ": cannot parse '" + value + "'");
    }
    return value;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw vuq::ConfigError("cannot write '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vineuq: vine-copula uncertainty quantification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(VINEUQ_VERSION));

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::map<std::string, std::vector<std::pair<const OptDef*, CLI::Option*>>> registered;

    std::vector<std::string> all_commands;
    for (const auto& [name, def] : kCommands) all_commands.push_back(name);
    all_commands.push_back("run");

    std::string run_command;
    for (const auto& name : all_commands) {
        const bool is_run = name == "run";
        CLI::App* sub = app.add_subcommand(
            name, is_run ? "run a command from a JSON config ({\"command\": ..., options})" : kCommands.at(name).first);
        std::vector<const OptDef*> defs;
        for (const auto& d : kCommon) defs.push_back(&d);
        if (!is_run) {
            if (name != "fit" && name != "truss-bench")
                for (const auto& d : kInput) defs.push_back(&d);
            if (name == "moments" || name == "reliability")
                for (const auto& d : kModel) defs.push_back(&d);
            for (const auto& d : kCommands.at(name).second) defs.push_back(&d);
        } else {
            sub->add_option("--command", run_command, "command to run (overrides the config's 'command')");
        }
        for (const OptDef* d : defs) {
            CLI::Option* o = d->kind == Kind::Flag ? sub->add_flag(d->flag, flags[name][d->key], d->help)
                                                   : sub->add_option(d->flag, values[name][d->key], d->help);
            registered[name].emplace_back(d, o);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : vuq::cli::kConfig;
    }

    std::string command;
    for (const auto& name : all_commands)
        if (app.got_subcommand(name)) command = name;

    try {
        Json options = Json::object();
        const auto& cfg_path = values[command]["config"];
        if (!cfg_path.empty()) {
            options = vuq::load_json_file(cfg_path);
            if (!options.is_object()) throw vuq::ConfigError(cfg_path + ": config must be a JSON object");
        }
        for (const auto& [def, opt] : registered[command]) {
            if (opt->count() == 0 || std::string(def->key) == "config") continue;
            if (def->kind == Kind::Flag) {
                // --ols switches the sparse solver off.
                options[def->key] = std::string(def->key) == "sparse" ? false : true;
            } else {
                options[def->key] = convert(values[command][def->key], def->kind, def->key);
            }
        }
        if (command == "run") {
            if (!run_command.empty()) options["command"] = run_command;
            if (!options.contains("command")) throw vuq::ConfigError("run: config has no 'command' entry");
            command = options.at("command").get<std::string>();
            options.erase("command");
        }

        vuq::kernels::configure_threads_from_env();
#ifdef _OPENMP
        if (options.contains("threads")) omp_set_num_threads(options.at("threads").get<int>());
#endif
        const vuq::cli::Outcome out = vuq::cli::run(command, options);
        const std::string output = options.value("output", std::string());
        if (out.table) {
            std::ostringstream csv;
            vuq::write_csv(csv, out.table->columns, out.table->values);
            write_text(output, csv.str());
            const std::string result = options.value("result", std::string());
            if (!result.empty()) write_text(result, out.envelope.dump(2) + "\n");
        } else {
            write_text(output, out.envelope.dump(2) + "\n");
        }
        return vuq::cli::kOk;
    } catch (const std::exception& e) {
        const int code = vuq::cli::exit_code_for(e);
        Json err{{"error", {{"command", command}, {"message", e.what()}, {"exit_code", code}}}};
        std::cerr << err.dump() << '\n';
        return code;
    }
}
