#include "commands.hpp"

#include "vineuq/error.hpp"
#include "vineuq/fit.hpp"
#include "vineuq/kernels.hpp"
#include "vineuq/log.hpp"
#include "vineuq/models.hpp"
#include "vineuq/moments.hpp"
#include "vineuq/numerics.hpp"
#include "vineuq/pce.hpp"
#include "vineuq/reliability.hpp"
#include "vineuq/rng.hpp"
#include "vineuq/transform.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace vuq::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

template <class T>
T opt(const Json& o, const char* key, T fallback) {
    if (!o.contains(key) || o.at(key).is_null()) return fallback;
    try {
        return o.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("option '") + key + "': " + e.what());
    }
}

template <class T>
T required(const Json& o, const char* key) {
    if (!o.contains(key) || o.at(key).is_null()) throw ConfigError(std::string("missing required option '") + key + "'");
    return opt<T>(o, key, T{});
}

std::size_t count_opt(const Json& o, const char* key, std::size_t fallback) {
    if (!o.contains(key) || o.at(key).is_null()) return fallback;
    const Json& v = o.at(key);
    double d = 0.0;
    if (v.is_number())
        d = v.get<double>();
    else if (v.is_string())
        try {
            d = std::stod(v.get<std::string>());
        } catch (const std::exception&) {
            throw ConfigError(std::string("option '") + key + "' is not a number");
        }
    else
        throw ConfigError(std::string("option '") + key + "' is not a number");
    if (!(d >= 1.0) || d != std::floor(d) || d > 1e12)
        throw ConfigError(std::string("option '") + key + "' must be a positive integer");
    return static_cast<std::size_t>(d);
}

std::vector<std::string> string_list(const Json& o, const char* key) {
    if (!o.contains(key)) return {};
    const Json& v = o.at(key);
    std::vector<std::string> out;
    if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(item);
    } else if (v.is_array()) {
        for (const auto& x : v) out.push_back(x.is_string() ? x.get<std::string>() : x.dump());
    } else {
        throw ConfigError(std::string("option '") + key + "' must be a list");
    }
    return out;
}

std::vector<std::size_t> count_list(const Json& o, const char* key) {
    std::vector<std::size_t> out;
    for (const auto& s : string_list(o, key)) {
        Json tmp{{"v", s}};
        out.push_back(count_opt(tmp, "v", 1));
    }
    return out;
}

Direction parse_direction(const std::string& s) {
    if (s == "ge" || s == "GE" || s == ">=") return Direction::GE;
    if (s == "le" || s == "LE" || s == "<=") return Direction::LE;
    throw ConfigError("direction must be 'ge' or 'le', got '" + s + "'");
}

InputModel preset_or_file(const std::string& s) {
    if (s == "truss-indep" || s == "truss-gauss" || s == "truss-vine")
        return input_model_from_json(Json{{"preset", s}});
    return input_model_from_json(load_json_file(s));
}

Marginal named_marginal(const std::string& s) {
    if (s == "uniform" || s == "uniform01") return Marginal::uniform01();
    if (s == "normal" || s == "standard_normal") return Marginal::standard_normal();
    if (s == "gumbel-truss") return Marginal::gumbel_from_moments(kTrussLoadMean, kTrussLoadStd);
    throw ConfigError("unknown marginal name '" + s + "' (uniform, normal, gumbel-truss, or a JSON file)");
}

InputModel resolve_input(const Json& o) {
    if (o.contains("input")) {
        const Json& in = o.at("input");
        if (in.is_string()) return preset_or_file(in.get<std::string>());
        return input_model_from_json(in);
    }
    if (!o.contains("copula")) throw ConfigError("missing 'input' (input model) or 'copula' option");
    const Json& c = o.at("copula");
    std::optional<Copula> copula;
    if (c.is_string()) {
        const auto s = c.get<std::string>();
        if (s == "indep" || s == "independence")
        {
            const std::size_t m = count_opt(o, "m", 0);
            if (m == 0) throw ConfigError("independence copula needs option 'm' (dimension)");
            copula = IndependenceCopula{m};
        }
        else if (s == "truss-gauss")
            copula = truss_gaussian();
        else if (s == "truss-vine")
            copula = truss_vine();
        else
            copula = copula_from_json(load_json_file(s));
    } else {
        copula = copula_from_json(c);
    }
    const std::size_t m = copula->dimension();
    std::vector<Marginal> marginals;
    const Json mj = o.value("marginals", Json("uniform"));
    if (mj.is_array()) {
        for (const auto& x : mj) marginals.push_back(x.is_string() ? named_marginal(x.get<std::string>()) : marginal_from_json(x));
    } else if (mj.is_string()) {
        const auto s = mj.get<std::string>();
        if (s.size() > 5 && s.substr(s.size() - 5) == ".json") {
            for (const auto& x : load_json_file(s)) marginals.push_back(marginal_from_json(x));
        } else {
            marginals.assign(m, named_marginal(s));
        }
    } else {
        marginals.assign(m, marginal_from_json(mj));
    }
    return InputModel(std::move(marginals), *copula);
}

ModelPtr resolve_model(const Json& o, std::size_t dim) {
    const Json spec = o.value("model", Json("truss23"));
    if (spec.is_string()) {
        const auto name = spec.get<std::string>();
        if (name == "truss23") return std::make_shared<TrussModel>(TrussSpec::truss23(), 0.01, "truss23");
        if (name == "truss23-cm") return std::make_shared<TrussModel>(TrussSpec::truss23(), 1.0, "truss23-cm");
        if (name == "linear-sum") return std::make_shared<AnalyticModel>(AnalyticModel::linear_sum(std::vector<double>(dim, 1.0)));
        if (name == "product") return std::make_shared<AnalyticModel>(AnalyticModel::product(dim));
        if (name == "quadratic")
            return std::make_shared<AnalyticModel>(AnalyticModel::quadratic(Eigen::MatrixXd::Identity(
                static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))));
        if (name.rfind("external:", 0) == 0) return std::make_shared<ExternalModel>(ExternalModelSpec{name.substr(9), dim, 60.0, false});
        throw ConfigError("unknown model '" + name + "' (truss23, truss23-cm, linear-sum, product, quadratic, external:CMD)");
    }
    if (spec.contains("external")) {
        const Json& e = spec.at("external");
        ExternalModelSpec es;
        es.command = required<std::string>(e, "command");
        es.dimension = opt<std::size_t>(e, "dimension", dim);
        es.timeout_seconds = opt<double>(e, "timeout", 60.0);
        es.concurrent = opt<bool>(e, "concurrent", false);
        return std::make_shared<ExternalModel>(es);
    }
    if (spec.contains("analytic")) {
        const auto kind = required<std::string>(spec, "analytic");
        if (kind == "linear-sum")
            return std::make_shared<AnalyticModel>(AnalyticModel::linear_sum(opt<std::vector<double>>(spec, "weights", std::vector<double>(dim, 1.0))));
        if (kind == "product") return std::make_shared<AnalyticModel>(AnalyticModel::product(dim));
        throw ConfigError("unknown analytic model '" + kind + "'");
    }
    throw ConfigError("model must be a name or an object with 'external' or 'analytic'");
}

void check_model(const ComputationalModel& model, const InputModel& input) {
    if (model.dimension() != input.dimension())
        throw ConfigError("model dimension " + std::to_string(model.dimension()) + " does not match input dimension " +
                          std::to_string(input.dimension()));
}

std::vector<double> evaluate_batch(const ComputationalModel& model, const Matrix& x) {
    if (const auto* ext = dynamic_cast<const ExternalModel*>(&model)) return ext->evaluate_batch(x);
    return kernels::evaluate_rows(model, x);
}

std::vector<double> simulate(const InputModel& input, const ComputationalModel& model, std::size_t n,
                             std::uint64_t seed, bool sobol) {
    const auto source = make_source(sobol, input.dimension(), seed, Stream::Sampling);
    if (dynamic_cast<const ExternalModel*>(&model)) {
        const Matrix x = input.to_physical(kernels::sample_copula(input.copula(), n, *source));
        return evaluate_batch(model, x);
    }
    return kernels::simulate_responses(input, model, n, *source);
}

Json run_sample(const Json& o, std::uint64_t seed, std::optional<CsvTable>& table) {
    const InputModel input = resolve_input(o);
    const std::size_t n = count_opt(o, "n", 0);
    if (n == 0) throw ConfigError("missing required option 'n'");
    const bool sobol = opt<bool>(o, "sobol", false);
    const auto space = opt<std::string>(o, "space", "x");
    if (space != "x" && space != "u") throw ConfigError("space must be 'x' or 'u'");
    const auto source = make_source(sobol, input.dimension(), seed, Stream::Sampling);
    Matrix u = kernels::sample_copula(input.copula(), n, *source);
    table = CsvTable{default_columns(input.dimension(), space), space == "u" ? u : input.to_physical(u)};
    return Json{{"n", n}, {"dimension", input.dimension()}, {"space", space}, {"copula", input.copula().label()},
                {"sobol", sobol}};
}

Json run_fit(const Json& o, std::uint64_t seed) {
    const auto path = required<std::string>(o, "data");
    CsvTable data = read_csv_file(path);
    const auto kind = vine_kind_from_string(opt<std::string>(o, "kind", "cvine"));
    const Json po = o.value("pseudo_obs", Json("auto"));
    bool pseudo = false;
    if (po.is_boolean()) {
        pseudo = po.get<bool>();
    } else {
        const auto s = po.get<std::string>();
        if (s == "auto")
            pseudo = (data.values.array() <= 0.0).any() || (data.values.array() >= 1.0).any();
        else if (s == "true" || s == "yes")
            pseudo = true;
        else if (s == "false" || s == "no")
            pseudo = false;
        else
            throw ConfigError("pseudo_obs must be auto, true or false");
    }
    const Matrix u = pseudo ? pseudo_observations(data.values) : data.values;
    FitOptions fo;
    const auto fams = string_list(o, "families");
    if (!fams.empty()) {
        fo.candidates.clear();
        for (const auto& f : fams) fo.candidates.push_back(pair_family_from_string(f));
    }
    if (o.contains("order")) {
        std::vector<std::size_t> order;
        for (const auto& s : string_list(o, "order")) {
            Json tmp{{"v", s}};
            order.push_back(count_opt(tmp, "v", 1) - 1);
        }
        fo.order = order;
    }
    fo.global_refit = opt<bool>(o, "global_refit", false);
    fo.min_rows = opt<std::size_t>(o, "min_rows", 30);
    fo.seed = seed;
    const FitReport report = fit_vine(u, kind, fo);
    Json r = report;
    r["n"] = u.rows();
    r["pseudo_observations"] = pseudo;
    r["columns"] = data.columns;
    return r;
}

Json run_rosenblatt(const Json& o, std::optional<CsvTable>& table) {
    const InputModel input = resolve_input(o);
    const CsvTable data = read_csv_file(required<std::string>(o, "data"));
    const auto from = opt<std::string>(o, "from", "x");
    const auto to = opt<std::string>(o, "to", "z");
    const bool inverse = opt<bool>(o, "inverse", false);
    if ((from != "x" && from != "u") || (to != "z" && to != "w"))
        throw ConfigError("rosenblatt: from must be x|u and to must be z|w");
    if (static_cast<std::size_t>(data.values.cols()) != input.dimension())
        throw ConfigError("rosenblatt: data has " + std::to_string(data.values.cols()) + " columns, input model has " +
                          std::to_string(input.dimension()));
    const std::size_t m = input.dimension();
    std::vector<Marginal> targets(m, to == "z" ? Marginal::standard_normal() : Marginal::uniform01());
    std::vector<Marginal> sources(m, Marginal::uniform01());
    // Work through IsoTransform so z clamping and component errors behave identically.
    const IsoTransform t(from == "x" ? input : InputModel(sources, input.copula()), targets);
    const Matrix out = inverse ? t.inverse(data.values) : t.forward(data.values);
    table = CsvTable{default_columns(m, inverse ? from : to), out};
    return Json{{"rows", out.rows()}, {"from", inverse ? to : from}, {"to", inverse ? from : to},
                {"copula", input.copula().label()}, {"clamped", t.clamp_count()}};
}

MomentResult pce_estimate(const InputModel& input, const ModelPtr& model, std::size_t n, std::uint64_t seed,
                          const PceOptions& po, bool sobol, Json* pce_json) {
    const IsoTransform t(input);
    const Matrix z = standard_normal_design(n, input.dimension(), seed, sobol);
    const Matrix x = t.inverse(z);
    const auto y = evaluate_batch(*model, x);
    const PceModel p = pce_fit(z, y, po);
    const auto pm = pce_moments(p);
    if (pce_json) *pce_json = p;
    MomentResult r;
    r.mean = pm.mean;
    r.std = pm.std;
    r.cov_mean = kUndefined;
    r.cov_std = kUndefined;
    r.n_evals = n;
    r.method = MomentMethod::PCE;
    return r;
}

PceOptions pce_options(const Json& o) {
    PceOptions po;
    po.degree_max = opt<unsigned>(o, "degree_max", po.degree_max);
    po.q = opt<double>(o, "q", po.q);
    po.sparse = opt<bool>(o, "sparse", po.sparse);
    return po;
}

Json run_moments(const Json& o, std::uint64_t seed, std::optional<CsvTable>& table) {
    const InputModel input = resolve_input(o);
    const ModelPtr model = resolve_model(o, input.dimension());
    check_model(*model, input);
    const auto method = opt<std::string>(o, "method", "mcs");
    if (method != "mcs" && method != "pce") throw ConfigError("moments: method must be mcs or pce");
    const PceOptions po = pce_options(o);
    const bool sobol = opt<bool>(o, "sobol", method == "pce");

    const auto sweep = count_list(o, "sweep");
    if (!sweep.empty()) {
        double ref_mean = opt<double>(o, "reference_mean", kUndefined);
        double ref_std = opt<double>(o, "reference_std", kUndefined);
        Json ref;
        if (std::isnan(ref_mean) || std::isnan(ref_std)) {
            const std::size_t rn = count_opt(o, "reference_n", 1000000);
            const MomentResult mr = mc_moments(simulate(input, *model, rn, seed, false));
            ref_mean = mr.mean;
            ref_std = mr.std;
            ref = mr;
        }
        Matrix rows(static_cast<Eigen::Index>(sweep.size()), 5);
        for (std::size_t k = 0; k < sweep.size(); ++k) {
            const std::size_t n = sweep[k];
            const MomentResult r = method == "pce" ? pce_estimate(input, model, n, seed, po, sobol, nullptr)
                                                   : mc_moments(simulate(input, *model, n, seed, sobol));
            const auto i = static_cast<Eigen::Index>(k);
            rows(i, 0) = static_cast<double>(n);
            rows(i, 1) = r.mean;
            rows(i, 2) = r.std;
            rows(i, 3) = std::abs(r.mean - ref_mean) / std::abs(ref_mean);
            rows(i, 4) = std::abs(r.std - ref_std) / std::abs(ref_std);
        }
        table = CsvTable{{"n", "mean", "std", "rel_err_mean", "rel_err_std"}, rows};
        return Json{{"method", method}, {"sweep", sweep}, {"reference_mean", ref_mean}, {"reference_std", ref_std},
                    {"reference", ref}, {"model", model->name()}, {"copula", input.copula().label()}};
    }

    const std::size_t n = count_opt(o, "n", method == "pce" ? 200 : 100000);
    Json r;
    if (method == "mcs") {
        r = mc_moments(simulate(input, *model, n, seed, sobol));
    } else {
        Json pj;
        r = pce_estimate(input, model, n, seed, po, sobol, &pj);
        r["pce"] = pj;
    }
    r["model"] = model->name();
    r["copula"] = input.copula().label();
    return r;
}

Json run_reliability(const Json& o, std::uint64_t seed) {
    const InputModel input = resolve_input(o);
    const ModelPtr model = resolve_model(o, input.dimension());
    check_model(*model, input);
    const auto method = opt<std::string>(o, "method", "form");
    const double threshold = required<double>(o, "threshold");
    const Direction dir = parse_direction(opt<std::string>(o, "direction", "ge"));
    Json r{{"method", method}, {"copula", input.copula().label()}, {"model", model->name()},
           {"threshold", threshold}, {"direction", dir == Direction::GE ? "ge" : "le"}};

    if (method == "mcs") {
        const std::size_t n = count_opt(o, "n", 1000000);
        const FailureEstimate f = mc_failure_probability(simulate(input, *model, n, seed, false), threshold, dir);
        r["estimate"] = f.pf;
        r["cov"] = f.cov;
        r["n_evals"] = f.n;
        r["n_fail"] = f.n_fail;
        return r;
    }
    if (method != "form" && method != "is" && method != "form+is")
        throw ConfigError("reliability: method must be mcs, form, is or form+is");
    if (!model->thread_safe() && method != "form")
        log_info("external model evaluated serially");

    LimitState ls{std::make_shared<CompositionalModel>(model, IsoTransform(input)), threshold, dir};
    std::vector<double> z_star(input.dimension(), 0.0);
    std::size_t evals = 0;
    if (method == "form" || method == "form+is") {
        FormOptions fo;
        fo.max_iterations = opt<int>(o, "max_iterations", fo.max_iterations);
        fo.fd_step = opt<double>(o, "fd_step", fo.fd_step);
        const FormResult f = form(ls, fo);
        r["form"] = f;
        evals += f.n_evals;
        z_star = f.design_point_z;
        if (method == "form") {
            r["estimate"] = f.pf;
            r["cov"] = kUndefined;
            r["n_evals"] = f.n_evals;
            return r;
        }
    } else if (o.contains("design_point")) {
        z_star = opt<std::vector<double>>(o, "design_point", z_star);
        if (z_star.size() != input.dimension()) throw ConfigError("design_point has the wrong dimension");
    }
    IsOptions io;
    io.cov_target = opt<double>(o, "cov_target", io.cov_target);
    io.batch = count_opt(o, "batch", io.batch);
    io.n_max = count_opt(o, "n_max", io.n_max);
    io.seed = seed;
    const IsResult is = importance_sampling(ls, z_star, io);
    r["is"] = is;
    r["estimate"] = is.pf;
    r["cov"] = is.cov;
    r["n_evals"] = evals + is.n_evals;
    return r;
}

Json run_truss_bench(const Json& o, std::uint64_t seed) {
    const std::size_t n_moments = count_opt(o, "n_moments", 1000000);
    const std::size_t n_pf = count_opt(o, "n_pf", 10000000);
    const std::size_t pce_n = count_opt(o, "pce_n", 200);
    const std::size_t fit_n = count_opt(o, "fit_n", 300);
    const double threshold = opt<double>(o, "threshold", 11.0);
    const bool run_is = opt<bool>(o, "is", true);
    const PceOptions po = pce_options(o);
    auto copulas = string_list(o, "copulas");
    if (copulas.empty()) copulas = {"indep", "gauss", "vine", "vine-fitted"};

    const auto model = std::make_shared<TrussModel>(TrussSpec::truss23(), 1.0, "truss23-cm");
    Json out{{"units", "cm"}, {"threshold", threshold}, {"rows", Json::array()}};

    std::optional<VineModel> fitted;
    if (std::find(copulas.begin(), copulas.end(), "vine-fitted") != copulas.end()) {
        const PseudoRandomSource src(seed, Stream::Bootstrap);
        const Matrix u = kernels::sample_copula(truss_vine(), fit_n, src);
        FitOptions fo;
        if (opt<std::string>(o, "fit_structure", "heuristic") == "given")
            fo.order = std::vector<std::size_t>{0, 1, 2, 3, 4, 5};
        const FitReport rep = fit_vine(u, VineKind::CVine, fo);
        fitted = rep.model;
        out["fit"] = rep;
    }

    for (const auto& name : copulas) {
        TrussCopula choice;
        if (name == "indep")
            choice = TrussCopula::Independence;
        else if (name == "gauss")
            choice = TrussCopula::Gaussian;
        else if (name == "vine")
            choice = TrussCopula::Vine;
        else if (name == "vine-fitted")
            choice = TrussCopula::VineFitted;
        else
            throw ConfigError("truss-bench: unknown copula '" + name + "'");
        const InputModel input = make_truss_input(choice, fitted);
        Json row{{"copula", name}};

        const std::size_t n = std::max(n_moments, n_pf);
        const auto y = simulate(input, *model, n, seed, false);
        row["mcs_moments"] = mc_moments(std::span<const double>(y.data(), n_moments));
        row["mcs_pf"] = mc_failure_probability(std::span<const double>(y.data(), n_pf), threshold, Direction::GE);
        row["pce_moments"] = pce_estimate(input, model, pce_n, seed, po, true, nullptr);

        LimitState ls{std::make_shared<CompositionalModel>(model, IsoTransform(input)), threshold, Direction::GE};
        const FormResult f = form(ls);
        row["form"] = f;
        if (run_is) {
            IsOptions io;
            io.seed = seed;
            row["is"] = importance_sampling(ls, f.design_point_z, io);
        }
        out["rows"].push_back(row);
    }
    return out;
}

}  // namespace

bool is_presentation_key(const std::string& key) {
    return key == "output" || key == "result" || key == "threads" || key == "quiet" || key == "config";
}

Outcome run(const std::string& command, const Json& options) {
    if (!options.is_object()) throw ConfigError("configuration must be a JSON object");
    const auto seed = opt<std::uint64_t>(options, "seed", kDefaultSeed);
    Json hashed = Json::object();
    for (const auto& [k, v] : options.items())
        if (!is_presentation_key(k)) hashed[k] = v;
    hashed["command"] = command;
    hashed["seed"] = seed;

    Outcome out;
    Json result;
    if (command == "sample")
        result = run_sample(options, seed, out.table);
    else if (command == "fit")
        result = run_fit(options, seed);
    else if (command == "rosenblatt")
        result = run_rosenblatt(options, out.table);
    else if (command == "moments")
        result = run_moments(options, seed, out.table);
    else if (command == "reliability")
        result = run_reliability(options, seed);
    else if (command == "truss-bench")
        result = run_truss_bench(options, seed);
    else
        throw ConfigError("unknown command '" + command + "'");

    out.envelope = Json{{"schema_version", kSchemaVersion},
                        {"version", VINEUQ_VERSION},
                        {"command", command},
                        {"seed", seed},
                        {"config_hash", config_hash(hashed)},
                        {"config", hashed},
                        {"result", result}};
    return out;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kConfig;
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const StructuralError*>(&e)) return kNumerical;
    return kFailure;
}

}  // namespace vuq::cli
