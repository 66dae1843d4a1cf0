#include "vineuq/serialize.hpp"

#include "vineuq/error.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

namespace vuq {

namespace {

template <class Fn>
auto config_guard(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    } catch (const StructuralError& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out(v);
    for (auto& x : out) ++x;
    return out;
}

std::vector<std::size_t> zero_based(const Json& j, const char* what) {
    std::vector<std::size_t> out;
    for (const auto& x : j) {
        const auto v = x.get<long long>();
        if (v < 1) throw ConfigError(std::string(what) + ": indices are 1-based");
        out.push_back(static_cast<std::size_t>(v - 1));
    }
    return out;
}

}  // namespace

void to_json(Json& j, const Marginal& m) {
    j = Json{{"family", to_string(m.family())}, {"params", m.params()}};
}

void to_json(Json& j, const PairCopula& pc) {
    j = Json{{"family", to_string(pc.family())}, {"params", pc.params()}};
}

void to_json(Json& j, const VineModel& v) {
    Json trees = Json::array();
    for (std::size_t t = 0; t < v.trees().size(); ++t) {
        Json tree = Json::array();
        for (std::size_t e = 0; e < v.trees()[t].size(); ++e) {
            Json pc = v.trees()[t][e];
            if (v.kind() != VineKind::RVine) {
                const auto label = v.edge_label(t, e);
                std::vector<std::size_t> cond;
                for (std::size_t c : label.conditioned_on) cond.push_back(v.order()[c] + 1);
                pc["edge"] = {v.order()[label.first] + 1, v.order()[label.second] + 1};
                pc["given"] = cond;
            }
            tree.push_back(pc);
        }
        trees.push_back(tree);
    }
    j = Json{{"kind", to_string(v.kind())}, {"order", one_based(v.order())}, {"trees", trees}};
    if (v.kind() == VineKind::RVine) {
        Json s = Json::array();
        for (const auto& row : v.structure()) s.push_back(one_based(row));
        j["structure"] = s;
    }
}

void to_json(Json& j, const Copula& c) {
    std::visit(
        [&](const auto& impl) {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, IndependenceCopula>) {
                j = Json{{"type", "independence"}, {"dimension", impl.dimension}};
            } else if constexpr (std::is_same_v<T, GaussianCopula>) {
                j = Json{{"type", "gaussian"}, {"correlation", matrix_json(impl.correlation())}};
            } else {
                j = impl;
                j["type"] = "vine";
            }
        },
        c.variant());
}

void to_json(Json& j, const InputModel& im) {
    j = Json{{"marginals", im.marginals()}, {"copula", im.copula()}};
}

void to_json(Json& j, const PairFitRecord& r) {
    j = Json{{"tree", r.tree + 1},
             {"edge", r.edge + 1},
             {"family", to_string(r.family)},
             {"params", r.params},
             {"log_likelihood", r.log_likelihood},
             {"aic", r.aic}};
}

void to_json(Json& j, const FitReport& r) {
    j = Json{{"model", r.model},
             {"log_likelihood", r.log_likelihood},
             {"aic", r.aic},
             {"parameter_count", r.model.parameter_count()},
             {"per_pair", r.per_pair},
             {"structure_method", to_string(r.structure_method)},
             {"global_refit", r.global_refit},
             {"sequential_log_likelihood", r.sequential_log_likelihood}};
}

void to_json(Json& j, const MomentResult& r) {
    j = Json{{"mean", r.mean},         {"std", r.std},
             {"cov_mean", r.cov_mean}, {"cov_std", r.cov_std},
             {"n_evals", r.n_evals},   {"method", to_string(r.method)}};
    if (r.method == MomentMethod::MCS) j["cov_std_note"] = "exact only for normally distributed responses";
}

void to_json(Json& j, const FailureEstimate& r) {
    j = Json{{"pf", r.pf}, {"cov", r.cov}, {"n_evals", r.n}, {"n_fail", r.n_fail}};
}

void to_json(Json& j, const FormResult& r) {
    j = Json{{"design_point_z", r.design_point_z},
             {"beta", r.beta},
             {"pf", r.pf},
             {"iterations", r.iterations},
             {"n_evals", r.n_evals},
             {"converged", r.converged}};
    if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
}

void to_json(Json& j, const IsResult& r) {
    j = Json{{"pf", r.pf}, {"cov", r.cov}, {"n_evals", r.n_evals}, {"batches", r.batches}, {"n_fail", r.n_fail}};
}

void to_json(Json& j, const PceModel& p) {
    j = Json{{"dimension", p.dimension},
             {"degree", p.degree},
             {"q", p.q},
             {"loo_error", p.loo_error},
             {"sparse", p.sparse},
             {"indices", p.indices},
             {"coefficients", p.coefficients}};
}

void to_json(Json& j, const TrussSpec& s) {
    Json bars = Json::array(), sups = Json::array();
    for (const auto& b : s.bars)
        bars.push_back({{"nodes", {b.node_a + 1, b.node_b + 1}}, {"area", b.area}, {"youngs", b.youngs}});
    for (const auto& sp : s.supports)
        sups.push_back({{"node", sp.node + 1}, {"fixed_x", sp.fixed_x}, {"fixed_y", sp.fixed_y}});
    j = Json{{"nodes", s.nodes}, {"bars", bars}, {"supports", sups}, {"load_nodes", one_based(s.load_nodes)}};
}

Marginal marginal_from_json(const Json& j) {
    return config_guard("marginal", [&] {
        const auto family = marginal_family_from_string(j.at("family").get<std::string>());
        if (j.contains("params")) return Marginal(family, j.at("params").get<std::vector<double>>());
        switch (family) {
            case MarginalFamily::Uniform01: return Marginal::uniform01();
            case MarginalFamily::StandardNormal: return Marginal::standard_normal();
            case MarginalFamily::Normal: return Marginal::normal(j.at("mean").get<double>(), j.at("std").get<double>());
            case MarginalFamily::Gumbel:
                return Marginal::gumbel_from_moments(j.at("mean").get<double>(), j.at("std").get<double>());
            case MarginalFamily::Lognormal: {
                const double mean = j.at("mean").get<double>();
                const double cov = j.contains("cov") ? j.at("cov").get<double>() : j.at("std").get<double>() / mean;
                return Marginal::lognormal_from_moments(mean, cov);
            }
        }
        throw ConfigError("marginal: unknown family");
    });
}

PairCopula pair_copula_from_json(const Json& j) {
    return config_guard("pair copula", [&] {
        const auto family = pair_family_from_string(j.at("family").get<std::string>());
        return PairCopula(family, j.value("params", std::vector<double>{}));
    });
}

VineModel vine_from_json(const Json& j) {
    return config_guard("vine", [&] {
        const auto kind = vine_kind_from_string(j.at("kind").get<std::string>());
        const auto order = zero_based(j.at("order"), "vine order");
        std::vector<std::vector<PairCopula>> trees;
        for (const auto& tree : j.at("trees")) {
            std::vector<PairCopula> row;
            for (const auto& pc : tree) row.push_back(pair_copula_from_json(pc));
            trees.push_back(std::move(row));
        }
        if (kind == VineKind::RVine) {
            std::vector<std::vector<std::size_t>> structure;
            for (const auto& row : j.at("structure")) structure.push_back(zero_based(row, "vine structure"));
            return VineModel::rvine(order, trees, structure);
        }
        return VineModel(kind, order, trees);
    });
}

Copula copula_from_json(const Json& j) {
    return config_guard("copula", [&]() -> Copula {
        const auto type = j.at("type").get<std::string>();
        if (type == "independence" || type == "indep") return IndependenceCopula{j.at("dimension").get<std::size_t>()};
        if (type == "gaussian" || type == "gauss") {
            const auto rows = j.at("correlation").get<std::vector<std::vector<double>>>();
            const auto m = static_cast<Eigen::Index>(rows.size());
            Eigen::MatrixXd r(m, m);
            for (Eigen::Index a = 0; a < m; ++a) {
                if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(a)].size()) != m)
                    throw ConfigError("copula: correlation matrix is not square");
                for (Eigen::Index b = 0; b < m; ++b) r(a, b) = rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            }
            return GaussianCopula(r);
        }
        if (type == "vine") return vine_from_json(j);
        throw ConfigError("copula: unknown type '" + type + "'");
    });
}

InputModel input_model_from_json(const Json& j) {
    return config_guard("input model", [&] {
        if (j.contains("preset")) {
            const auto p = j.at("preset").get<std::string>();
            if (p == "truss-indep") return make_truss_input(TrussCopula::Independence);
            if (p == "truss-gauss") return make_truss_input(TrussCopula::Gaussian);
            if (p == "truss-vine") return make_truss_input(TrussCopula::Vine);
            throw ConfigError("input model: unknown preset '" + p + "'");
        }
        std::vector<Marginal> marginals;
        for (const auto& m : j.at("marginals")) marginals.push_back(marginal_from_json(m));
        return InputModel(std::move(marginals), copula_from_json(j.at("copula")));
    });
}

PceModel pce_from_json(const Json& j) {
    return config_guard("pce model", [&] {
        PceModel p;
        p.dimension = j.at("dimension").get<std::size_t>();
        p.degree = j.at("degree").get<unsigned>();
        p.q = j.at("q").get<double>();
        p.loo_error = j.value("loo_error", 0.0);
        p.sparse = j.value("sparse", true);
        p.indices = j.at("indices").get<std::vector<MultiIndex>>();
        p.coefficients = j.at("coefficients").get<std::vector<double>>();
        if (p.indices.size() != p.coefficients.size())
            throw ConfigError("pce model: indices and coefficients differ in length");
        for (const auto& a : p.indices)
            if (a.size() != p.dimension) throw ConfigError("pce model: multi-index dimension mismatch");
        return p;
    });
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open JSON file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write JSON file '" + path + "'");
    out << j.dump(2) << '\n';
}

std::string config_hash(const Json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace vuq
