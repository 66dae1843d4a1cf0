#pragma once

#include "vineuq/fit.hpp"
#include "vineuq/margins.hpp"
#include "vineuq/models.hpp"
#include "vineuq/moments.hpp"
#include "vineuq/paircop.hpp"
#include "vineuq/pce.hpp"
#include "vineuq/reliability.hpp"
#include "vineuq/vine.hpp"

#include <json.hpp>

#include <string>

namespace vuq {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Variable indices in JSON (vine order, edge labels) are 1-based.

void to_json(Json& j, const Marginal& m);
void to_json(Json& j, const PairCopula& pc);
void to_json(Json& j, const VineModel& v);
void to_json(Json& j, const Copula& c);
void to_json(Json& j, const InputModel& im);
void to_json(Json& j, const PairFitRecord& r);
void to_json(Json& j, const FitReport& r);
void to_json(Json& j, const MomentResult& r);
void to_json(Json& j, const FailureEstimate& r);
void to_json(Json& j, const FormResult& r);
void to_json(Json& j, const IsResult& r);
void to_json(Json& j, const PceModel& p);
void to_json(Json& j, const TrussSpec& s);

/// Accepts {"family", "params"} or moment form {"family", "mean", "std"}
/// (lognormal: "mean" and "cov" or "std").
Marginal marginal_from_json(const Json& j);
PairCopula pair_copula_from_json(const Json& j);
VineModel vine_from_json(const Json& j);
Copula copula_from_json(const Json& j);
/// Either {"marginals", "copula"} or {"preset": "truss-indep" | "truss-gauss" | "truss-vine"}.
InputModel input_model_from_json(const Json& j);
PceModel pce_from_json(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

/// FNV-1a 64 of the canonical (key-sorted, compact) dump, as 16 hex digits.
std::string config_hash(const Json& j);

}  // namespace vuq
