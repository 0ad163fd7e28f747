#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "haarfact/faithful.hpp"
#include "haarfact/operators.hpp"

namespace haarfact {

using Json = nlohmann::json;

// intervals travel as [level, pos]
Json interval_to_json(const DyadicInterval& I);
DyadicInterval interval_from_json(const Json& j);

// {"p": number | "inf", "rademacher": "constant" | "independent"}
Json spec_to_json(const SpaceSpec& spec);
SpaceSpec spec_from_json(const Json& j);

// {"ambient": N, "coeffs": [...]}
Json vector_to_json(const HaarVector& x);
HaarVector vector_from_json(const Json& j);

// {"format": "dense", "domain": n, "codomain": N, "data": [[row], ...]}
// with optional "norm_bound"; multipliers as {"format": "multiplier",
// "ambient": n, "entries": [...]}. The operator loader accepts both.
Json operator_to_json(const OperatorMatrix& T);
Json multiplier_to_json(const HaarMultiplier& M);
OperatorMatrix operator_from_json(const Json& j);
HaarMultiplier multiplier_from_json(const Json& j);

// {"n":, "ambient":, "blocks": [[{"interval": [l,p], "sign": s}, ...], ...]}
// blocks listed in iota order of the index tree
Json system_to_json(const AlmostFaithfulSystem& sys);
AlmostFaithfulSystem system_from_json(const Json& j);

Json certificate_to_json(const FactorizationCertificate& cert);
FactorizationCertificate certificate_from_json(const Json& j);

void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

// one row per interval: iota,level,pos,entry
std::string diagonal_csv(const OperatorMatrix& T);

}  // namespace haarfact
