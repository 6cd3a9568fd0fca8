#pragma once

#include <json.hpp>

#include "mlab/certificates.hpp"
#include "mlab/energy.hpp"
#include "mlab/minimizer.hpp"
#include "mlab/oracle.hpp"
#include "mlab/patterns.hpp"
#include "mlab/sweep.hpp"

// JSON views of the public result types. Every top-level document written by
// the CLI carries {"schema": "mlab/1"}.
namespace mlab {

using json = nlohmann::json;

// m = inf is written as the string "inf".
void to_json(json& j, const ModelParams& mp);
void from_json(const json& j, ModelParams& mp);
void to_json(json& j, const PatternParams& pp);
void to_json(json& j, const EnergyReport& r);
void to_json(json& j, const ScalingPrediction& p);
void to_json(json& j, const BlowupPrediction& b);
void to_json(json& j, const Equivalence& e);
void to_json(json& j, const BoundaryReport& r);
void to_json(json& j, const CertificateReport& r);
void to_json(json& j, const InterpolationReport& r);
void to_json(json& j, const IterateRecord& r);
// Fields themselves are written separately as GFLD/1 files.
void to_json(json& j, const MinimizeResult& r);
void to_json(json& j, const SweepSpec& s);
void to_json(json& j, const SweepRow& r);
void to_json(json& j, const SweepResult& r);
void to_json(json& j, const FitResult& f);

json with_schema(json body);

}  // namespace mlab
