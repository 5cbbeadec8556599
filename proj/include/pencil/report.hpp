#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pencil/bloch.hpp"
#include "pencil/coefficients.hpp"
#include "pencil/floquet.hpp"
#include "pencil/oracle.hpp"
#include "pencil/predictor.hpp"
#include "pencil/scattering.hpp"

namespace pencil::report {

using json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;
inline constexpr const char* kToolVersion = "0.3.0";

// %.17g
std::string num(double v);

json complex_json(cd z);
json to_json(const Monodromy& m);
json to_json(const PerturbationCoeffs& pc);
json to_json(const ScatteringData& sd);
json to_json(const DiscreteMode& m, bool with_samples = false);
json to_json(const IsolatedSeries& s);
json to_json(const EmergencePrediction& e);
json to_json(const OracleResult& r);
json to_json(const DefectReport& d);
json to_json(const Winding& w);
json to_json(const Enclosure& e);

// Compact JSON with every double printed at 17 significant digits, keys in insertion order.
std::string dump(const json& j);

// Wraps a body with schema, tool version, report kind and resolved tolerances.
json wrap(const std::string& kind, const json& tolerances, json body);

std::string csv_field(const std::string& s);  // RFC 4180 quoting when needed
std::string bands_csv(const std::vector<BandCurve>& curves);
std::string bands_svg(const std::vector<BandCurve>& curves);
std::string eigenfunction_csv(const OracleResult& r);
std::string scattering_csv(const JostSolutions& js, const ScatteringData& sd);

// Writes all files into dir via temporary names and renames, so a failure before
// this call leaves nothing behind.
void write_files(const std::string& dir, const std::map<std::string, std::string>& files);

}  // namespace pencil::report
