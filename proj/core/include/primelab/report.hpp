#pragma once

// JSON and CSV serialization of run reports, distributions and experiment results.
//
// Every JSON object produced here carries "schema_version".  Doubles are written
// in shortest round-trip form and exact rationals as "num/den" strings, so a report
// parsed back compares equal to the original.  CSV distributions have the fixed
// header "prime,mass".

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "primelab/exactdist.hpp"
#include "primelab/generators.hpp"
#include "primelab/harness.hpp"

namespace primelab {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

Json to_json(const GenConfig& cfg);
GenConfig config_from_json(const Json& j);

Json to_json(const Telemetry& t);
Telemetry telemetry_from_json(const Json& j);

Json to_json(const DistMetrics<double>& m);
Json to_json(const DistMetrics<Rational>& m);
DistMetrics<double> metrics_from_json(const Json& j);

Json to_json(const RunReport& r);
RunReport run_report_from_json(const Json& j);

/// A JSON array of reports; empty input gives [].
Json to_json(const std::vector<RunReport>& reports);
std::vector<RunReport> run_reports_from_json(const Json& j);

Json to_json(const GenConfig& cfg, const GenResult& r);
Json to_json(const GapCensus& c);
Json to_json(const PrimeIncAudit& a);
Json to_json(const ErrorProfile& p);
Json to_json(const ErrorRangeProfile& p);

template <class Real>
Json to_json(const ExactDist<Real>& d, std::string_view algorithm);

/// One row per outcome in ascending prime order, explicit zeros included.
template <class Real>
void write_csv(std::ostream& os, const FiniteDist<Real>& dist);

/// Writes `text` to `path` ("-" means stdout).  Throws IoError naming the path.
void write_output(const std::string& path, const std::string& text);

/// Throws IoError naming the path on open or parse failure.
Json read_json_file(const std::string& path);

}  // namespace primelab
