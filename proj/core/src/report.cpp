#include "primelab/report.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "primelab/errors.hpp"

namespace primelab {

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> optional_from(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<T>();
}

Json mass_json(double v) { return v; }
Json mass_json(const Rational& v) { return v.get_str(); }

Json versioned(std::string_view kind) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    return j;
}

void check_schema(const Json& j) {
    if (!j.is_object() || !j.contains("schema_version")) {
        throw DomainError("report JSON lacks schema_version");
    }
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
        throw DomainError("unsupported schema_version " + j.at("schema_version").dump());
    }
}

}  // namespace

Json to_json(const GenConfig& cfg) {
    Json j;
    j["algorithm"] = to_string(cfg.algorithm);
    j["x"] = cfg.x;
    j["epsilon"] = optional_json(cfg.epsilon);
    j["modulus_mode"] = to_string(cfg.modulus_mode);
    j["q"] = optional_json(cfg.q);
    j["A"] = optional_json(cfg.A);
    j["T"] = optional_json(cfg.T_override);
    j["seed"] = cfg.seed;
    j["primality"] = {
        {"kind", cfg.primality.kind == PrimalityPolicy::Kind::Exact ? "exact" : "miller-rabin"},
        {"rounds", cfg.primality.rounds},
        {"seed", cfg.primality.seed},
    };
    j["unit_method"] = to_string(cfg.unit_method);
    j["iteration_cap"] = optional_json(cfg.iteration_cap);
    return j;
}

GenConfig config_from_json(const Json& j) {
    GenConfig cfg;
    cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    cfg.x = j.at("x").get<Nat>();
    cfg.epsilon = optional_from<double>(j, "epsilon");
    cfg.modulus_mode = parse_modulus_mode(j.at("modulus_mode").get<std::string>());
    cfg.q = optional_from<Nat>(j, "q");
    cfg.A = optional_from<double>(j, "A");
    cfg.T_override = optional_from<std::uint64_t>(j, "T");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    const Json& p = j.at("primality");
    const auto kind = p.at("kind").get<std::string>();
    if (kind == "exact") {
        cfg.primality.kind = PrimalityPolicy::Kind::Exact;
    } else if (kind == "miller-rabin") {
        cfg.primality.kind = PrimalityPolicy::Kind::MillerRabin;
    } else {
        throw ConfigError("unknown primality kind '" + kind + "'");
    }
    cfg.primality.rounds = p.at("rounds").get<unsigned>();
    cfg.primality.seed = p.at("seed").get<std::uint64_t>();
    cfg.unit_method = parse_unit_method(j.at("unit_method").get<std::string>());
    cfg.iteration_cap = optional_from<std::uint64_t>(j, "iteration_cap");
    return cfg;
}

Json to_json(const Telemetry& t) {
    return {
        {"loop_iterations", t.loop_iterations},
        {"primality_tests", t.primality_tests},
        {"bits_consumed", t.bits_consumed},
        {"setup_bits", t.setup_bits},
        {"information_bits", t.information_bits},
        {"fallback_entered", t.fallback_entered},
        {"chosen_q", t.chosen_q},
        {"chosen_a", t.chosen_a},
    };
}

Telemetry telemetry_from_json(const Json& j) {
    Telemetry t;
    t.loop_iterations = j.at("loop_iterations").get<std::uint64_t>();
    t.primality_tests = j.at("primality_tests").get<std::uint64_t>();
    t.bits_consumed = j.at("bits_consumed").get<std::uint64_t>();
    t.setup_bits = j.at("setup_bits").get<std::uint64_t>();
    t.information_bits = j.at("information_bits").get<double>();
    t.fallback_entered = j.at("fallback_entered").get<bool>();
    t.chosen_q = j.at("chosen_q").get<Nat>();
    t.chosen_a = j.at("chosen_a").get<Nat>();
    return t;
}

Json to_json(const DistMetrics<double>& m) {
    return {
        {"space_size", m.space_size}, {"delta1", m.delta1},       {"delta2_sq", m.delta2_sq}, {"beta", m.beta},
        {"gamma", m.gamma},           {"h2_bits", m.h2_bits},     {"hmin_bits", m.hmin_bits},
    };
}

Json to_json(const DistMetrics<Rational>& m) {
    Json j = {
        {"space_size", m.space_size},
        {"delta1", m.delta1.get_str()},
        {"delta2_sq", m.delta2_sq.get_str()},
        {"beta", m.beta.get_str()},
        {"gamma", m.gamma.get_str()},
        {"h2_bits", m.h2_bits},
        {"hmin_bits", m.hmin_bits},
    };
    j["approx"] = to_json(to_double(m));
    return j;
}

DistMetrics<double> metrics_from_json(const Json& j) {
    DistMetrics<double> m;
    m.space_size = j.at("space_size").get<Nat>();
    m.delta1 = j.at("delta1").get<double>();
    m.delta2_sq = j.at("delta2_sq").get<double>();
    m.beta = j.at("beta").get<double>();
    m.gamma = j.at("gamma").get<double>();
    m.h2_bits = j.at("h2_bits").get<double>();
    m.hmin_bits = j.at("hmin_bits").get<double>();
    return m;
}

Json to_json(const RunReport& r) {
    Json j = versioned("run_report");
    j["config"] = to_json(r.config);
    j["trials"] = r.trials;
    j["mean_iterations"] = r.mean_iterations;
    j["mean_bits"] = r.mean_bits;
    j["mean_loop_bits"] = r.mean_loop_bits;
    j["mean_information_bits"] = r.mean_information_bits;
    j["mean_primality_tests"] = r.mean_primality_tests;
    j["fallback_rate"] = r.fallback_rate;
    j["modulus"] = optional_json(r.modulus);
    j["modulus_range"] = optional_json(r.modulus_range);
    j["effective_epsilon"] = optional_json(r.effective_epsilon);
    j["predicted_iterations"] = optional_json(r.predicted_iterations);
    j["predicted_bits"] = optional_json(r.predicted_bits);
    j["metrics"] = r.metrics ? to_json(*r.metrics) : Json(nullptr);
    if (!r.per_trial.empty()) {
        Json trials = Json::array();
        for (const auto& t : r.per_trial) {
            trials.push_back({{"index", t.index}, {"prime", t.prime}, {"telemetry", to_json(t.telemetry)}});
        }
        j["per_trial"] = std::move(trials);
    }
    return j;
}

RunReport run_report_from_json(const Json& j) {
    check_schema(j);
    RunReport r;
    r.config = config_from_json(j.at("config"));
    r.trials = j.at("trials").get<std::uint64_t>();
    r.mean_iterations = j.at("mean_iterations").get<double>();
    r.mean_bits = j.at("mean_bits").get<double>();
    r.mean_loop_bits = j.at("mean_loop_bits").get<double>();
    r.mean_information_bits = j.at("mean_information_bits").get<double>();
    r.mean_primality_tests = j.at("mean_primality_tests").get<double>();
    r.fallback_rate = j.at("fallback_rate").get<double>();
    r.modulus = optional_from<Nat>(j, "modulus");
    r.modulus_range = optional_from<Nat>(j, "modulus_range");
    r.effective_epsilon = optional_from<double>(j, "effective_epsilon");
    r.predicted_iterations = optional_from<double>(j, "predicted_iterations");
    r.predicted_bits = optional_from<double>(j, "predicted_bits");
    if (j.contains("metrics") && !j.at("metrics").is_null()) {
        r.metrics = metrics_from_json(j.at("metrics"));
    }
    if (j.contains("per_trial")) {
        for (const auto& t : j.at("per_trial")) {
            r.per_trial.push_back(
                {t.at("index").get<std::uint64_t>(), t.at("prime").get<Nat>(), telemetry_from_json(t.at("telemetry"))});
        }
    }
    return r;
}

Json to_json(const std::vector<RunReport>& reports) {
    Json j = Json::array();
    for (const auto& r : reports) {
        j.push_back(to_json(r));
    }
    return j;
}

std::vector<RunReport> run_reports_from_json(const Json& j) {
    if (!j.is_array()) {
        throw DomainError("expected a JSON array of run reports");
    }
    std::vector<RunReport> out;
    for (const auto& r : j) {
        out.push_back(run_report_from_json(r));
    }
    return out;
}

Json to_json(const GenConfig& cfg, const GenResult& r) {
    Json j = versioned("generate");
    j["config"] = to_json(cfg);
    j["prime"] = r.prime;
    j["telemetry"] = to_json(r.telemetry);
    return j;
}

Json to_json(const GapCensus& c) {
    Json j = versioned("gap_census");
    j["x"] = c.x;
    j["pi_x"] = c.pi_x;
    Json rows = Json::array();
    for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
        rows.push_back({
            {"lambda", c.lambdas[i]},
            {"F", c.F_values[i]},
            {"normalized", c.normalized[i]},
            {"reference", c.reference[i]},
        });
    }
    j["census"] = std::move(rows);
    return j;
}

Json to_json(const PrimeIncAudit& a) {
    Json j = versioned("primeinc_audit");
    j["x"] = a.x;
    j["pi_x"] = a.pi_x;
    j["p_max"] = a.p_max;
    j["delta1_exact"] = a.exact_delta1.get_str();
    j["delta1"] = a.delta1;
    j["gap_threshold"] = a.gap_threshold;
    j["F"] = a.F;
    j["lower_bound"] = a.lower_bound;
    j["bound_holds"] = a.bound_holds;
    j["twin_uppers"] = a.twin_uppers;
    j["uniform_twin_fraction"] = a.uniform_twin_fraction;
    j["exact_twin_fraction"] = a.exact_twin_fraction;
    j["trials"] = a.trials;
    j["seed"] = a.seed;
    j["empirical_twin_fraction"] = a.empirical_twin_fraction;
    j["twin_ratio"] = a.twin_ratio;
    return j;
}

Json to_json(const ErrorProfile& p) {
    Json j = versioned("error_profile");
    j["x"] = p.x;
    j["q"] = p.q;
    j["phi"] = p.phi;
    j["pi_x"] = p.pi_x;
    j["max_error"] = p.max_error;
    j["mean_error"] = p.mean_error;
    j["sum_sq"] = p.sum_sq;
    j["tau"] = p.tau;
    j["alpha"] = p.alpha;
    Json classes = Json::array();
    for (std::size_t i = 0; i < p.units.size(); ++i) {
        classes.push_back({{"a", p.units[i]}, {"count", p.counts[i]}, {"error", p.errors[i]}});
    }
    j["classes"] = std::move(classes);
    return j;
}

Json to_json(const ErrorRangeProfile& p) {
    Json j = versioned("error_range_profile");
    j["x"] = p.x;
    j["A"] = p.A;
    j["Q"] = p.Q;
    j["pairs"] = p.pairs;
    j["double_sum"] = p.double_sum;
    j["normalizer"] = p.normalizer;
    j["ratio"] = p.ratio;
    return j;
}

template <class Real>
Json to_json(const ExactDist<Real>& d, std::string_view algorithm) {
    Json j = versioned("exact_dist");
    j["algorithm"] = algorithm;
    j["backend"] = is_exact_v<Real> ? "rational" : "double";
    j["space_size"] = d.dist.space_size();
    j["weight_total"] = d.weight_total;
    j["weight_nonempty"] = d.weight_nonempty;
    j["conditional"] = d.conditional();
    j["empty_classes"] = d.empty_classes;
    j["metrics"] = to_json(metrics_of(d.dist));
    Json rows = Json::array();
    for (const auto& [p, m] : d.dist.outcomes()) {
        rows.push_back({{"prime", p}, {"mass", mass_json(m)}});
    }
    j["distribution"] = std::move(rows);
    return j;
}

template <class Real>
void write_csv(std::ostream& os, const FiniteDist<Real>& dist) {
    os << "prime,mass\n";
    for (const auto& [p, m] : dist.outcomes()) {
        os << p << ',';
        if constexpr (is_exact_v<Real>) {
            os << m.get_str();
        } else {
            os << Json(m).dump();
        }
        os << '\n';
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) {
            throw IoError("<stdout>", "write failed");
        }
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path, std::string("cannot open for writing: ") + std::strerror(errno));
    }
    out << text;
    out.close();
    if (!out) {
        throw IoError(path, "write failed");
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path, std::string("cannot open for reading: ") + std::strerror(errno));
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(path, e.what());
    }
}

template Json to_json<double>(const ExactDist<double>&, std::string_view);
template Json to_json<Rational>(const ExactDist<Rational>&, std::string_view);
template void write_csv<double>(std::ostream&, const FiniteDist<double>&);
template void write_csv<Rational>(std::ostream&, const FiniteDist<Rational>&);

}  // namespace primelab
