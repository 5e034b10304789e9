#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "primelab/errors.hpp"
#include "primelab/report.hpp"

using namespace primelab;

TEST_SUITE("report") {

TEST_CASE("empty report list is an empty JSON array") {
    const Json j = to_json(std::vector<RunReport>{});
    CHECK(j.dump() == "[]");
    CHECK(run_reports_from_json(j).empty());
}

TEST_CASE("run report round-trip") {
    GenConfig c;
    c.algorithm = Algorithm::ErhFallback;
    c.x = 100000;
    c.epsilon = 0.3;
    c.seed = 123456789012345ull;
    c.primality = PrimalityPolicy::miller_rabin(12, 9);
    c.T_override = 40;
    BenchmarkOptions o;
    o.keep_trials = true;
    o.with_metrics = true;
    const auto r = benchmark(c, 300, o);
    const Json j = to_json(r);
    CHECK(j.at("schema_version") == kSchemaVersion);
    const auto back = run_report_from_json(Json::parse(j.dump()));
    CHECK(back == r);
    CHECK(to_json(back).dump() == j.dump());

    const std::vector<RunReport> list{r, r};
    CHECK(run_reports_from_json(Json::parse(to_json(list).dump())) == list);
}

TEST_CASE("config round-trip with explicit modulus") {
    GenConfig c;
    c.algorithm = Algorithm::Basic;
    c.x = 1000;
    c.modulus_mode = ModulusMode::Explicit;
    c.q = 30;
    c.unit_method = UnitMethod::Rejection;
    c.iteration_cap = 77;
    CHECK(config_from_json(to_json(c)) == c);
}

TEST_CASE("schema version is checked") {
    Json j = to_json(benchmark([] {
        GenConfig c;
        c.algorithm = Algorithm::Trivial;
        c.x = 100;
        return c;
    }(), 10));
    j["schema_version"] = 999;
    CHECK_THROWS_AS(run_report_from_json(j), DomainError);
    j.erase("schema_version");
    CHECK_THROWS_AS(run_report_from_json(j), DomainError);
}

TEST_CASE("CSV of the basic distribution at x = 30, q = 6") {
    const auto t = sieve(30);
    std::ostringstream os;
    write_csv(os, exact_dist_basic<Rational>(t, 30, 6).dist);
    const std::string csv = os.str();
    CHECK(csv.rfind("prime,mass\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
    CHECK(csv.find("\n2,0\n") != std::string::npos);
    CHECK(csv.find("\n7,1/6\n") != std::string::npos);

    std::ostringstream od;
    write_csv(od, exact_dist_basic<double>(t, 30, 6).dist);
    const std::string dcsv = od.str();
    CHECK(std::count(dcsv.begin(), dcsv.end(), '\n') == 11);
}

TEST_CASE("exact distribution JSON") {
    const auto t = sieve(30);
    const Json j = to_json(exact_dist_basic<Rational>(t, 30, 6), "basic");
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("distribution").size() == 10);
    CHECK(j.at("metrics").at("delta1") == "2/5");
    CHECK(j.at("backend") == "rational");
}

TEST_CASE("I/O errors name the path") {
    const std::string bad = "/nonexistent-dir/report.json";
    try {
        write_output(bad, "{}");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.path() == bad);
        CHECK(std::string(e.what()).find(bad) != std::string::npos);
    }
    CHECK_THROWS_AS(read_json_file(bad), IoError);

    const auto tmp = std::filesystem::temp_directory_path() / "primelab-report-test.json";
    write_output(tmp.string(), "{\"schema_version\": 1}");
    CHECK(read_json_file(tmp.string()).at("schema_version") == 1);
    write_output(tmp.string(), "{not json");
    CHECK_THROWS_AS(read_json_file(tmp.string()), IoError);
    std::filesystem::remove(tmp);
}

TEST_CASE("experiment results serialize with a schema version") {
    const auto t = sieve(1000);
    CHECK(to_json(gap_census(t, 1000, {1.0})).at("schema_version") == kSchemaVersion);
    CHECK(to_json(error_term_profile(t, 1000, 30)).at("classes").size() == 8);
    CHECK(to_json(error_term_range_profile(t, 1000, 0.5)).contains("ratio"));
    auto shared = make_shared_table(100);
    CHECK(to_json(primeinc_audit(shared, 100, 10, 1)).at("delta1_exact").is_string());
}

}  // TEST_SUITE
