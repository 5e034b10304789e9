// primelab: command-line front end for the generators, exact distributions and
// experiments.  Output goes to --out (default stdout) as JSON, or CSV for exact-dist.
// On error a JSON object {"error": <kind>, "message": <text>} is written to stderr and
// the exit status is nonzero.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "primelab/errors.hpp"
#include "primelab/exactdist.hpp"
#include "primelab/generators.hpp"
#include "primelab/harness.hpp"
#include "primelab/report.hpp"

using namespace primelab;

namespace {

struct Options {
    Nat x = 0;
    std::optional<double> epsilon;
    std::optional<double> A;
    std::optional<std::uint64_t> T;
    std::string algo = "basic";
    std::string modulus_mode = "primorial";
    std::optional<Nat> q;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out = "-";
    unsigned threads = 0;
    std::string unit_method = "joye-paillier";
    bool per_trial = false;
    bool metrics = false;
    std::string backend = "auto";
    std::string pairs = "as-sampled";
    std::vector<double> lambdas{0.5, 1.0, 2.0, 3.0};
    std::optional<double> tau;
};

GenConfig make_config(const Options& o) {
    GenConfig c;
    c.algorithm = parse_algorithm(o.algo);
    c.x = o.x;
    c.epsilon = o.epsilon;
    c.modulus_mode = parse_modulus_mode(o.modulus_mode);
    c.q = o.q;
    c.A = o.A;
    c.T_override = o.T;
    c.seed = o.seed;
    c.unit_method = parse_unit_method(o.unit_method);
    if (c.q && c.modulus_mode != ModulusMode::Explicit) {
        c.modulus_mode = ModulusMode::Explicit;
    }
    c.validate();
    return c;
}

void require_json(const Options& o) {
    if (o.format != "json") {
        throw ConfigError("format '" + o.format + "' is not available for this command (use json)");
    }
}

void emit(const Options& o, const Json& j) {
    require_json(o);
    write_output(o.out, j.dump(2) + "\n");
}

template <class Real>
ExactDist<Real> exact_for(const GenConfig& c, const PrimeTable& table, PairWeighting weighting) {
    switch (c.algorithm) {
        case Algorithm::Trivial:
            return exact_dist_trivial<Real>(table, c.x);
        case Algorithm::PrimeInc:
            return exact_dist_primeinc<Real>(table, c.x);
        case Algorithm::Basic:
        case Algorithm::ErhFallback: {
            const PrimeGenerator gen(c);
            const Nat q = gen.modulus()->q;
            if (c.algorithm == Algorithm::Basic) {
                return exact_dist_basic<Real>(table, c.x, q);
            }
            return exact_dist_erh_fallback<Real>(table, c.x, q, gen.fallback_T());
        }
        case Algorithm::Uncond:
            return exact_dist_uncond<Real>(table, c.x, *c.A, PrimeGenerator(c).fallback_T(), weighting);
        case Algorithm::UncondNoFallback:
            return exact_dist_uncond_nofallback<Real>(table, c.x, *c.A, weighting);
    }
    throw ConfigError("unknown algorithm");
}

template <class Real>
void emit_exact(const Options& o, const GenConfig& c, const PrimeTable& table, PairWeighting weighting) {
    const ExactDist<Real> d = exact_for<Real>(c, table, weighting);
    if (o.format == "csv") {
        std::ostringstream os;
        write_csv(os, d.dist);
        write_output(o.out, os.str());
    } else if (o.format == "json") {
        Json j = to_json(d, to_string(c.algorithm));
        j["config"] = to_json(c);
        write_output(o.out, j.dump(2) + "\n");
    } else {
        throw ConfigError("unknown format '" + o.format + "' (use json or csv)");
    }
}

void run_generate(const Options& o) {
    const GenConfig c = make_config(o);
    const PrimeGenerator gen(c);
    emit(o, to_json(c, gen.run_trial(0)));
}

void run_bench(const Options& o) {
    require_json(o);
    const GenConfig c = make_config(o);
    BenchmarkOptions opt;
    opt.keep_trials = o.per_trial;
    opt.with_metrics = o.metrics;
    opt.threads = o.threads;
    emit(o, to_json(benchmark(c, o.trials, opt)));
}

void run_exact_dist(const Options& o) {
    const GenConfig c = make_config(o);
    const auto table = make_shared_table(c.x);
    PairWeighting weighting = PairWeighting::AsSampled;
    if (o.pairs == "uniform") {
        weighting = PairWeighting::Uniform;
    } else if (o.pairs != "as-sampled") {
        throw ConfigError("unknown pair weighting '" + o.pairs + "' (use as-sampled or uniform)");
    }
    bool rational = c.x <= kRationalBackendLimit;
    if (o.backend == "rational") {
        rational = true;
    } else if (o.backend == "double") {
        rational = false;
    } else if (o.backend != "auto") {
        throw ConfigError("unknown backend '" + o.backend + "' (use auto, rational or double)");
    }
    if (rational) {
        emit_exact<Rational>(o, c, *table, weighting);
    } else {
        emit_exact<double>(o, c, *table, weighting);
    }
}

void run_audit(const Options& o) {
    const auto table = make_shared_table(o.x);
    emit(o, to_json(primeinc_audit(table, o.x, o.trials, o.seed, o.threads)));
}

void run_gap_census(const Options& o) {
    const auto table = make_shared_table(o.x);
    emit(o, to_json(gap_census(*table, o.x, o.lambdas)));
}

void run_error_profile(const Options& o) {
    const auto table = make_shared_table(o.x);
    if (o.q) {
        emit(o, to_json(error_term_profile(*table, o.x, *o.q, o.tau)));
    } else if (o.A) {
        emit(o, to_json(error_term_range_profile(*table, o.x, *o.A)));
    } else {
        throw ConfigError("error-profile needs --q (fixed modulus) or --A (range of moduli)");
    }
}

void report_error(std::string_view kind, std::string_view message) {
    Json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Prime generation laboratory"};
    app.require_subcommand(1);

    const auto add_x = [&](CLI::App* sub) { sub->add_option("--x", o.x, "Upper bound; primes are <= x")->required(); };
    const auto add_out = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "json (or csv for exact-dist)");
        sub->add_option("--out", o.out, "Output path, - for stdout");
    };
    const auto add_gen = [&](CLI::App* sub) {
        add_x(sub);
        sub->add_option("--algo", o.algo, "trivial, primeinc, basic, erh-fallback, uncond, uncond-nofallback");
        sub->add_option("--epsilon", o.epsilon, "Modulus exponent: q <= x^(1-epsilon)");
        sub->add_option("--modulus-mode", o.modulus_mode, "primorial, power-of-two or explicit");
        sub->add_option("--q", o.q, "Explicit modulus");
        sub->add_option("--A", o.A, "Random-modulus range exponent");
        sub->add_option("--T", o.T, "Residue attempts before the fallback");
        sub->add_option("--unit-method", o.unit_method, "joye-paillier or rejection");
        sub->add_option("--seed", o.seed, "Master seed");
        add_out(sub);
    };

    auto* generate = app.add_subcommand("generate", "Generate one prime and report its telemetry");
    add_gen(generate);

    auto* bench = app.add_subcommand("bench", "Run many trials and report aggregate resource use");
    add_gen(bench);
    bench->add_option("--trials", o.trials, "Number of trials");
    bench->add_option("--threads", o.threads, "Worker threads, 0 = all cores");
    bench->add_flag("--per-trial", o.per_trial, "Include every trial in the report");
    bench->add_flag("--metrics", o.metrics, "Include uniformity metrics of the empirical output");

    auto* exact = app.add_subcommand("exact-dist", "Exact output distribution of a generator");
    add_gen(exact);
    exact->add_option("--backend", o.backend, "auto, rational or double");
    exact->add_option("--pairs", o.pairs, "as-sampled or uniform (random-modulus variants)");

    auto* audit = app.add_subcommand("audit-primeinc", "PRIMEINC bias: exact statistical distance and twin test");
    add_x(audit);
    audit->add_option("--trials", o.trials, "Monte Carlo trials for the twin test");
    audit->add_option("--seed", o.seed, "Master seed");
    audit->add_option("--threads", o.threads, "Worker threads, 0 = all cores");
    add_out(audit);

    auto* census = app.add_subcommand("gap-census", "Count primes whose preceding gap is <= lambda ln x");
    add_x(census);
    census->add_option("--lambda", o.lambdas, "Gap multipliers")->delimiter(',');
    add_out(census);

    auto* errors = app.add_subcommand("error-profile", "Residue-class error terms E(x; q, a)");
    add_x(errors);
    errors->add_option("--q", o.q, "Fixed modulus");
    errors->add_option("--A", o.A, "Sum over Q/2 < q <= Q with Q from A");
    errors->add_option("--tau", o.tau, "Threshold for the fraction of large errors");
    add_out(errors);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("UsageError", e.what());
        return 2;
    }

    try {
        if (*generate) {
            run_generate(o);
        } else if (*bench) {
            run_bench(o);
        } else if (*exact) {
            run_exact_dist(o);
        } else if (*audit) {
            run_audit(o);
        } else if (*census) {
            run_gap_census(o);
        } else if (*errors) {
            run_error_profile(o);
        }
    } catch (const std::exception& e) {
        report_error(error_kind(e), e.what());
        return 1;
    }
    return 0;
}
