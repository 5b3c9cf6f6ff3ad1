#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "leray/csv.hpp"
#include "leray/initial.hpp"
#include "leray/rng.hpp"
#include "leray/scaling.hpp"

using namespace leray;

namespace {

Timeline analytic_decay(const Grid& g, double nu, double t_end, double interval) {
    Timeline tl;
    tl.params.nu = nu;
    for (double t = 0.0; t <= t_end + 1e-12; t += interval)
        tl.snapshots.push_back(analytic_taylor_green(g, 1.0, nu, t));
    return tl;
}

SweepConfig analytic_sweep_config(std::vector<double> re_values, double t_end, double interval) {
    SweepConfig sweep;
    sweep.re_values = std::move(re_values);
    sweep.theta = 0.5;
    sweep.mode = SweepConfig::Mode::Analytic;
    sweep.solver.grid = Grid(32, 32);
    sweep.solver.t_end = t_end;
    sweep.solver.snapshot_interval = interval;
    return sweep;
}

} // namespace

TEST_CASE("characteristic timescales") {
    FlowParams p;
    p.u_char = 1.0;
    p.l_char = 1.0;
    p.nu = 0.001;
    Timescales t = timescales(p);
    CHECK(t.t_c == 1.0);
    CHECK(t.t_nu == 1000.0);
    CHECK(t.re == 1000.0);

    p.u_char = 0.5;
    p.l_char = 6.0;
    p.nu = 2.0;
    t = timescales(p);
    CHECK(t.t_c == 12.0);
    CHECK(t.t_nu == 18.0);
    CHECK(t.re == Catch::Approx(1.5).epsilon(1e-14));

    SECTION("re couples the two timescales") {
        Rng rng(99);
        for (int trial = 0; trial < 20; ++trial) {
            FlowParams q;
            q.u_char = 0.1 + rng.uniform() * 10.0;
            q.l_char = 0.1 + rng.uniform() * 10.0;
            q.nu = 1e-4 + rng.uniform();
            Timescales ts = timescales(q);
            REQUIRE(ts.re * ts.t_c == Catch::Approx(ts.t_nu).epsilon(1e-12));
        }
    }
    SECTION("invalid parameters are rejected") {
        FlowParams bad;
        bad.nu = 0.0;
        CHECK_THROWS_AS(timescales(bad), DomainError);
    }
}

TEST_CASE("transition time of the decaying vortex") {
    Grid g(32, 32);
    double nu = 0.01;
    Timeline tl = analytic_decay(g, nu, 40.0, 0.5);

    SECTION("crossing matches ln(1/theta)/(2 nu)") {
        TransitionResult r = detect_transition_time(tl, 0.5);
        REQUIRE(r.hit);
        double expected = std::log(2.0) / (2.0 * nu);
        CHECK(r.t_trans == Catch::Approx(expected).epsilon(0.01));
        CHECK(r.tau_trans == Catch::Approx(r.t_trans).epsilon(1e-14)); // t_c = 1
        CHECK(r.re == Catch::Approx(100.0).epsilon(1e-12));
        CHECK(r.method == "threshold_crossing");
    }
    SECTION("theta = 1 crosses at the initial snapshot") {
        TransitionResult r = detect_transition_time(tl, 1.0);
        REQUIRE(r.hit);
        CHECK(r.t_trans == 0.0);
    }
    SECTION("constant-shear timeline never crosses") {
        Timeline flat;
        flat.params.nu = nu;
        for (double t : {0.0, 1.0, 2.0}) {
            flat.snapshots.push_back(
                Snapshot(t, taylor_green(g, 1.0), taylor_green_pressure(g, 1.0, nu, 0.0)));
        }
        CHECK(!detect_transition_time(flat, 0.5).hit);
    }
    SECTION("convective rescaling divides out of tau") {
        Timeline scaled = analytic_decay(g, nu, 40.0, 0.5);
        scaled.params.u_char = 2.0; // t_c = 0.5
        TransitionResult a = detect_transition_time(tl, 0.5);
        TransitionResult b = detect_transition_time(scaled, 0.5);
        CHECK(b.t_trans == a.t_trans);
        CHECK(b.tau_trans == Catch::Approx(2.0 * a.tau_trans).epsilon(1e-14));
    }
    SECTION("threshold range and zero reference are enforced") {
        CHECK_THROWS_AS(detect_transition_time(tl, 0.0), DomainError);
        CHECK_THROWS_AS(detect_transition_time(tl, 1.0001), DomainError);
        Timeline zero;
        zero.snapshots.push_back(Snapshot(0.0, VelocityField(g), ScalarField(g)));
        CHECK_THROWS_AS(detect_transition_time(zero, 0.5), UndefinedReferenceError);
    }
}

TEST_CASE("viscosity sweep doubles the transition time per Reynolds doubling") {
    SweepConfig sweep = analytic_sweep_config({50.0, 100.0, 200.0}, 80.0, 0.25);
    std::vector<SweepRow> rows = reynolds_sweep(sweep);
    REQUIRE(rows.size() == 3);
    for (const SweepRow& r : rows) REQUIRE(r.hit);
    CHECK(rows[0].nu == Catch::Approx(0.02).epsilon(1e-14));
    CHECK(rows[2].nu == Catch::Approx(0.005).epsilon(1e-14));
    double t0 = *rows[0].t_trans;
    CHECK(*rows[1].t_trans == Catch::Approx(2.0 * t0).epsilon(0.02));
    CHECK(*rows[2].t_trans == Catch::Approx(4.0 * t0).epsilon(0.02));

    SECTION("parallel evaluation returns the same rows") {
        std::vector<SweepRow> par = reynolds_sweep(sweep, 3);
        REQUIRE(par.size() == rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            CHECK(par[i].re == rows[i].re);
            CHECK(par[i].nu == rows[i].nu);
            CHECK(par[i].hit == rows[i].hit);
            CHECK(*par[i].t_trans == *rows[i].t_trans);
        }
    }
    SECTION("rows come back sorted by re") {
        SweepConfig shuffled = analytic_sweep_config({200.0, 50.0, 100.0}, 80.0, 0.25);
        std::vector<SweepRow> sorted_rows = reynolds_sweep(shuffled);
        REQUIRE(sorted_rows.size() == 3);
        CHECK(sorted_rows[0].re == 50.0);
        CHECK(sorted_rows[2].re == 200.0);
    }
}

TEST_CASE("sweep with a single Reynolds number") {
    SweepConfig sweep = analytic_sweep_config({100.0}, 40.0, 0.5);
    std::vector<SweepRow> rows = reynolds_sweep(sweep);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].hit);
}

TEST_CASE("sweep configuration validation") {
    SweepConfig sweep = analytic_sweep_config({100.0}, 10.0, 0.5);

    SECTION("empty re list") {
        sweep.re_values.clear();
        CHECK_THROWS_AS(sweep.validate(), ConfigError);
    }
    SECTION("non-positive re") {
        sweep.re_values = {100.0, -5.0};
        CHECK_THROWS_AS(sweep.validate(), ConfigError);
    }
    SECTION("theta out of range") {
        sweep.theta = 0.0;
        CHECK_THROWS_AS(sweep.validate(), ConfigError);
    }
    SECTION("analytic mode requires the vortex initial condition") {
        sweep.solver.initial_condition.kind = InitialCondition::Kind::RandomShear;
        CHECK_THROWS_AS(sweep.validate(), ConfigError);
    }
    SECTION("JSON round trip preserves every field") {
        sweep.vary = SweepConfig::Vary::UChar;
        sweep.theta = 0.7;
        SweepConfig back = sweep_config_from_json(sweep_config_to_json(sweep));
        CHECK(back.re_values == sweep.re_values);
        CHECK(back.theta == sweep.theta);
        CHECK(back.vary == sweep.vary);
        CHECK(back.mode == sweep.mode);
        CHECK(back.solver.grid.nx == sweep.solver.grid.nx);
        CHECK(back.solver.t_end == sweep.solver.t_end);
    }
    SECTION("unknown JSON keys are rejected") {
        nlohmann::json j = sweep_config_to_json(sweep);
        j["reynolds"] = 7;
        CHECK_THROWS_AS(sweep_config_from_json(j), ConfigError);
    }
}

TEST_CASE("per-run configuration for a target Reynolds number") {
    SweepConfig sweep;
    sweep.re_values = {12.0};
    sweep.solver.params.u_char = 2.0;
    sweep.solver.params.l_char = 3.0;
    sweep.solver.params.nu = 0.25;

    SECTION("varying viscosity") {
        sweep.vary = SweepConfig::Vary::Nu;
        SolverConfig run = detail::configure_for_re(sweep, 12.0);
        CHECK(run.params.nu == Catch::Approx(0.5).epsilon(1e-14));
        CHECK(run.params.u_char == 2.0);
    }
    SECTION("varying the characteristic velocity") {
        sweep.vary = SweepConfig::Vary::UChar;
        SolverConfig run = detail::configure_for_re(sweep, 12.0);
        CHECK(run.params.nu == 0.25);
        CHECK(run.params.u_char == Catch::Approx(1.0).epsilon(1e-14));
        CHECK(run.initial_condition.amplitude == Catch::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("sweep CSV round trip") {
    std::vector<SweepRow> rows(2);
    rows[0].re = 50.0;
    rows[0].nu = 0.02;
    rows[0].hit = false; // no crossing: empty time cells
    rows[1].re = 100.0;
    rows[1].nu = 0.01;
    rows[1].t_trans = 34.657359;
    rows[1].tau_trans = 34.657359;
    rows[1].hit = true;

    std::string csv = sweep_csv(rows);
    CHECK(csv.rfind("re,nu,t_trans,tau_trans,hit\n", 0) == 0);

    std::istringstream in(csv);
    std::vector<SweepRow> back = sweep_rows_from_csv(csv_parse(in));
    REQUIRE(back.size() == 2);
    CHECK(back[0].re == 50.0);
    CHECK(!back[0].hit);
    CHECK(!back[0].t_trans.has_value());
    CHECK(back[1].hit);
    CHECK(*back[1].t_trans == rows[1].t_trans);
    CHECK(*back[1].tau_trans == rows[1].tau_trans);
}

TEST_CASE("power-law fit recovers an exact inverse law") {
    std::vector<std::pair<double, double>> points;
    for (double re : log_spaced(10.0, 1e4, 12)) points.emplace_back(re, 1.45 / re);
    FitResult fit = powerlaw_fit(points);
    CHECK(fit.exponent == Catch::Approx(-1.0).margin(1e-12));
    CHECK(fit.prefactor_k1 == Catch::Approx(1.45).epsilon(1e-12));
    CHECK(fit.r_squared >= 1.0 - 1e-12);
    CHECK(fit.r_squared <= 1.0);
    CHECK(fit.n_points == 12);
    CHECK(fit.residual_std <= 1e-12);
    CHECK(!fit.few_points_warning);
}

TEST_CASE("power-law fit flags sparse datasets") {
    std::vector<std::pair<double, double>> points = {{10.0, 0.145}, {100.0, 0.0145},
                                                     {1000.0, 0.00145}};
    FitResult fit = powerlaw_fit(points);
    CHECK(fit.few_points_warning);
    CHECK(fit.n_points == 3);

    SECTION("the JSON payload carries exactly the five reported fields") {
        nlohmann::json j = fit_result_to_json(fit);
        CHECK(j.size() == 5);
        CHECK(j.contains("exponent"));
        CHECK(j.contains("prefactor_k1"));
        CHECK(j.contains("r_squared"));
        CHECK(j.contains("n_points"));
        CHECK(j.contains("residual_std"));
        CHECK(!j.contains("few_points_warning"));
    }
}

TEST_CASE("power-law fit rejects unusable inputs") {
    CHECK_THROWS_AS(powerlaw_fit({{100.0, 1.0}}), InsufficientDataError);
    CHECK_THROWS_AS(powerlaw_fit({{100.0, 1.0}, {100.0, 2.0}}), DegenerateDesignError);
    CHECK_THROWS_AS(powerlaw_fit({{100.0, 1.0}, {200.0, -0.5}}), DomainError);
    CHECK_THROWS_AS(powerlaw_fit({{0.0, 1.0}, {200.0, 0.5}}), DomainError);
}

TEST_CASE("fit points skip sweep rows without a crossing") {
    std::vector<SweepRow> rows(3);
    rows[0].re = 50.0;
    rows[0].hit = false;
    rows[1].re = 100.0;
    rows[1].t_trans = 3.0;
    rows[1].tau_trans = 3.0;
    rows[1].hit = true;
    rows[2].re = 200.0;
    rows[2].t_trans = 6.0;
    rows[2].tau_trans = 6.0;
    rows[2].hit = true;
    std::vector<std::pair<double, double>> points = fit_points_from_rows(rows);
    REQUIRE(points.size() == 2);
    CHECK(points[0].first == 100.0);
    CHECK(points[1].second == 6.0);
}

TEST_CASE("synthetic transition-time datasets") {
    std::vector<double> re = log_spaced(50.0, 5000.0, 20);

    SECTION("zero noise reproduces the law exactly") {
        FitResult fit = powerlaw_fit(synth_sk_dataset(1.45, 0.0, re, 1));
        CHECK(fit.exponent == Catch::Approx(-1.0).margin(1e-12));
        CHECK(fit.prefactor_k1 == Catch::Approx(1.45).epsilon(1e-12));
    }
    SECTION("fixed seed gives bit-identical draws") {
        auto a = synth_sk_dataset(1.6, 0.01, re, 42);
        auto b = synth_sk_dataset(1.6, 0.01, re, 42);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].first == b[i].first);
            CHECK(a[i].second == b[i].second);
        }
        auto c = synth_sk_dataset(1.6, 0.01, re, 43);
        CHECK(a[0].second != c[0].second);
    }
    SECTION("one percent noise still pins the coefficients") {
        FitResult fit = powerlaw_fit(synth_sk_dataset(1.6, 0.01, re, 7));
        CHECK(fit.exponent > -1.03);
        CHECK(fit.exponent < -0.97);
        CHECK(fit.prefactor_k1 > 1.57);
        CHECK(fit.prefactor_k1 < 1.63);
        CHECK(fit.r_squared > 0.99);
    }
    SECTION("invalid parameters are rejected") {
        CHECK_THROWS_AS(synth_sk_dataset(0.0, 0.01, re, 1), DomainError);
        CHECK_THROWS_AS(synth_sk_dataset(1.3, -0.1, re, 1), DomainError);
    }
}

TEST_CASE("closed loop: synthesize then recover") {
    Rng rng(2026);
    for (int trial = 0; trial < 5; ++trial) {
        double k1 = 1.0 + 1.5 * rng.uniform();
        double noise = 0.01 * rng.uniform();
        int n = 15 + static_cast<int>(10 * rng.uniform());
        uint64_t seed = 100 + static_cast<uint64_t>(trial);
        FitResult fit = powerlaw_fit(synth_sk_dataset(k1, noise, log_spaced(50.0, 5000.0, n), seed));
        REQUIRE(fit.exponent > -1.05);
        REQUIRE(fit.exponent < -0.95);
        REQUIRE(fit.prefactor_k1 == Catch::Approx(k1).epsilon(0.05));
    }
}

TEST_CASE("rescaling tau only moves the prefactor") {
    std::vector<std::pair<double, double>> base = synth_sk_dataset(1.3, 0.01, log_spaced(50.0, 5000.0, 15), 5);
    std::vector<std::pair<double, double>> scaled = base;
    for (auto& [re, tau] : scaled) tau *= 8.0;
    FitResult a = powerlaw_fit(base);
    FitResult b = powerlaw_fit(scaled);
    CHECK(b.exponent == Catch::Approx(a.exponent).margin(1e-12));
    CHECK(b.prefactor_k1 == Catch::Approx(8.0 * a.prefactor_k1).epsilon(1e-12));
    CHECK(b.r_squared == Catch::Approx(a.r_squared).margin(1e-12));
}

TEST_CASE("log spacing") {
    std::vector<double> v = log_spaced(2.0, 32.0, 5);
    REQUIRE(v.size() == 5);
    CHECK(v.front() == 2.0);
    CHECK(v.back() == 32.0);
    CHECK(v[2] == Catch::Approx(8.0).epsilon(1e-12));
    for (size_t i = 1; i < v.size(); ++i) REQUIRE(v[i] > v[i - 1]);
    CHECK_THROWS_AS(log_spaced(-1.0, 10.0, 5), DomainError);
    CHECK_THROWS_AS(log_spaced(10.0, 1.0, 5), DomainError);
    CHECK_THROWS_AS(log_spaced(1.0, 10.0, 1), DomainError);
}
