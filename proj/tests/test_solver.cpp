#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <filesystem>

#include "leray/diagnostics.hpp"
#include "leray/manifest.hpp"
#include "leray/initial.hpp"
#include "leray/solver.hpp"
#include "leray/spectral.hpp"

using namespace leray;

namespace {

double sup_velocity_diff(const VelocityField& a, const VelocityField& b) {
    double m = 0.0;
    for (size_t n = 0; n < a.u.data.size(); ++n) {
        m = std::max(m, std::abs(a.u.data[n] - b.u.data[n]));
        m = std::max(m, std::abs(a.v.data[n] - b.v.data[n]));
    }
    return m;
}

} // namespace

TEST_CASE("zero vorticity is a fixed point of the step") {
    Grid g(32, 32);
    NavierStokesSolver solver(g, FlowParams{});
    Spectrum w(static_cast<size_t>(g.size()), {0.0, 0.0});
    solver.step(w, 0.1);
    for (const auto& c : w) REQUIRE(std::abs(c) == 0.0);
}

TEST_CASE("zero time step leaves the state untouched") {
    Grid g(32, 32);
    NavierStokesSolver solver(g, FlowParams{});
    Spectrum w = solver.vorticity_spectrum(taylor_green(g, 1.0));
    Spectrum before = w;
    solver.step(w, 0.0);
    REQUIRE(w == before);
    CHECK_THROWS_AS(solver.step(w, -0.1), DomainError);
}

TEST_CASE("one step matches the analytic single-mode decay") {
    // The decaying-vortex mode sits on the Laplacian eigenvalue 2, so one
    // step of dt must reproduce exp(-2 nu dt) on every coefficient.
    Grid g(64, 64);
    FlowParams params;
    params.nu = 0.01;
    NavierStokesSolver solver(g, params);
    Spectrum w = solver.vorticity_spectrum(taylor_green(g, 1.0));
    Spectrum before = w;
    double dt = 1e-3;
    solver.step(w, dt);
    double decay = std::exp(-2.0 * params.nu * dt);
    for (size_t n = 0; n < w.size(); ++n) {
        if (std::abs(before[n]) < 1e-14) continue;
        REQUIRE(std::abs(w[n] - before[n] * decay) < 1e-10 * std::abs(before[n]));
    }
}

TEST_CASE("simulation records snapshots at the configured cadence") {
    SolverConfig cfg;
    cfg.grid = Grid(32, 32);
    cfg.t_end = 1.0;
    cfg.snapshot_interval = 0.1;
    Timeline tl = simulate(cfg);
    REQUIRE(tl.snapshots.size() == 11);
    CHECK(tl.snapshots.front().time == 0.0);
    CHECK(tl.snapshots.back().time == 1.0);
    for (size_t k = 0; k < tl.snapshots.size(); ++k)
        CHECK(tl.snapshots[k].time ==
              Catch::Approx(0.1 * static_cast<double>(k)).margin(1e-9));

    // An interval that does not divide t_end still ends exactly at t_end.
    cfg.snapshot_interval = 0.4;
    Timeline tl2 = simulate(cfg);
    REQUIRE(tl2.snapshots.size() == 4); // 0, 0.4, 0.8, 1.0
    CHECK(tl2.snapshots.back().time == 1.0);
}

TEST_CASE("kinetic energy follows the analytic decay law") {
    SolverConfig cfg;
    cfg.grid = Grid(64, 64);
    cfg.params.nu = 0.01;
    cfg.t_end = 1.0;
    cfg.snapshot_interval = 0.25;
    Timeline tl = simulate(cfg);
    double ke0 = kTwoPi / 2.0 * kTwoPi / 2.0; // pi^2
    for (const Snapshot& s : tl.snapshots) {
        double expected = ke0 * std::exp(-4.0 * cfg.params.nu * s.time);
        REQUIRE(kinetic_energy(s.velocity) == Catch::Approx(expected).epsilon(1e-7));
    }
}

TEST_CASE("zero initial field produces an all-zero timeline") {
    SolverConfig cfg;
    cfg.grid = Grid(32, 32);
    cfg.t_end = 0.5;
    cfg.snapshot_interval = 0.25;
    cfg.initial_condition.amplitude = 0.0;
    Timeline tl = simulate(cfg);
    REQUIRE(tl.snapshots.size() == 3);
    for (const Snapshot& s : tl.snapshots) {
        CHECK(max_speed(s.velocity) == 0.0);
        CHECK(max_abs(s.pressure) == 0.0);
    }
}

TEST_CASE("every recorded snapshot is divergence-free") {
    SolverConfig cfg;
    cfg.grid = Grid(32, 32);
    cfg.params.nu = 0.002;
    cfg.t_end = 2.0;
    cfg.snapshot_interval = 0.5;
    cfg.initial_condition.kind = InitialCondition::Kind::RandomShear;
    cfg.initial_condition.seed = 77;
    cfg.initial_condition.amplitude = 1.0;
    Timeline tl = simulate(cfg);
    for (const Snapshot& s : tl.snapshots) CHECK(max_abs(divergence(s.velocity)) < 1e-10);
}

TEST_CASE("unforced kinetic energy never grows") {
    SolverConfig cfg;
    cfg.grid = Grid(32, 32);
    cfg.params.nu = 0.005;
    cfg.t_end = 3.0;
    cfg.snapshot_interval = 0.25;
    cfg.initial_condition.kind = InitialCondition::Kind::RandomShear;
    cfg.initial_condition.seed = 1234;
    cfg.initial_condition.amplitude = 2.0;
    Timeline tl = simulate(cfg);
    CHECK(energy_monotone(tl));
    LerayCheck check = leray_membership(tl);
    CHECK(check.ok());
    CHECK(check.sup_l2_sq > 0.0);
    CHECK(check.h1_time_integral > 0.0);
}

TEST_CASE("halving the step size shrinks the error at fourth order") {
    // Explicit fixed-dt runs against the exact solution; the observed
    // order for the classical four-stage scheme should be ~4 (>= 3).
    // nu is chosen so the mode-(1,1) truncation error sits far above the
    // round-off floor while nu*k_max^2*dt stays inside the stability region
    // for the noise-seeded high modes.
    Grid g(32, 32);
    FlowParams params;
    params.nu = 0.2;
    auto sup_error_at = [&](double dt) {
        SolverConfig cfg;
        cfg.grid = g;
        cfg.params = params;
        cfg.dt_auto = false;
        cfg.dt = dt;
        cfg.t_end = 1.0;
        cfg.snapshot_interval = 1.0;
        Timeline tl = simulate(cfg);
        Snapshot exact = analytic_taylor_green(g, 1.0, params.nu, 1.0);
        return sup_velocity_diff(tl.snapshots.back().velocity, exact.velocity);
    };
    double e1 = sup_error_at(0.05);
    double e2 = sup_error_at(0.025);
    double order = std::log2(e1 / e2);
    INFO("errors " << e1 << " -> " << e2 << ", observed order " << order);
    CHECK(e2 < e1);
    CHECK(order >= 3.0);
}

TEST_CASE("pressure recovery matches the closed forms") {
    Grid g(64, 64);
    FlowParams params;

    SECTION("decaying vortex") {
        ScalarField p = pressure_from_velocity(taylor_green(g, 1.0), params);
        ScalarField exact = taylor_green_pressure(g, 1.0, params.nu, 0.0);
        for (size_t n = 0; n < p.data.size(); ++n)
            REQUIRE(std::abs(p.data[n] - exact.data[n]) < 1e-10);
    }
    SECTION("uniform flow has zero pressure gradient") {
        VelocityField f(g);
        for (auto& u : f.u.data) u = 2.0;
        ScalarField p = pressure_from_velocity(f, params);
        CHECK(max_abs(p) < 1e-12);
    }
    SECTION("zero field") {
        VelocityField f(g);
        ScalarField p = pressure_from_velocity(f, params);
        CHECK(max_abs(p) == 0.0);
    }
}

TEST_CASE("analytic reference snapshot honors its contract") {
    Grid g(32, 32);
    SECTION("t = 0 equals the initializer") {
        Snapshot s = analytic_taylor_green(g, 1.0, 0.01, 0.0);
        VelocityField init = taylor_green(g, 1.0);
        CHECK(sup_velocity_diff(s.velocity, init) == 0.0);
    }
    SECTION("half-decay time") {
        double t_half = std::log(2.0) / (2.0 * 0.01);
        Snapshot s = analytic_taylor_green(g, 1.0, 0.01, t_half);
        CHECK(max_speed(s.velocity) == Catch::Approx(0.5).epsilon(1e-9));
    }
    SECTION("zero amplitude gives the zero snapshot") {
        Snapshot s = analytic_taylor_green(g, 0.0, 0.01, 1.0);
        CHECK(max_speed(s.velocity) == 0.0);
        CHECK(max_abs(s.pressure) == 0.0);
    }
}

TEST_CASE("solver config JSON round-trips and rejects junk") {
    SolverConfig c;
    c.grid = Grid(32, 48, 1.0, 2.0);
    c.params.nu = 0.003;
    c.dt_auto = false;
    c.dt = 0.01;
    c.t_end = 2.5;
    c.cfl = 0.3;
    c.dealias = false;
    c.snapshot_interval = 0.5;
    c.initial_condition.kind = InitialCondition::Kind::RandomShear;
    c.initial_condition.seed = 99;
    c.initial_condition.amplitude = 1.5;

    SolverConfig back = solver_config_from_json(solver_config_to_json(c));
    CHECK(back.grid == c.grid);
    CHECK(back.params.nu == c.params.nu);
    CHECK(back.dt_auto == c.dt_auto);
    CHECK(back.dt == c.dt);
    CHECK(back.t_end == c.t_end);
    CHECK(back.cfl == c.cfl);
    CHECK(back.dealias == c.dealias);
    CHECK(back.snapshot_interval == c.snapshot_interval);
    CHECK(back.initial_condition.kind == c.initial_condition.kind);
    CHECK(back.initial_condition.seed == c.initial_condition.seed);

    CHECK_THROWS_AS(solver_config_from_json_text("{\"nope\": 1}"), ConfigError);
    CHECK_THROWS_AS(solver_config_from_json_text("{\"grid\": {\"nz\": 4}}"), ConfigError);
    CHECK_THROWS_AS(solver_config_from_json_text("{\"dt\": \"soon\"}"), ConfigError);
    CHECK_THROWS_AS(solver_config_from_json_text("{\"dt\": -0.5}"), ConfigError);
    CHECK_THROWS_AS(solver_config_from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(solver_config_from_json_text("{\"t_end\": -1}"), ConfigError);
    CHECK_THROWS_AS(solver_config_from_json_text("{\"cfl\": 1.5}"), ConfigError);
    CHECK_THROWS_AS(
        solver_config_from_json_text("{\"initial_condition\": {\"type\": \"vortex\"}}"),
        ConfigError);

    SolverConfig dflt = solver_config_from_json_text("{}");
    CHECK(dflt.dt_auto);
    CHECK(dflt.cfl == 0.4);
    CHECK(dflt.dealias);
}

TEST_CASE("config digests are stable across reformatting") {
    std::string a = R"({"t_end": 1.0, "cfl": 0.4})";
    std::string b = R"({
        "cfl": 0.4,
        "t_end": 1.0
    })";
    auto digest = [](const std::string& text) {
        return fnv1a_hex(solver_config_to_json(solver_config_from_json_text(text)).dump());
    };
    CHECK(digest(a) == digest(b));
    CHECK(digest(a).size() == 16);
    CHECK(digest(a) != digest(R"({"t_end": 2.0})"));
}

TEST_CASE("blow-up is reported with the failure time") {
    // Aggressive amplitude, no dealiasing, and an oversized fixed step
    // push the explicit scheme outside stability; the error must carry
    // the first failing time instead of emitting NaNs.
    SolverConfig cfg;
    cfg.grid = Grid(32, 32);
    cfg.params.nu = 1e-4;
    cfg.dt_auto = false;
    cfg.dt = 0.2;
    cfg.t_end = 5.0;
    cfg.snapshot_interval = 0.5;
    cfg.dealias = false;
    cfg.initial_condition.kind = InitialCondition::Kind::RandomShear;
    cfg.initial_condition.seed = 3;
    cfg.initial_condition.amplitude = 50.0;
    try {
        simulate(cfg);
        FAIL("expected the run to blow up");
    } catch (const BlowUpError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= cfg.t_end);
    }
}

TEST_CASE("file-based initial conditions must match the configured grid") {
    Grid g(32, 32);
    Snapshot s = analytic_taylor_green(g, 1.0, 0.01, 0.0);
    std::string path =
        (std::filesystem::temp_directory_path() / "leray_init_test.bin").string();
    snapshot_write(s, path);

    SolverConfig cfg;
    cfg.grid = g;
    cfg.t_end = 0.1;
    cfg.snapshot_interval = 0.1;
    cfg.initial_condition.kind = InitialCondition::Kind::File;
    cfg.initial_condition.path = path;
    Timeline tl = simulate(cfg);
    CHECK(tl.snapshots.size() == 2);

    cfg.grid = Grid(64, 64);
    CHECK_THROWS_AS(simulate(cfg), ConfigError);
    std::filesystem::remove(path);
}
