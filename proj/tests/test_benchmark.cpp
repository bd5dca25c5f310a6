// Tests for the verification-case toolkit: case definition, scheme marching
// and recording, the high-resolution reference, error metrics, the
// scheme x resolution x step-size study, and the wall-clock comparison.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "quntherm/benchmark.hpp"
#include "test_support.hpp"

using namespace quntherm;

namespace {

constexpr double kPi = std::numbers::pi;

// The nonlinear case with both surface signals pinned at the initial value:
// the exact solution is identically u = 1.
BenchmarkCase constant_case(double tau) {
    BenchmarkCase b;
    b.u_left = [](double) { return 1.0; };
    b.u_right = [](double) { return 1.0; };
    b.tau = tau;
    return b;
}

ReferenceSolution handmade_reference(std::size_t frames, float value) {
    ReferenceSolution ref;
    ref.nx_ref = 21;
    ref.dt_ref = 0.01;
    ref.save_dt = 0.05;
    ref.frames.assign(frames, std::vector<float>(21, value));
    ref.flux_left.assign(frames, 0.0);
    ref.flux_right.assign(frames, 0.0);
    return ref;
}

SchemeRun handmade_run(std::size_t frames, double value) {
    SchemeRun run;
    run.scheme = Scheme::Imex;
    run.nx = 5;
    run.dt = 0.01;
    run.save_dt = 0.05;
    for (std::size_t k = 0; k < frames; ++k) {
        run.times.push_back(static_cast<double>(k) * run.save_dt);
        run.frames.emplace_back(5, value);
        run.meshes.push_back(uniform_grid(5));
        run.flux_left.push_back(0.0);
        run.flux_right.push_back(0.0);
    }
    return run;
}

}  // namespace

TEST_CASE("case definition: coefficients and drive signals match their closed forms") {
    BenchmarkCase b;
    // Conductivity spike centred at u = 1.5.
    CHECK(b.kstar_of_u(1.5) == doctest::Approx(602.365).epsilon(1e-12));
    CHECK(b.kstar_of_u(1.0) ==
          doctest::Approx(1.91 + 600.0 * std::exp(-2.5)).epsilon(1e-12));
    // Storage spike at the same temperature.
    CHECK(b.cstar_of_u(1.5) == doctest::Approx(9916.0).epsilon(1e-12));
    CHECK(b.cstar_of_u(1.0) ==
          doctest::Approx(244.0 + 1.0e4 * std::exp(-1.25)).epsilon(1e-12));
    // Out-of-phase sinusoidal surface temperatures, periods 12 and 24.
    CHECK(b.u_left(0.0) == doctest::Approx(1.0));
    CHECK(b.u_left(3.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.u_right(6.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(b.u_right(12.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.u_initial == 1.0);
    CHECK(b.tau == 48.0);
    CHECK(b.nx == 51);
    CHECK(b.dt == 5e-3);
    // The bundled monitor parameters are the case's calibrated set.
    CHECK(b.monitor.alpha1 == doctest::Approx(0.9));
    CHECK(b.monitor.beta1 == doctest::Approx(2.0));
    CHECK(b.monitor.alpha2 == doctest::Approx(0.1));
    CHECK(b.monitor.beta2 == doctest::Approx(2.0));
    CHECK(b.monitor.beta_mesh == doctest::Approx(100.0));
    CHECK(b.monitor.sigma == doctest::Approx(10.0));

    const auto p = b.problem();
    CHECK(p.fo == doctest::Approx(1.0));
    CHECK(p.interfaces.empty());
    CHECK(p.kstar(1.5, 0.37) == doctest::Approx(602.365));
    CHECK(p.left.kind == BcKind::Dirichlet);
    CHECK(p.initial(0.42) == doctest::Approx(1.0));

    CHECK(std::string(scheme_name(Scheme::Imex)) == "imex");
    CHECK(std::string(scheme_name(Scheme::Qunt)) == "qunt");
    CHECK(std::string(scheme_name(Scheme::CrankNicolson)) == "cn");
}

TEST_CASE("uniform_grid spans the unit interval") {
    const auto g = uniform_grid(5);
    REQUIRE(g.size() == 5);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g[4] == 1.0);
    CHECK(uniform_grid(2).size() == 2);
    CHECK_THROWS_AS(uniform_grid(1), std::invalid_argument);
}

TEST_CASE("run_scheme records on the requested cadence") {
    const BenchmarkCase b = constant_case(0.2);

    SUBCASE("frames, meshes and flux series share the save grid") {
        const auto run = run_scheme(b, Scheme::Imex, 11, 0.01, 0.05);
        REQUIRE(run.times.size() == 5);
        CHECK(run.times.front() == 0.0);
        CHECK(run.times.back() == doctest::Approx(0.2));
        CHECK(run.frames.size() == 5);
        CHECK(run.meshes.size() == 5);
        CHECK(run.flux_left.size() == 5);
        CHECK(run.flux_right.size() == 5);
        for (const auto& f : run.frames) CHECK(f.size() == 11);
        // Frame 0 is the untouched initial state.
        for (double v : run.frames[0]) CHECK(v == 1.0);
        // The constant solution never moves.
        for (double v : run.frames.back()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(run.max_mesh_speed_ratio == 0.0);
    }

    SUBCASE("save_dt = 0 disables recording but still times the march") {
        const auto run = run_scheme(b, Scheme::Imex, 11, 0.01, 0.0);
        CHECK(run.times.empty());
        CHECK(run.frames.empty());
        CHECK(run.seconds >= 0.0);
    }

    SUBCASE("bad cadences are rejected") {
        CHECK_THROWS_AS(run_scheme(b, Scheme::Imex, 11, 0.01, 0.013), std::invalid_argument);
        CHECK_THROWS_AS(run_scheme(b, Scheme::Imex, 11, 0.01, 0.05, 0.217),
                        std::invalid_argument);
        CHECK_THROWS_AS(run_scheme(b, Scheme::Imex, 11, -0.01, 0.05), std::invalid_argument);
    }

    SUBCASE("the moving-grid scheme keeps a constant case on the uniform mesh") {
        const auto run = run_scheme(b, Scheme::Qunt, 11, 0.01, 0.1);
        CHECK(run.max_mesh_speed_ratio < 1e-12);  // pure roundoff on a mesh that never moves
        for (std::size_t j = 0; j < 11; ++j)
            CHECK(run.meshes.back()[j] == doctest::Approx(j / 10.0).epsilon(1e-12));
    }
}

TEST_CASE("the moving-grid scheme shifts nodes toward the driven boundary") {
    BenchmarkCase b;
    b.tau = 1.2;
    const auto run = run_scheme(b, Scheme::Qunt, 21, 0.02, 0.2);
    double dev = 0.0;
    for (std::size_t j = 0; j < 21; ++j)
        dev = std::max(dev, std::abs(run.meshes.back()[j] - static_cast<double>(j) / 20.0));
    CHECK(dev > 1e-4);
    // Node ordering and pinned ends survive the motion.
    for (const auto& mesh : run.meshes) {
        CHECK(mesh.front() == 0.0);
        CHECK(mesh.back() == 1.0);
        CHECK(std::is_sorted(mesh.begin(), mesh.end()));
    }
}

TEST_CASE("reference run: constant-boundary case collapses to the constant solution") {
    const BenchmarkCase b = constant_case(0.1);
    const auto ref = reference_solution(b, 21, 0.01, 0.05);
    CHECK(ref.nx_ref == 21);
    REQUIRE(ref.frame_count() == 3);
    REQUIRE(ref.flux_left.size() == 3);
    for (float v : ref.frames[0]) CHECK(v == 1.0f);
    for (double x : {0.0, 0.137, 0.5, 0.99, 1.0})
        CHECK(ref.at(2, x) == doctest::Approx(1.0).epsilon(1e-6));
    for (double q : ref.flux_left) CHECK(std::abs(q) < 1e-9);
    for (double q : ref.flux_right) CHECK(std::abs(q) < 1e-9);

    CHECK_THROWS_AS(reference_solution(b, 11, 0.01, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(reference_solution(b, 21, 0.03, 0.05), std::invalid_argument);
}

TEST_CASE("reference evaluation is exact through cubic data") {
    ReferenceSolution ref = handmade_reference(1, 0.0f);
    for (int j = 0; j < 21; ++j) {
        const double x = j / 20.0;
        ref.frames[0][static_cast<std::size_t>(j)] = static_cast<float>(x * x * x);
    }
    for (double x : {0.0, 0.05, 0.3141, 0.517, 0.92, 1.0})
        CHECK(ref.at(0, x) == doctest::Approx(x * x * x).epsilon(5e-6));

    // Linear data is reproduced too, including at the clamped end stencils.
    for (int j = 0; j < 21; ++j)
        ref.frames[0][static_cast<std::size_t>(j)] = static_cast<float>(0.25 + 0.5 * j / 20.0);
    for (double x : {0.0, 0.012, 0.488, 0.993, 1.0})
        CHECK(ref.at(0, x) == doctest::Approx(0.25 + 0.5 * x).epsilon(1e-6));
}

TEST_CASE("error metrics on hand-built data") {
    SUBCASE("identical constants give zero field error") {
        const auto rep = compute_errors(handmade_run(3, 1.0), handmade_reference(3, 1.0f));
        CHECK(rep.eps_inf < 1e-12);
        for (double e : rep.epsilon) CHECK(e < 1e-12);
        CHECK(rep.xi_inf == 0.0);
    }

    SUBCASE("a uniform offset is reported exactly") {
        const auto rep = compute_errors(handmade_run(3, 1.001), handmade_reference(3, 1.0f));
        REQUIRE(rep.epsilon.size() == 5);
        for (double e : rep.epsilon) CHECK(e == doctest::Approx(1e-3).epsilon(1e-6));
        CHECK(rep.eps_inf == doctest::Approx(1e-3).epsilon(1e-6));
        // Default profile time: the last saved frame.
        CHECK(rep.delta_time == doctest::Approx(0.10));
        for (double d : rep.delta) CHECK(d == doctest::Approx(1e-3).epsilon(1e-6));
    }

    SUBCASE("zero reference flux switches the normalization to absolute errors") {
        auto num = handmade_run(3, 1.0);
        num.flux_left = {0.0, 0.25, 0.5};
        num.flux_right = {0.0, -0.1, -0.2};
        const auto rep = compute_errors(num, handmade_reference(3, 1.0f));
        CHECK(rep.flux_peak_left == 0.0);
        CHECK(rep.flux_peak_right == 0.0);
        CHECK(rep.xi_inf_left == doctest::Approx(0.5));
        CHECK(rep.xi_inf_right == doctest::Approx(0.2));
        CHECK(rep.xi_inf == doctest::Approx(0.5));
        REQUIRE(rep.xi_left.size() == 3);
        CHECK(rep.xi_left[1] == doctest::Approx(0.25));
    }

    SUBCASE("shape mismatches are rejected") {
        // Run saved on a grid that is no multiple of the reference's.
        auto coarse = handmade_run(3, 1.0);
        coarse.save_dt = 0.03;
        CHECK_THROWS_AS(compute_errors(coarse, handmade_reference(3, 1.0f)),
                        std::invalid_argument);
        // Horizons differ.
        CHECK_THROWS_AS(compute_errors(handmade_run(2, 1.0), handmade_reference(3, 1.0f)),
                        std::invalid_argument);
        // No saved step beyond the initial state.
        CHECK_THROWS_AS(compute_errors(handmade_run(1, 1.0), handmade_reference(1, 1.0f)),
                        std::invalid_argument);
        // Reference not at least 4x finer.
        auto fine = handmade_run(3, 1.0);
        fine.nx = 11;
        CHECK_THROWS_AS(compute_errors(fine, handmade_reference(3, 1.0f)),
                        std::invalid_argument);
    }

    SUBCASE("run frames may subsample the reference save grid") {
        auto num = handmade_run(2, 1.0);          // saves at t = 0 and 0.05
        num.times = {0.0, 0.10};
        num.save_dt = 0.10;                       // every other reference frame
        const auto rep = compute_errors(num, handmade_reference(3, 1.0f));
        CHECK(rep.eps_inf < 1e-12);
    }
}

TEST_CASE("error metrics on a short real run are internally consistent") {
    BenchmarkCase b;
    b.tau = 0.5;
    const auto ref = reference_solution(b, 101, 2.5e-3, 0.05);
    const auto num = run_scheme(b, Scheme::Qunt, 25, 5e-3, 0.05);
    const auto rep = compute_errors(num, ref);

    REQUIRE(rep.epsilon.size() == 25);
    REQUIRE(rep.comparison_nodes.size() == 25);
    REQUIRE(rep.delta.size() == 25);
    CHECK(std::is_sorted(rep.comparison_nodes.begin(), rep.comparison_nodes.end()));
    CHECK(rep.comparison_nodes.front() == doctest::Approx(0.0));
    CHECK(rep.comparison_nodes.back() == doctest::Approx(1.0));

    CHECK(rep.eps_inf == doctest::Approx(*std::max_element(rep.epsilon.begin(),
                                                           rep.epsilon.end())));
    CHECK(rep.eps_inf > 0.0);
    CHECK(rep.xi_inf == doctest::Approx(std::max(rep.xi_inf_left, rep.xi_inf_right)));
    CHECK(rep.flux_peak_left > 0.0);
    CHECK(rep.flux_peak_right > 0.0);
    CHECK(rep.delta_time == doctest::Approx(0.5));

    // Profile time override snaps to the requested save frame.
    const auto rep2 = compute_errors(num, ref, 0.25);
    CHECK(rep2.delta_time == doctest::Approx(0.25));
    const double expect0 = std::abs(num.frames[5][0] - ref.at(5, num.meshes[5][0]));
    CHECK(rep2.delta[0] == doctest::Approx(expect0).epsilon(1e-12));
    // Same data, same field metrics.
    CHECK(rep2.eps_inf == doctest::Approx(rep.eps_inf));
}

TEST_CASE("convergence study fills every cell and isolates failures") {
    BenchmarkCase b;
    b.tau = 0.5;
    const auto ref = reference_solution(b, 101, 2.5e-3, 0.05);

    const std::vector<Scheme> schemes{Scheme::Imex, Scheme::Qunt};
    const std::vector<int> nx_list{11, 25};
    const std::vector<double> dt_list{5e-3, 2.5e-3};
    const auto study = convergence_study(b, ref, schemes, nx_list, dt_list, 2);
    REQUIRE(study.cells.size() == 8);
    for (const auto& cell : study.cells) {
        INFO(scheme_name(cell.scheme), " Nx=", cell.nx, " dt=", cell.dt, " err=", cell.error);
        CHECK_FALSE(cell.failed);
        CHECK(cell.eps_inf > 0.0);
        CHECK(cell.seconds >= 0.0);
        CHECK(cell.xi_inf_left >= 0.0);
        CHECK(cell.max_mesh_speed_ratio >= 0.0);
    }

    // Deterministic regardless of the worker count.
    const auto serial = convergence_study(b, ref, schemes, nx_list, dt_list, 1);
    REQUIRE(serial.cells.size() == study.cells.size());
    for (std::size_t i = 0; i < study.cells.size(); ++i) {
        CHECK(serial.cells[i].scheme == study.cells[i].scheme);
        CHECK(serial.cells[i].nx == study.cells[i].nx);
        CHECK(serial.cells[i].eps_inf == study.cells[i].eps_inf);
    }

    // A cell whose resolution outruns the reference fails alone.
    const auto mixed = convergence_study(b, ref, {Scheme::Imex}, {11, 26}, {5e-3}, 1);
    REQUIRE(mixed.cells.size() == 2);
    CHECK_FALSE(mixed.cells[0].failed);
    CHECK(mixed.cells[1].failed);
    CHECK_FALSE(mixed.cells[1].error.empty());

    CHECK_THROWS_AS(convergence_study(b, ref, schemes, nx_list, dt_list, 0),
                    std::invalid_argument);
}

TEST_CASE("runtime comparison times every config and reports ratios against the baseline") {
    BenchmarkCase b;
    b.tau = 0.5;
    const auto ref = reference_solution(b, 101, 2.5e-3, 0.05);

    const std::vector<RuntimeConfig> configs{{Scheme::CrankNicolson, 25, 5e-3},
                                             {Scheme::Imex, 11, 5e-3}};
    const std::vector<std::pair<std::string, double>> horizons{{"short", 0.5}};

    const auto res = runtime_comparison(b, configs, horizons, ref, 1, /*gate=*/1.0);
    REQUIRE(res.rows.size() == 2);
    const auto& cn = res.rows[0];
    const auto& im = res.rows[1];
    CHECK(cn.scheme == Scheme::CrankNicolson);
    CHECK(cn.horizon == "short");
    CHECK(cn.tau == doctest::Approx(0.5));
    CHECK(cn.ratio == doctest::Approx(1.0));
    CHECK(cn.seconds > 0.0);
    CHECK(cn.gate_ok);
    CHECK(im.gate_ok);
    CHECK(im.ratio == doctest::Approx(im.seconds / cn.seconds).epsilon(1e-9));
    CHECK(im.gate_eps_inf > 0.0);

    // An impossible gate flags the configs but the timing still runs.
    const auto strict = runtime_comparison(b, configs, horizons, ref, 1, /*gate=*/1e-9);
    REQUIRE(strict.rows.size() == 2);
    CHECK_FALSE(strict.rows[0].gate_ok);
    CHECK_FALSE(strict.rows[1].gate_ok);
    CHECK(strict.rows[0].seconds > 0.0);

    CHECK_THROWS_AS(runtime_comparison(b, configs, horizons, ref, 0), std::invalid_argument);
}
