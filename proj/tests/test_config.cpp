#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ues/scenario.hpp"

using namespace ues;
using Catch::Approx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parser basics", "[config]") {
    const ConfigFile cfg = ConfigFile::parse_string(
        "name = \"demo\"  # trailing comment\n"
        "count = 3\n"
        "[es]\n"
        "alpha = 1.5e-2\n"
        "flag = true\n"
        "hats = [1, 2, 3]\n"
        "rows = [[1, 2, 0.5], [2, 1, 0.5]]\n");
    CHECK(cfg.find("name")->as_string("name") == "demo");
    CHECK(cfg.find("count")->as_number("count") == 3.0);
    CHECK(cfg.find("es.alpha")->as_number("es.alpha") == Approx(0.015));
    CHECK(cfg.find("es.flag")->as_bool("es.flag"));
    CHECK(cfg.find("es.hats")->as_numbers("es.hats") == std::vector<double>{1.0, 2.0, 3.0});
    const auto rows = cfg.find("es.rows")->as_number_rows("es.rows");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == std::vector<double>{2.0, 1.0, 0.5});
}

TEST_CASE("config parser diagnostics", "[config]") {
    CHECK_THROWS_AS(ConfigFile::parse_string("novalue\n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_string("x = \n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_string("x = 1\nx = 2\n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_string("[bad\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_string("x = [1, 2\n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_string("x = what\n"), ConfigError);

    try {
        ConfigFile::parse_string("ok = 1\nbroken = @@\n", "demo.toml");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected with names", "[config]") {
    const ConfigFile cfg = ConfigFile::parse_string(
        "name = \"x\"\n[es]\nalpha = 1\nbogus_key = 2\n");
    try {
        parse_scenario(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("es.bogus_key") != std::string::npos);
    }
}

TEST_CASE("invalid graph config names the violated invariant", "[config]") {
    const ConfigFile cfg = ConfigFile::parse_string(
        "[graph]\nn = 3\nedges = [[1, 1, 1.0]]\n");
    CHECK_THROWS_WITH(parse_scenario(cfg), Catch::Matchers::ContainsSubstring("diagonal"));
}

TEST_CASE("defaults are logged", "[config]") {
    const ConfigFile cfg = ConfigFile::parse_string("name = \"d\"\n");
    const Scenario sc = parse_scenario(cfg);
    bool saw_alpha = false;
    for (const auto& note : sc.notes) {
        if (note.find("es.alpha") != std::string::npos) saw_alpha = true;
    }
    CHECK(saw_alpha);
}

TEST_CASE("preset fig2b matches the published experiment", "[config]") {
    const Scenario sc = parse_scenario(load_config("fig2b"));
    CHECK(sc.graph.n() == 5);
    CHECK(is_weight_balanced(sc.graph));
    CHECK(is_strongly_connected(sc.graph));
    CHECK(sc.cost.family() == CostFamily::QuadSinSq);
    for (int i = 0; i < 5; ++i) CHECK(sc.cost.centers()(i) == i + 1.0);

    CHECK(sc.es.probing == Probing::ConstantFrequency);
    CHECK(sc.es.growth.kind == GrowthKind::Asymptotic);
    CHECK(sc.es.growth.beta == 1.0);
    CHECK(sc.es.growth.v == 2.0);
    CHECK(sc.es.alpha == 1.0);
    CHECK(sc.es.k == 1.0);
    CHECK(sc.es.gamma == 1.0);
    CHECK(sc.es.omega == 10.0);
    CHECK(sc.es.omega_h == 8.0);

    Eigen::VectorXd x0(5);
    x0 << -1, 0, 1, 4, 5;
    CHECK((sc.init.x - x0).norm() == 0.0);
    CHECK(sc.init.eta.norm() == 0.0);
    CHECK(sc.init.z.norm() == 0.0);
    CHECK(sc.sim.t_end == 30.0);
}

TEST_CASE("preset fig2a is the classical baseline", "[config]") {
    const Scenario sc = parse_scenario(load_config("fig2a"));
    CHECK(sc.es.growth.kind == GrowthKind::Classical);
    CHECK(sc.es.growth.value(12.0) == 1.0);
    bool has_bias_gate = false;
    for (const auto& g : sc.gates) {
        has_bias_gate = has_bias_gate || g.kind == Gate::Kind::TailSupErrorMin;
    }
    CHECK(has_bias_gate);
}

TEST_CASE("presets fig3a-c use chirpy probing with q = 2", "[config]") {
    for (const std::string name : {"fig3a", "fig3b", "fig3c"}) {
        const Scenario sc = parse_scenario(load_config(name));
        CHECK(sc.es.probing == Probing::Chirpy);
        CHECK(sc.es.q == 2);
        CHECK(sc.es.alpha == 1.0);
        CHECK(sc.es.k == 1.0);
        CHECK(sc.es.gamma == 1.0);
        CHECK(sc.es.omega == 10.0);
        CHECK(sc.es.omega_h == 8.0);
    }
    CHECK(parse_scenario(load_config("fig3a")).es.growth.kind == GrowthKind::Asymptotic);
    CHECK(parse_scenario(load_config("fig3b")).es.growth.lambda == 0.03);
    const Scenario c = parse_scenario(load_config("fig3c"));
    CHECK(c.es.growth.kind == GrowthKind::PrescribedTime);
    CHECK(c.es.growth.T == 5.0);
    CHECK(c.es.growth.varrho == 1.0);
    REQUIRE(c.es.growth.clamp_time.has_value());
    CHECK(*c.es.growth.clamp_time == 4.5);
}

TEST_CASE("preset fig4c matches the moving-optima experiment", "[config]") {
    const Scenario sc = parse_scenario(load_config("fig4c"));
    CHECK(sc.cost.family() == CostFamily::ShiftedQuadratic);
    Eigen::VectorXd a(5), b(5);
    a << 0.1, 0.3, 0.5, 0.4, 0.5;
    b << 0.1, 0.2, 0.3, 0.1, 0.4;
    CHECK((sc.cost.amplitudes() - a).norm() == 0.0);
    CHECK((sc.cost.rates() - b).norm() == 0.0);

    CHECK(sc.es.k == 10.0);
    CHECK(sc.es.gamma == 10.0);
    CHECK(sc.es.omega == 10.0);
    CHECK(sc.es.omega_h == 8.0);
    CHECK(sc.es.alpha == 50.0);
    CHECK(sc.es.q == 2);
    CHECK(sc.es.growth.T == 5.0);
    CHECK(*sc.es.growth.clamp_time == 4.5);

    CHECK(sc.init.x.norm() == 0.0);  // all initial values zero
    CHECK(sc.init.eta.norm() == 0.0);
    CHECK(sc.init.z.norm() == 0.0);
    CHECK(sc.sim.t_end == 6.0);
}

TEST_CASE("every preset parses and starts inside the invariant set", "[config]") {
    for (const auto& name : preset_names()) {
        const Scenario sc = parse_scenario(load_config(name));
        CHECK(sc.init.z.sum() == 0.0);
        CHECK(is_weight_balanced(sc.graph));
        bool has_drift_gate = false;
        for (const auto& g : sc.gates) {
            has_drift_gate = has_drift_gate || g.kind == Gate::Kind::InvariantDriftMax;
        }
        CHECK(has_drift_gate);
    }
}

TEST_CASE("csv schema is stable", "[config]") {
    CHECK(csv_header(2, 1) == "t,x_1,x_2,eta_1,eta_2,z_1,z_2,xstar_1,err_1,err_2");
    CHECK(csv_header(2, 2) ==
          "t,x_1,x_2,x_3,x_4,eta_1,eta_2,z_1,z_2,z_3,z_4,xstar_1,xstar_2,err_1,err_2");
}

TEST_CASE("identical config produces byte-identical output", "[config]") {
    const std::string dir_a = "cfgtest_out_a";
    const std::string dir_b = "cfgtest_out_b";
    RunOptions opt;
    opt.t_end_override = 2.0;

    opt.out_dir = dir_a;
    run_scenario(parse_scenario(load_config("fig2b")), opt);
    opt.out_dir = dir_b;
    run_scenario(parse_scenario(load_config("fig2b")), opt);

    CHECK(slurp(dir_a + "/trajectory.csv") == slurp(dir_b + "/trajectory.csv"));
    CHECK_FALSE(slurp(dir_a + "/trajectory.csv").empty());
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("side conditions report honestly per scenario", "[config]") {
    const Scenario cf = parse_scenario(load_config("fig2b"));
    const SideConditions a = cf.side_conditions();
    CHECK_FALSE(a.chirpy);
    CHECK(a.v == 2.0);
    CHECK(a.rate_condition_ok());  // v >= 2
    CHECK(a.c_condition_ok());     // c = -4 < -3

    const Scenario pt = parse_scenario(load_config("fig4c"));
    const SideConditions b = pt.side_conditions();
    CHECK(b.chirpy);
    CHECK(b.p == 2.0);             // q + varrho - 1
    CHECK(b.rate_condition_ok());  // p >= 2
    CHECK_FALSE(b.c_condition_ok());  // c - p = -2 is not < -2

    const Scenario ex = parse_scenario(load_config("fig3b"));
    const SideConditions c = ex.side_conditions();
    CHECK(c.p == 1.0);
    CHECK_FALSE(c.rate_condition_ok());  // p = q - 1 = 1 < 2 at q = 2
}

TEST_CASE("lmi settings parse from the scenario config", "[config]") {
    const ConfigFile cfg = ConfigFile::parse_string(
        "[graph]\npreset = \"ring5\"\n"
        "[lmi]\nbox = [-4, 4]\np11 = 0.5\np22 = 1.5\ndelta = 0.25\n"
        "p2_scale = 0.1\np3_scale = 2.0\n");
    const Scenario sc = parse_scenario(cfg);
    const LmiSettings ls = parse_lmi_settings(cfg, sc.graph.n(), sc.cost.dim());
    REQUIRE(ls.certificate.has_value());
    CHECK(ls.certificate->p11 == 0.5);
    CHECK(ls.certificate->p22 == 1.5);
    CHECK(ls.certificate->delta == 0.25);
    CHECK(ls.certificate->P2(0, 0) == 0.1);
    CHECK(ls.certificate->P3(1, 1) == 2.0);
    CHECK(ls.box.size() == 1);
    CHECK(ls.box[0].lo == -4.0);
}
