#include "mgsim/engine.hpp"
#include "mgsim/errors.hpp"
#include "mgsim/profile.hpp"
#include "mgsim/scenario.hpp"
#include "mgsim/timeseries.hpp"

#include <doctest.h>

#include <cstdlib>
#include <stdexcept>

using namespace mgsim;

namespace {

const std::filesystem::path kData = MGSIM_DATA_DIR;

LoadProfile steps(std::initializer_list<std::pair<double, double>> pts) {
    LoadProfile p;
    for (const auto& [t, v] : pts) p.segments.push_back({t, SegmentKind::Step, v});
    return p;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("profile evaluation") {
    const auto p = steps({{0.0, 1e6}, {5.0, 2e6}});
    CHECK(profile_eval(p, 4.999) == 1e6);
    CHECK(profile_eval(p, 5.0) == 2e6);  // left-closed
    CHECK(profile_eval(p, 100.0) == 2e6);
    CHECK(profile_eval(steps({{1.0, 3.0}}), 0.5) == 0.0);
    CHECK(profile_eval(LoadProfile{}, 3.0) == 0.0);

    LoadProfile ramp{{{0.0, SegmentKind::Ramp, 1e6}, {2.0, SegmentKind::Hold, 1e6}}};
    CHECK(profile_eval(ramp, 1.0) == doctest::Approx(0.5e6));
    CHECK(profile_eval(ramp, 0.0) == 0.0);
    CHECK(profile_eval(ramp, 2.0) == 1e6);
    CHECK(profile_eval(ramp, 3.0) == 1e6);

    LoadProfile down{{{0.0, SegmentKind::Step, 4.0}, {1.0, SegmentKind::Ramp, 2.0}, {3.0, SegmentKind::Step, 2.0}}};
    CHECK(profile_eval(down, 2.0) == doctest::Approx(3.0));
}

TEST_CASE("profile checks") {
    CHECK(check_profile(steps({{0, 1}, {1, 2}})).empty());
    CHECK_FALSE(check_profile(steps({{1, 1}, {1, 2}})).empty());
    CHECK_FALSE(check_profile(steps({{0, -1}})).empty());
    CHECK_FALSE(check_profile(LoadProfile{{{0.0, SegmentKind::Ramp, 1.0}}}).empty());
    CHECK_THROWS_AS((void)parse_scenario("node g kind=pgm\nnode m kind=pmm\nedge l from=g to=m R=1 L=1m\n"
                                         "profile m step@2=1 step@1=2\n"),
                    SemanticError);
}

TEST_CASE("minimal scenario resolves with defaults") {
    const auto s = load_scenario(kData / "minimal.scn");
    CHECK(s.name == "minimal");
    CHECK(s.topology.nodes().size() == 2);
    CHECK(s.solver.t_end == 1.0);
    CHECK(s.solver.dt == 10e-6);
    CHECK(s.solver.method == Method::Rk4);
    CHECK(s.solver.record_decimation == 100);
    CHECK(s.init == InitMode::Nominal);
    CHECK(s.control.v_bus_ref == 12e3);
    const auto& g = std::get<PgmParams>(s.topology.nodes()[0].params);
    CHECK(g == PgmParams{});
    CHECK(g.L == 100e-6);
    CHECK(g.C_dc == 1e-3);
    CHECK(g.v_ds == 7620.0);
    CHECK(s.droop.size() == 1);
    CHECK(s.droop[0].weight == 1.0);
    CHECK(profile_eval(s.profile_for("m1"), 0.5) == 1e6);
}

TEST_CASE("overrides are applied") {
    const auto s = parse_scenario("netlist minimal.net\nset g1 C_dc=2m\nduration 1\n", kData);
    CHECK(std::get<PgmParams>(s.topology.nodes()[0].params).C_dc == doctest::Approx(2e-3));
    CHECK_THROWS_AS((void)parse_scenario("netlist minimal.net\nset g1 bogus=2\n", kData), SemanticError);
    CHECK_THROWS_AS((void)parse_scenario("netlist minimal.net\nset nope C_dc=2\n", kData), SemanticError);
}

TEST_CASE("bundled four-zone scenario") {
    const auto s = load_scenario(kData / "sps4zone.scn");
    CHECK(s.solver.t_end == 20.0);
    CHECK(s.control.v_bus_ref == 12e3);
    REQUIRE(s.droop.size() == 3);
    CHECK(s.droop[0].weight == 5.0);
    CHECK(s.droop[1].weight == 3.0);
    CHECK(s.droop[2].weight == 2.0);
    CHECK(s.warnings.empty());
    const std::vector<double> events{5.0, 10.0, 15.0};
    CHECK(s.event_times() == events);
    for (const auto& p : s.profiles) {
        for (const double t : {2.5, 7.5, 12.5, 17.5}) CHECK(profile_eval(p.profile, t) > 0.0);
        CHECK(profile_eval(p.profile, 5.0) != profile_eval(p.profile, 4.9));
    }
}

TEST_CASE("missing settings produce warnings") {
    const auto s = parse_scenario("node g kind=pgm\nnode m kind=pmm\nedge l from=g to=m R=1 L=1m\n");
    CHECK(s.warnings.size() == 4);  // duration, droop, profile, main bus
    CHECK(s.control.main_bus == "m");
    CHECK(s.profile_for("m").segments.empty());
}

TEST_CASE("scenario errors") {
    const std::string net = "node g kind=pgm\nnode m kind=pmm\nedge l from=g to=m R=1 L=1m\n";
    CHECK_THROWS_AS((void)parse_scenario(net + "droop m weight=1\n"), SemanticError);
    CHECK_THROWS_AS((void)parse_scenario(net + "droop g weight=0\n"), SemanticError);
    CHECK_THROWS_AS((void)parse_scenario(net + "profile g step@0=1\n"), SemanticError);
    CHECK_THROWS_AS((void)parse_scenario(net + "profile m step0=1\n"), ParseError);
    CHECK_THROWS_AS((void)parse_scenario(net + "solver method=rk45\n"), ParseError);
    CHECK_THROWS_AS((void)parse_scenario(net + "solver decimation=0\n"), SemanticError);
    CHECK_THROWS_AS((void)parse_scenario(net + "control main_bus=zz\n"), SemanticError);
    CHECK_THROWS_AS((void)parse_scenario(net + "control v_bus=0\n"), SemanticError);
    CHECK_THROWS_AS((void)parse_scenario(net + "frobnicate\n"), ParseError);
    CHECK_THROWS_AS((void)parse_scenario("netlist does-not-exist.net\n", kData), IoError);
    CHECK_THROWS_AS((void)load_scenario(kData / "nope.scn"), IoError);
}

TEST_CASE("resolved scenarios are self-contained") {
    auto s = load_scenario(kData / "sps4zone.scn");
    s.solver.t_end = 0.3;
    const auto text = serialize(s);
    const auto back = parse_scenario(text, {}, s.name);
    CHECK(back.topology == s.topology);
    CHECK(serialize(back) == text);
    CHECK(to_csv(simulate(back)) == to_csv(simulate(s)));
}

TEST_CASE("set_param paths") {
    auto s = load_scenario(kData / "sps4zone.scn");
    set_param(s, "ess.omega", 2.0);
    CHECK(s.ess.omega == 2.0);
    set_param(s, "control.r_base", 20.0);
    CHECK(s.control.r_base == 20.0);
    set_param(s, "droop.pgm2.weight", 4.0);
    CHECK(s.droop_for("pgm2").weight == 4.0);
    set_param(s, "pcm1.omega_ess", 10.0);
    CHECK(std::get<PcmParams>(s.topology.nodes()[1].params).ess.omega_ess == 10.0);
    set_param(s, "duration", 3.0);
    CHECK(s.solver.t_end == 3.0);
    set_param(s, "solver.dt", 5e-6);
    CHECK(s.solver.dt == 5e-6);
    CHECK_THROWS_AS(set_param(s, "ess.bogus", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(set_param(s, "nope.C_L", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(set_param(s, "pcm1.v_ds", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(set_param(s, "droop.pgm9.weight", 1.0), std::invalid_argument);
}

TEST_CASE("scenario lookup") {
    CHECK(find_scenario((kData / "minimal.scn").string()) == kData / "minimal.scn");
    ::setenv("MGSIM_SCENARIO_PATH", "/nonexistent:" MGSIM_DATA_DIR, 1);
    CHECK(std::filesystem::equivalent(find_scenario("sps4zone"), kData / "sps4zone.scn"));
    ::unsetenv("MGSIM_SCENARIO_PATH");
    CHECK(std::filesystem::equivalent(find_scenario("minimal"), kData / "minimal.scn"));  // bundled data dir
}

TEST_CASE("csv round trip") {
    TimeSeries ts;
    ts.names = {"t_s", "v_a"};
    ts.columns.assign(2, {});
    ts.append_row(std::vector<double>{0.0, 12000.0});
    ts.append_row(std::vector<double>{1e-3, 0.1 + 0.2});
    const auto text = to_csv(ts);
    CHECK(text == "t_s,v_a\n0,12000\n0.001,0.30000000000000004\n");
    const auto back = read_csv(text);
    CHECK(back.names == ts.names);
    CHECK(back.columns == ts.columns);
    CHECK_THROWS_AS((void)read_csv("a,b\n1\n"), std::runtime_error);
    CHECK_THROWS_AS(ts.append_row(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)ts.column("nope"), std::out_of_range);
}

}  // TEST_SUITE
