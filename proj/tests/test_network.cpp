#include <algorithm>
#include <stdexcept>

#include "doctest.h"

#include "mpt/network.hpp"
#include "mpt/path_map.hpp"
#include "mpt/scenarios.hpp"
#include "test_helpers.hpp"

using namespace mpt;
using namespace mpt_test;

namespace {

bool mentions(const std::vector<Diagnostic>& diags, const std::string& needle) {
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
        return d.location.find(needle) != std::string::npos ||
               d.message.find(needle) != std::string::npos;
    });
}

const GridSpec kGrid{0.05, 5.0 / 240.0, 5.0};

} // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("validate accepts the merge layout") {
    NetworkSpec net = merge_net();
    CHECK(validate(net, kGrid).empty());
}

TEST_CASE("validate flags preference column sums") {
    NetworkSpec net = merge_net();
    net.junctions[0].preferences(0, 0) = 0.9;
    auto diags = validate(net, kGrid);
    REQUIRE(!diags.empty());
    CHECK(mentions(diags, "preference column 1 sums to 0.9"));
}

TEST_CASE("validate flags path continuity violations") {
    NetworkSpec net = merge_net();
    net.paths[0].arcs = {"3", "1"}; // (outgoing, incoming) order
    auto diags = validate(net, kGrid);
    REQUIRE(!diags.empty());
    CHECK(mentions(diags, "P1"));
}

TEST_CASE("validate flags structural problems") {
    SUBCASE("cell count below 3") {
        NetworkSpec net = single_road(2, 0.5);
        CHECK(mentions(validate(net, {0.5, 0.1, 1.0}), "cell_count"));
    }
    SUBCASE("arc length inconsistent with dx") {
        NetworkSpec net = single_road(10, 0.1);
        net.arcs[0].length = 1.5;
        CHECK(!validate(net, {0.1, 0.01, 1.0}).empty());
    }
    SUBCASE("unknown arc in a junction") {
        NetworkSpec net = merge_net();
        net.junctions[0].incoming[1] = "nope";
        CHECK(mentions(validate(net, kGrid), "nope"));
    }
    SUBCASE("unknown arc in a path") {
        NetworkSpec net = merge_net();
        net.paths[1].arcs = {"2", "ghost"};
        CHECK(mentions(validate(net, kGrid), "ghost"));
    }
    SUBCASE("missing priorities at a 2-incoming junction") {
        NetworkSpec net = merge_net();
        net.junctions[0].priorities = Eigen::VectorXd();
        CHECK(mentions(validate(net, kGrid), "priorities"));
    }
    SUBCASE("priorities must sum to 1") {
        NetworkSpec net = merge_net();
        net.junctions[0].priorities = Eigen::Vector2d(0.5, 0.4);
        CHECK(mentions(validate(net, kGrid), "sum to 1"));
    }
    SUBCASE("duplicate arc id") {
        NetworkSpec net = merge_net();
        net.arcs[1].id = "1";
        CHECK(mentions(validate(net, kGrid), "duplicate"));
    }
}

TEST_CASE("validate checks boundary placement and data") {
    SUBCASE("condition on a junction-attached end") {
        NetworkSpec net = merge_net();
        set_boundary(net, BoundaryKey::Target::Arc, "3", BoundaryKey::End::Start,
                     BoundaryCondition::constant(0.1));
        CHECK(mentions(validate(net, kGrid), "junction"));
    }
    SUBCASE("value outside the density range") {
        NetworkSpec net = merge_net();
        set_boundary(net, BoundaryKey::Target::Path, "P1", BoundaryKey::End::Start,
                     BoundaryCondition::constant(1.4));
        CHECK(mentions(validate(net, kGrid), "outside"));
    }
    SUBCASE("table must cover the full horizon") {
        NetworkSpec net = merge_net();
        set_boundary(net, BoundaryKey::Target::Path, "P1", BoundaryKey::End::Start,
                     BoundaryCondition::table({0.0, 2.0}, {0.1, 0.1}));
        CHECK(mentions(validate(net, kGrid), "cover"));
    }
    SUBCASE("arc-level condition shared by two path ends is ambiguous") {
        NetworkSpec net = merge_net();
        set_boundary(net, BoundaryKey::Target::Arc, "3", BoundaryKey::End::End,
                     BoundaryCondition::constant(0.0));
        CHECK(mentions(validate(net, kGrid), "ambiguous"));
    }
    SUBCASE("per-path conditions on a shared end are fine") {
        NetworkSpec net = merge_net();
        set_boundary(net, BoundaryKey::Target::Path, "P1", BoundaryKey::End::End,
                     BoundaryCondition::constant(0.0));
        set_boundary(net, BoundaryKey::Target::Path, "P2", BoundaryKey::End::End,
                     BoundaryCondition::constant(0.0));
        CHECK(validate(net, kGrid).empty());
    }
}

TEST_CASE("boundary condition evaluation") {
    auto c = BoundaryCondition::constant(0.4);
    CHECK(c.eval(0.0) == 0.4);
    CHECK(c.eval(17.0) == 0.4);

    auto t = BoundaryCondition::table({1.0, 2.0, 4.0}, {0.0, 0.2, 0.1});
    CHECK(t.eval(1.0) == 0.0);
    CHECK(t.eval(1.5) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(t.eval(2.0) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(t.eval(3.0) == doctest::Approx(0.15).epsilon(1e-14));
    CHECK(t.eval(0.0) == 0.0);  // clamped before the first sample
    CHECK(t.eval(9.0) == 0.1);  // clamped after the last
    CHECK_THROWS_AS(BoundaryCondition::table({0.0}, {0.1}), std::invalid_argument);

    CHECK(BoundaryCondition::closed().kind == BoundaryCondition::Kind::ZeroFlux);
}

TEST_CASE("signal schedule green windows") {
    SignalSchedule s;
    s.period = 120.0;
    s.offset = 60.0;
    s.green["A"] = {{0.0, 70.0}};

    CHECK(s.is_green("A", 60.0));        // phase 0
    CHECK(s.is_green("A", 129.9));       // phase 69.9
    CHECK(!s.is_green("A", 130.0));      // phase 70 — window is half-open
    CHECK(!s.is_green("A", 179.0));      // phase 119
    CHECK(s.is_green("A", 180.0));       // next period
    CHECK(s.is_green("A", 0.0));         // t < offset: phase -60 wraps to 60
    CHECK(!s.is_green("A", 50.0));       // phase 110
    CHECK(s.is_green("unlisted", 999.0)); // arcs without windows are always green
}

TEST_CASE("grid step counting") {
    CHECK(GridSpec{0.05, 5.0 / 240.0, 5.0}.step_count() == 240);
    CHECK(GridSpec{100.0, 2.5, 2700.0}.step_count() == 1080);
    CHECK_THROWS_AS((GridSpec{0.05, 0.3, 1.0}.step_count()), std::invalid_argument);
}

TEST_CASE("path cell map on the merge layout") {
    NetworkSpec net = merge_net();
    REQUIRE(validate(net, kGrid).empty());
    auto map = PathCellMap::build(net);

    CHECK(map.arc_count() == 3);
    CHECK(map.path_count() == 2);
    CHECK(map.total_physical_cells() == 60);
    CHECK(map.path_length(0) == 40);
    CHECK(map.path_length(1) == 40);

    // 1-based path cell 25 of P1 sits at 1-based cell 5 of arc 3 and is the
    // same physical cell on P2.
    PathCell c1 = map.arc_cell(0, 24);
    CHECK(c1.arc == net.arc_index("3"));
    CHECK(c1.cell == 4);
    CHECK(map.arc_cell(1, 24) == c1);

    // Arc 1 cells map back identically on P1; P1 never touches arc 2.
    for (int k = 0; k < 20; ++k) {
        CHECK(map.arc_cell(0, k) == PathCell{0, k});
        CHECK(map.path_cell(0, 0, k) == k);
        CHECK(map.path_cell(0, 1, k) == -1);
    }

    // Round trip over every (path, cell).
    for (int p = 0; p < map.path_count(); ++p)
        for (int k = 0; k < map.path_length(p); ++k) {
            PathCell c = map.arc_cell(p, k);
            CHECK(map.path_cell(p, c.arc, c.cell) == k);
        }

    // The junction interface sits between 0-based path cells 19 and 20 on
    // both paths (the figures' 1-based J-1 = 20, J = 21).
    for (int p = 0; p < 2; ++p) {
        REQUIRE(map.crossings(p).size() == 1);
        const auto& x = map.crossings(p)[0];
        CHECK(x.junction == 0);
        CHECK(x.cell_after == 20);
        CHECK(x.incoming_arc == p);
        CHECK(x.outgoing_arc == 2);
    }

    // Shared-arc bookkeeping.
    auto users = map.paths_on_arc(2);
    REQUIRE(users.size() == 2);
    CHECK(users[0] == std::pair<int, int>{0, 20});
    CHECK(users[1] == std::pair<int, int>{1, 20});
    CHECK(map.junction_at_arc_start(2) == 0);
    CHECK(map.junction_at_arc_end(2) == -1);
    CHECK(map.junction_at_arc_start(0) == -1);
    CHECK(map.junction_at_arc_end(0) == 0);
    CHECK(map.paths_starting_at(0) == std::vector<int>{0});
    CHECK(map.paths_ending_at(2) == (std::vector<int>{0, 1}));
}

TEST_CASE("path cell map identity on a single road") {
    NetworkSpec net = single_road(10, 0.1);
    auto map = PathCellMap::build(net);
    CHECK(map.path_length(0) == 10);
    for (int k = 0; k < 10; ++k) CHECK(map.arc_cell(0, k) == PathCell{0, k});
    CHECK(map.crossings(0).empty());
}

TEST_CASE("five-arc routes overlap exactly on the shared arc") {
    Scenario sc = build_scenario("five_arc");
    auto map = PathCellMap::build(sc.net);
    int shared = sc.net.arc_index("3");
    REQUIRE(shared >= 0);
    // Both paths traverse arc 3 as their middle leg: cells 20..39.
    for (int k = 20; k < 40; ++k) {
        CHECK(map.arc_cell(0, k).arc == shared);
        CHECK(map.arc_cell(0, k) == map.arc_cell(1, k));
    }
    // The legs before and after differ.
    CHECK(map.arc_cell(0, 0).arc != map.arc_cell(1, 0).arc);
    CHECK(map.arc_cell(0, 40).arc != map.arc_cell(1, 40).arc);
}

TEST_CASE("omega aggregation") {
    NetworkSpec net = merge_net();
    auto map = PathCellMap::build(net);
    PathDensityState st = PathDensityState::zeros(map);

    SUBCASE("empty state aggregates to zero") {
        auto omega = aggregate_omega(st, map);
        for (const auto& w : omega) CHECK(w.abs().maxCoeff() == 0.0);
    }

    SUBCASE("single and shared cells") {
        st.mu[0](5) = 0.4;   // arc 1, only P1
        st.mu[0](25) = 0.3;  // arc 3 cell 5, shared
        st.mu[1](25) = 0.2;
        auto omega = aggregate_omega(st, map);
        CHECK(omega[0](5) == 0.4);
        CHECK(omega[0](25) == 0.5);
        CHECK(omega[1](25) == 0.5); // identical on every traversing path
        CHECK(omega[1](5) == 0.0);

        auto totals = arc_totals(st, map);
        CHECK(totals[0](5) == 0.4);
        CHECK(totals[2](5) == 0.5);
    }

    SUBCASE("linearity in the state") {
        std::mt19937 gen(7);
        st = random_state(net, map, gen);
        auto omega = aggregate_omega(st, map);
        PathDensityState scaled = st;
        for (auto& mu : scaled.mu) mu *= 2.5;
        auto omega2 = aggregate_omega(scaled, map);
        for (std::size_t p = 0; p < omega.size(); ++p)
            CHECK((omega2[p] - 2.5 * omega[p]).abs().maxCoeff() < 1e-15);
    }
}

TEST_SUITE_END();
