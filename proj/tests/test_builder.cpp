#include <doctest.h>

#include "rsched/model/builder.hpp"

using namespace rsched::model;

TEST_CASE("rows classify by variable content") {
    ModelBuilder m;
    const int b = m.add_binary("pick", Stage::First);
    const int t = m.add_continuous("when", Stage::First, 0, 100);
    const int p = m.add_continuous("power", Stage::Second, 0, 50);
    const int s = m.add_continuous("dev", Stage::Uncertainty, 0, 1);

    m.add_row("sched", RowSense::LE, 10, {{b, 3.0}, {t, 1.0}});
    m.add_row("oper", RowSense::LE, 5, {{b, -2.0}, {p, 1.0}});
    m.add_row("scen", RowSense::EQ, 0, {{p, 1.0}, {s, -4.0}});
    m.add_objective(p, 2.5);
    m.finalize();

    CHECK(m.rows()[0].family == Family::Scheduling);
    CHECK(m.rows()[1].family == Family::Recourse);
    CHECK(m.rows()[2].family == Family::Scenario);
    CHECK(m.count_rows(Family::Scheduling) == 1);
    CHECK(m.count_rows(Family::Recourse) == 1);
    CHECK(m.count_rows(Family::Scenario) == 1);
    CHECK(m.count_variables(Stage::First) == 2);
    CHECK(m.variable("power") == p);
    CHECK(m.variable("missing") == -1);
    CHECK(m.require("when") == t);
    CHECK_THROWS_AS(m.require("missing"), ModelError);
    CHECK_THROWS_AS(m.add_row("late", RowSense::LE, 0, {{b, 1.0}}),
                    ModelError);
}

TEST_CASE("duplicate terms are summed and zeros dropped") {
    ModelBuilder m;
    const int a = m.add_continuous("a", Stage::Second, 0, 1);
    const int b = m.add_continuous("b", Stage::Second, 0, 1);
    const int r =
        m.add_row("r", RowSense::GE, 1,
                  {{b, 2.0}, {a, 1.5}, {b, -2.0}, {a, 0.5}});
    REQUIRE(m.rows()[r].terms.size() == 1);
    CHECK(m.rows()[r].terms[0].var == a);
    CHECK(m.rows()[r].terms[0].coef == 2.0);
}

TEST_CASE("structural contract violations are rejected") {
    SUBCASE("scenario row touching a first-stage variable") {
        ModelBuilder m;
        const int b = m.add_binary("pick", Stage::First);
        const int s = m.add_continuous("dev", Stage::Uncertainty, 0, 1);
        m.add_row("bad", RowSense::LE, 1, {{b, 1.0}, {s, 1.0}});
        CHECK_THROWS_WITH_AS(m.finalize(),
                             doctest::Contains("mixes uncertainty"),
                             ModelError);
    }
    SUBCASE("operational variable used only in scheduling rows") {
        ModelBuilder m;
        const int t = m.add_continuous("when", Stage::First, 0, 100);
        const int p = m.add_continuous("power", Stage::Second, 0, 50);
        m.add_row("only", RowSense::LE, 100, {{t, 1.0}});
        (void)p;
        CHECK_THROWS_WITH_AS(m.finalize(),
                             doctest::Contains("stage contradiction"),
                             ModelError);
    }
    SUBCASE("objective on a schedule variable") {
        ModelBuilder m;
        const int t = m.add_continuous("when", Stage::First, 0, 100);
        m.add_objective(t, 1.0);
        CHECK_THROWS_AS(m.finalize(), ModelError);
    }
    SUBCASE("duplicate names") {
        ModelBuilder m;
        m.add_binary("x", Stage::First);
        CHECK_THROWS_AS(m.add_binary("x", Stage::First), ModelError);
        const int y = m.add_binary("y", Stage::First);
        m.add_row("r", RowSense::LE, 1, {{y, 1.0}});
        CHECK_THROWS_AS(m.add_row("r", RowSense::LE, 2, {{y, 1.0}}),
                        ModelError);
    }
    SUBCASE("bad fixes") {
        ModelBuilder m;
        const int b = m.add_binary("x", Stage::First);
        CHECK_THROWS_AS(m.fix(b, 0.5), ModelError);
        CHECK_THROWS_AS(m.fix(b, 2.0), ModelError);
        m.fix(b, 1.0);
        CHECK(m.var(b).lb == 1.0);
        CHECK(m.var(b).ub == 1.0);
    }
}

TEST_CASE("fixed second-stage variables may skip operational rows") {
    // Pinned constants (for example a closed-form availability timeline)
    // do not trigger the stage-contradiction check.
    ModelBuilder m;
    const int p = m.add_continuous("pinned", Stage::Second, 0, 10);
    m.fix(p, 3.0);
    const int q = m.add_continuous("q", Stage::Second, 0, 1);
    m.add_row("r", RowSense::LE, 1, {{q, 1.0}});
    m.finalize();
    CHECK(m.finalized());
}

TEST_CASE("objective entries coalesce in finalize") {
    ModelBuilder m;
    const int p = m.add_continuous("p", Stage::Second, 0, 1);
    const int q = m.add_continuous("q", Stage::Second, 0, 1);
    m.add_row("r", RowSense::LE, 1, {{p, 1.0}, {q, 1.0}});
    m.add_objective(p, 1.0);
    m.add_objective(q, 3.0);
    m.add_objective(p, 2.0);
    m.add_objective(q, -3.0);
    m.add_objective_offset(7.0);
    m.finalize();
    REQUIRE(m.objective().size() == 1);
    CHECK(m.objective()[0].var == p);
    CHECK(m.objective()[0].coef == 3.0);
    CHECK(m.objective_offset() == 7.0);
}
