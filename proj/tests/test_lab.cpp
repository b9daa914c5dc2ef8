#include "meadowprob/errors.hpp"
#include "meadowprob/lab.hpp"
#include "meadowprob/spec.hpp"

#include <doctest.h>

#include "support.hpp"

#include <algorithm>
#include <random>

using namespace meadowprob;

namespace {

using SE = StalkExpr;

PmfModel screening_model() {
    return PmfModel({"RD", "NH"},
                    {Stalk(299999, 500000), Stalk(49999, 125000), Stalk(1, 500000),
                     Stalk(1, 125000)});
}

std::vector<std::string> bits_of(const std::vector<uint32_t>& idx, int width) {
    std::vector<std::string> out;
    for (uint32_t i : idx) out.push_back(minterm_bits(i, width));
    return out;
}

} // namespace

TEST_CASE("expression evaluation against a model") {
    PmfModel m = screening_model();
    ResolveContext ctx = ResolveContext::free();
    Env env;
    CHECK(eval_expr(parse_stalk_expr_text("P(RD | NH)", ctx), m, env) == Stalk(1, 50000));
    CHECK(eval_expr(SE::constant(Stalk(7, 3)), m, env) == Stalk(7, 3));
    CHECK(eval_expr(parse_stalk_expr_text("s(P(RD)) + inv(P(NH))", ctx), m, env) ==
          Stalk(1) + Stalk(5, 2));
    CHECK_THROWS_AS(eval_expr(SE::variable("loose"), m, env), NameError);
    env.stalks["loose"] = Stalk(9);
    CHECK(eval_expr(SE::variable("loose"), m, env) == Stalk(9));
}

TEST_CASE("event bindings substitute before probabilities are read") {
    PmfModel m = screening_model();
    Env env;
    env.events["e"] = EventTerm::generator("RD") & EventTerm::generator("NH");
    CHECK(eval_expr(SE::prob(EventTerm::generator("e")), m, env) == Stalk(1, 125000));
}

TEST_CASE("nonnegativity of P holds as a sign equation") {
    EventTerm x = EventTerm::generator("x");
    Verdict v = check_equation(SE::sign(SE::sign(SE::prob(x)) + SE::constant(Stalk(1))),
                               SE::constant(Stalk(1)), 400, 3);
    CHECK(v.holds());
}

TEST_CASE("decomposition of a tautology over one variable") {
    EventTerm x = EventTerm::generator("x");
    GuardedEquation ge =
        atom_decompose(SE::prob(x | !x), SE::constant(Stalk(1)), {"x"});
    CHECK(ge.z_vars == std::vector<std::string>{"z1"});
    CHECK(ge.u_vars == std::vector<std::string>{"u0", "u1"});
    REQUIRE(ge.h_sets.size() == 1);
    CHECK(ge.h_sets[0] == std::vector<uint32_t>{0, 1});
    CHECK(ge.lhs == SE::variable("z1"));
    CHECK(ge.rhs == SE::constant(Stalk(1)));
    CHECK(ge.guard.str().find("z1 - (u0 + u1)") != std::string::npos);

    // under any canonical assignment the replaced occurrence is pinned to 1
    PmfModel m = random_model({"x"}, 99);
    Env env = canonical_assignment(ge, m);
    CHECK(env.stalks.at("z1") == Stalk(1));
    CHECK(eval_expr(ge.guard, m, env) == Stalk(1));
}

TEST_CASE("decomposition of P(BOT) binds its variable to the empty sum") {
    GuardedEquation ge = atom_decompose(SE::prob(EventTerm::bottom()),
                                        SE::constant(Stalk(0)), {"x"});
    REQUIRE(ge.h_sets.size() == 1);
    CHECK(ge.h_sets[0].empty());
    PmfModel m = random_model({"x"}, 5);
    Env env = canonical_assignment(ge, m);
    CHECK(env.stalks.at("z1") == Stalk(0));
}

TEST_CASE("decomposition of the additivity law over two variables") {
    EventTerm x = EventTerm::generator("x");
    EventTerm y = EventTerm::generator("y");
    SE lhs = SE::prob(x | y);
    SE rhs = SE::prob(x) + SE::prob(y) - SE::prob(x & y);
    GuardedEquation ge = atom_decompose(lhs, rhs, {"x", "y"});
    REQUIRE(ge.h_sets.size() == 4);
    CHECK(bits_of(ge.h_sets[0], 2) == std::vector<std::string>{"01", "10", "11"});
    CHECK(bits_of(ge.h_sets[1], 2) == std::vector<std::string>{"10", "11"});
    CHECK(bits_of(ge.h_sets[2], 2) == std::vector<std::string>{"01", "11"});
    CHECK(bits_of(ge.h_sets[3], 2) == std::vector<std::string>{"11"});
    CHECK(ge.u_vars.size() == 4);

    // the guarded equation holds identically: F*t' = F*r' on arbitrary
    // assignments, canonical or not
    std::mt19937_64 rng(67);
    PmfModel dummy({}, {Stalk(1)});
    for (int t = 0; t < 300; ++t) {
        Env env;
        for (const auto& u : ge.u_vars) env.stalks[u] = random_stalk(rng);
        for (const auto& z : ge.z_vars) env.stalks[z] = random_stalk(rng);
        Stalk guard = eval_expr(ge.guard, dummy, env);
        CHECK((guard == Stalk(0) || guard == Stalk(1)));
        CHECK(guard * eval_expr(ge.lhs, dummy, env) ==
              guard * eval_expr(ge.rhs, dummy, env));
    }
}

TEST_CASE("a refutable equation fails under some canonical assignment") {
    EventTerm x = EventTerm::generator("x");
    GuardedEquation ge = atom_decompose(SE::prob(x), SE::prob(!x), {"x"});
    PmfModel dummy({}, {Stalk(1)});
    bool refuted = false;
    for (uint64_t seed = 0; seed < 50 && !refuted; ++seed) {
        PmfModel m = random_model({"x"}, seed);
        Env env = canonical_assignment(ge, m);
        REQUIRE(eval_expr(ge.guard, dummy, env) == Stalk(1));
        if (eval_expr(ge.lhs, dummy, env) != eval_expr(ge.rhs, dummy, env)) refuted = true;
    }
    CHECK(refuted);
}

TEST_CASE("conditional nodes are rewritten before decomposition") {
    EventTerm x = EventTerm::generator("x");
    EventTerm y = EventTerm::generator("y");
    GuardedEquation ge = atom_decompose(SE::cond(x, y), SE::variable("p"), {"x", "y"});
    REQUIRE(ge.h_sets.size() == 2);
    CHECK(bits_of(ge.h_sets[0], 2) == std::vector<std::string>{"11"});       // P(x & y)
    CHECK(bits_of(ge.h_sets[1], 2) == std::vector<std::string>{"01", "11"}); // P(y)
    CHECK(ge.lhs == SE::div(SE::variable("z1"), SE::variable("z2")));
}

TEST_CASE("guard semantics: 1 on canonical assignments, 0 on each violation") {
    std::mt19937_64 rng(71);
    PmfModel dummy({}, {Stalk(1)});
    for (int t = 0; t < 100; ++t) {
        int k = 1 + static_cast<int>(rng() % 3);
        std::vector<std::string> gens = testsupport::gen_names(k);
        EventTerm f = random_event_term(gens, rng);
        EventTerm g = random_event_term(gens, rng);
        GuardedEquation ge =
            atom_decompose(SE::prob(f), SE::prob(g) + SE::variable("p"), gens);
        PmfModel m = random_model(gens, rng());
        Env env = canonical_assignment(ge, m);
        env.stalks["p"] = random_stalk(rng);
        CHECK(eval_expr(ge.guard, dummy, env) == Stalk(1));
        CHECK(eval_expr(ge.lhs, dummy, env) == eval_expr(SE::prob(f), m, env));

        Env broken_total = env;
        broken_total.stalks[ge.u_vars[rng() % ge.u_vars.size()]] += Stalk(1, 3);
        CHECK(eval_expr(ge.guard, dummy, broken_total) == Stalk(0));

        Env negative = env;
        negative.stalks[ge.u_vars[rng() % ge.u_vars.size()]] = Stalk(-1, 4);
        CHECK(eval_expr(ge.guard, dummy, negative) == Stalk(0));

        Env broken_z = env;
        broken_z.stalks[ge.z_vars[rng() % ge.z_vars.size()]] += Stalk(1);
        CHECK(eval_expr(ge.guard, dummy, broken_z) == Stalk(0));
    }
}

TEST_CASE("probabilities decompose into minterm weight sums") {
    std::mt19937_64 rng(73);
    for (int t = 0; t < 200; ++t) {
        int k = 1 + static_cast<int>(rng() % 4);
        std::vector<std::string> gens = testsupport::gen_names(k);
        PmfModel m = random_model(gens, rng());
        EventTerm f = random_event_term(gens, rng);
        Stalk total;
        for (uint32_t idx : minterms(f, gens).indices) total += m.weight(idx);
        CHECK(prob(m, f) == total);
    }
}

TEST_CASE("random models are deterministic, valid and can force zeros") {
    PmfModel a = random_model({"x", "y"}, 12345);
    PmfModel b = random_model({"x", "y"}, 12345);
    CHECK(a == b);
    CHECK(a != random_model({"x", "y"}, 54321));

    for (uint64_t seed = 0; seed < 1000; ++seed) {
        PmfModel m = random_model(testsupport::gen_names(3), seed);
        CHECK(m.minterm_count() == 8);  // construction already validated the invariants
    }

    RandomModelOptions all_zero;
    all_zero.zero_weight_prob = 1.0;
    PmfModel forced = random_model({"x", "y"}, 7, all_zero);
    int zeros = 0;
    for (uint32_t i = 0; i < forced.minterm_count(); ++i)
        if (forced.weight(i).is_zero()) ++zeros;
    CHECK(zeros == 3);  // everything but one cell carries weight 0
}

TEST_CASE("check_equation accepts the support law and refutes a false one") {
    EventTerm x = EventTerm::generator("x");
    EventTerm y = EventTerm::generator("y");
    SE lhs = SE::prob(x & y) * SE::prob(y) * SE::inv(SE::prob(y));
    CHECK(check_equation(lhs, SE::prob(x & y), 1000, 0).holds());

    Verdict v = check_equation(SE::prob(x), SE::prob(!x), 200, 0);
    REQUIRE(!v.holds());
    CHECK(v.counterexample->lhs_value != v.counterexample->rhs_value);
    CHECK(!v.counterexample->describe().empty());
}

TEST_CASE("the rationals-only equation holds on every sampled model") {
    EventTerm a = EventTerm::generator("a");
    SE sq = SE::constant(Stalk(2)) * (SE::prob(a) * SE::prob(a)) - SE::constant(Stalk(1));
    CHECK(check_equation(SE::div(sq, sq), SE::constant(Stalk(1)), 1000, 17).holds());
}

TEST_CASE("the law suite passes and carries the documented item count") {
    SuiteReport report = axiom_suite(60, 2024);
    CHECK(report.all_passed());
    CHECK(report.items.size() == 43);

    int axioms = 0;
    for (const auto& item : report.items) {
        CHECK(item.trials == 60);
        if (item.id.rfind("ba.", 0) == 0 || item.id.rfind("md.", 0) == 0 ||
            item.id.rfind("sign.", 0) == 0 || item.id.rfind("pmf.", 0) == 0)
            ++axioms;
    }
    CHECK(axioms == 27);

    std::string table = render_table(report);
    CHECK(table.find("all laws hold") != std::string::npos);
    nlohmann::json j = to_json(report);
    CHECK(j["all_passed"] == true);
    CHECK(j["items"].size() == 43);
}

TEST_CASE("a sabotaged sign operator is caught by the sign laws") {
    EvalHooks hooks;
    hooks.sign_fn = [](const Stalk& s) {
        if (s.is_zero()) return Stalk(1);  // wrong at zero
        return sign(s);
    };
    SuiteReport report = axiom_suite(80, 5, &hooks);
    CHECK(!report.all_passed());
    bool zero_ind_law_failed = false;
    for (const auto& item : report.items)
        if (item.id == "sign.fix-zero-ind" && !item.passed) zero_ind_law_failed = true;
    CHECK(zero_ind_law_failed);
}
