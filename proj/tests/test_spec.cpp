#include "meadowprob/errors.hpp"
#include "meadowprob/lab.hpp"
#include "meadowprob/spec.hpp"

#include <doctest.h>

#include "support.hpp"

#include <random>

using namespace meadowprob;

namespace {

const char* kScreeningSpec =
    "event RD; event NH; P(RD) = 1/100000; P(NH) = 4/10; P(NH | RD) = 8/10;";

const char* kBoxesSpec = R"(
var A in {occ, empty};
var B in {occ, empty};
var C in {occ, empty};
P(C = occ | A = empty) = P(A = empty | A = empty);
P(C = occ | B = empty) = P(B = empty | B = empty);
P(A = empty, B = empty) = 0;
P((A = empty | B = empty)) > 0;
eval P(C = occ | (A = empty | B = empty));
)";

} // namespace

TEST_CASE("parsing the screening specification") {
    SpecDocument doc = parse_spec(kScreeningSpec);
    CHECK(doc.decls.size() == 2);
    CHECK(doc.constraints.size() == 3);
    REQUIRE(std::holds_alternative<ProbEq>(doc.constraints[0]));
    CHECK(std::get<ProbEq>(doc.constraints[0]).value == Stalk(1, 100000));
    CHECK(std::get<ProbEq>(doc.constraints[1]).value == Stalk(2, 5));  // 4/10 normalized
    REQUIRE(std::holds_alternative<CondEq>(doc.constraints[2]));
    CHECK(std::get<CondEq>(doc.constraints[2]).value == Stalk(4, 5));
    CHECK(doc.generators() == std::vector<std::string>{"RD", "NH"});
}

TEST_CASE("empty input yields an empty document") {
    SpecDocument doc = parse_spec("");
    CHECK(doc.decls.empty());
    CHECK(doc.constraints.empty());
    CHECK(doc.queries.empty());
    CHECK(render_spec(doc).empty());
}

TEST_CASE("name errors carry the offending name") {
    CHECK_THROWS_AS(parse_spec("P(X) = 1/2;"), NameError);
    CHECK_THROWS_AS(parse_spec("event A; event A;"), NameError);
    CHECK_THROWS_AS(parse_spec("event A; var A in {x, y};"), NameError);
    CHECK_THROWS_AS(parse_spec("var V in {a, a};"), NameError);
    CHECK_THROWS_AS(parse_spec("event A; P(B = x) = 1;"), NameError);
}

TEST_CASE("syntax errors report a position") {
    try {
        parse_spec("event A;\nP(A) = ;\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() >= 8);
    }
    CHECK_THROWS_AS(parse_spec("event"), ParseError);
    CHECK_THROWS_AS(parse_spec("P(A) < P(B);"), ParseError);  // only '=' joins two P-terms
}

TEST_CASE("comments and decimal literals") {
    SpecDocument doc = parse_spec("# prior data\nevent A;\nP(A) = 0.4; # exact\n");
    CHECK(std::get<ProbEq>(doc.constraints[0]).value == Stalk(2, 5));
}

TEST_CASE("the conditioning bar binds last inside P(...)") {
    SpecDocument doc = parse_spec("event a; event b; P(a | b) = 1/2; P((a | b)) = 3/4;");
    CHECK(std::holds_alternative<CondEq>(doc.constraints[0]));
    REQUIRE(std::holds_alternative<ProbEq>(doc.constraints[1]));
    CHECK(std::get<ProbEq>(doc.constraints[1]).term.kind() == EventTerm::Kind::Or);
}

TEST_CASE("joint, comparison and independence forms") {
    SpecDocument doc = parse_spec(
        "event a; event b; P(a, b) = 1/3; P(a & b) >= 1/4; P(b) < 1; independent(a, b);"
        "P(a, b | a) = 1/3;");
    CHECK(std::holds_alternative<JointEq>(doc.constraints[0]));
    CHECK(std::holds_alternative<ProbCmp>(doc.constraints[1]));
    CHECK(std::get<ProbCmp>(doc.constraints[2]).rel == Rel::Lt);
    CHECK(std::holds_alternative<IndependentDecl>(doc.constraints[3]));
    const auto& joint_cond = std::get<CondEq>(doc.constraints[4]);
    CHECK(joint_cond.event.kind() == EventTerm::Kind::And);
}

TEST_CASE("parse of the boxes specification") {
    SpecDocument doc = parse_spec(kBoxesSpec);
    CHECK(doc.decls.size() == 3);
    CHECK(doc.constraints.size() == 4);
    CHECK(doc.queries.size() == 1);
    CHECK(doc.generators() == std::vector<std::string>{"A", "B", "C"});
    REQUIRE(std::holds_alternative<CondEqCond>(doc.constraints[0]));
    const auto& req1 = std::get<CondEqCond>(doc.constraints[0]);
    CHECK(req1.e1 == EventTerm::generator("C"));
    CHECK(req1.g1 == !EventTerm::generator("A"));
    CHECK(req1.e2 == !EventTerm::generator("A"));
}

TEST_CASE("render and reparse is the identity on documents") {
    for (const char* text : {kScreeningSpec, kBoxesSpec}) {
        SpecDocument doc = parse_spec(text);
        CHECK(parse_spec(render_spec(doc)) == doc);
    }
    SpecDocument all_forms = parse_spec(
        "event a; event b; var T in {u, v, w};\n"
        "P(a) = 1/3; P(a, b) = 0; P(a | b) = 1/2; P(a) = P(b); P(!a & b) > 1/8;\n"
        "P(T = u) <= 1/2; independent(a, b);\n"
        "eval P(a | b) * 3 - s(P(b)) / inv(P(a)); eval -1/2 + P((a | b));\n");
    CHECK(parse_spec(render_spec(all_forms)) == all_forms);
}

TEST_CASE("round-trip holds on random satisfiable documents") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 200; ++t) {
        SpecDocument doc = testsupport::random_satisfiable_doc(rng).doc;
        CHECK(parse_spec(render_spec(doc)) == doc);
    }
}

TEST_CASE("lowering the screening specification") {
    ConstraintSystem cs = lower(parse_spec(kScreeningSpec));
    CHECK(cs.gens == std::vector<std::string>{"RD", "NH"});
    CHECK(cs.base.vars == std::vector<std::string>{"u00", "u01", "u10", "u11"});
    REQUIRE(cs.base.equalities.size() == 3);

    const EqRow& total = cs.base.equalities[0];
    CHECK(total.coeffs == std::vector<Stalk>{Stalk(1), Stalk(1), Stalk(1), Stalk(1)});
    CHECK(total.rhs == Stalk(1));

    const EqRow& rd = cs.base.equalities[1];
    CHECK(rd.coeffs == std::vector<Stalk>{Stalk(0), Stalk(0), Stalk(1), Stalk(1)});
    CHECK(rd.rhs == Stalk(1, 100000));

    const EqRow& nh = cs.base.equalities[2];
    CHECK(nh.coeffs == std::vector<Stalk>{Stalk(0), Stalk(1), Stalk(0), Stalk(1)});
    CHECK(nh.rhs == Stalk(2, 5));

    REQUIRE(cs.conditionals.size() == 1);
    const ConditionalConstraint& cc = cs.conditionals[0];
    CHECK(cc.guard == std::vector<Stalk>{Stalk(0), Stalk(0), Stalk(1), Stalk(1)});
    CHECK(cc.positive_equation.coeffs ==
          std::vector<Stalk>{Stalk(0), Stalk(0), Stalk(-4, 5), Stalk(1, 5)});
    CHECK(cc.positive_equation.rhs == Stalk(0));
    CHECK(!cc.zero_branch_ok);

    // nonnegativity of every minterm weight
    CHECK(cs.base.inequalities.size() == 4);
}

TEST_CASE("declaration-only documents lower to the simplex") {
    ConstraintSystem cs = lower(parse_spec("event a; event b;"));
    CHECK(cs.base.equalities.size() == 1);
    CHECK(cs.base.inequalities.size() == 4);
    CHECK(cs.conditionals.empty());
}

TEST_CASE("a zero joint requirement is one equality over two minterms") {
    ConstraintSystem cs = lower(parse_spec(
        "var A in {occ, empty}; var B in {occ, empty}; var C in {occ, empty};"
        "P(A = empty, B = empty) = 0;"));
    REQUIRE(cs.base.equalities.size() == 2);
    const EqRow& row = cs.base.equalities[1];
    int nonzero = 0;
    for (const auto& c : row.coeffs)
        if (!c.is_zero()) ++nonzero;
    CHECK(nonzero == 2);
    CHECK(row.rhs == Stalk(0));
    // 'A' is the most significant bit, so the affected minterms are 000 and 001
    CHECK(row.coeffs[0] == Stalk(1));
    CHECK(row.coeffs[1] == Stalk(1));
}

TEST_CASE("nonlinear constraints are rejected with a diagnostic") {
    CHECK_THROWS_AS(lower(parse_spec("event a; event b; independent(a, b);")), LoweringError);
    CHECK_THROWS_AS(lower(parse_spec("event a; event b; event c; P(a | b) = P(a | c);")),
                    LoweringError);
    // equivalent conditioning events are fine even when spelled differently
    ConstraintSystem ok = lower(parse_spec("event a; event b; P(a | b) = P(!a | b & b);"));
    CHECK(ok.conditionals.size() == 1);
    CHECK(ok.conditionals[0].zero_branch_ok);
}

TEST_CASE("unused variable codes are pinned to zero by lowering") {
    ConstraintSystem cs = lower(parse_spec("var T in {a, b, c};"));
    CHECK(cs.gens == std::vector<std::string>{"T.0", "T.1"});
    REQUIRE(cs.base.equalities.size() == 2);
    const EqRow& unused = cs.base.equalities[1];
    CHECK(unused.rhs == Stalk(0));
    int nonzero = 0;
    for (const auto& c : unused.coeffs)
        if (!c.is_zero()) ++nonzero;
    CHECK(nonzero == 1);
}

TEST_CASE("generator cap is enforced at lowering") {
    std::string text;
    for (int i = 0; i < 17; ++i) text += "event e" + std::to_string(i) + ";";
    CHECK_THROWS_AS(lower(parse_spec(text)), CapError);
}

TEST_CASE("stand-alone expression parsing") {
    SpecDocument doc = parse_spec(kScreeningSpec);
    ResolveContext ctx = ResolveContext::for_document(doc);
    StalkExpr q = parse_stalk_expr_text("P(RD | NH)", ctx);
    CHECK(q.kind() == StalkExpr::Kind::Cond);
    CHECK_THROWS_AS(parse_stalk_expr_text("P(zzz)", ctx), NameError);
    CHECK_THROWS_AS(parse_stalk_expr_text("freevar + 1", ctx), NameError);

    ResolveContext free_ctx = ResolveContext::free();
    StalkExpr e = parse_stalk_expr_text("p * P(x & y) + inv(q)", free_ctx);
    CHECK(e.kind() == StalkExpr::Kind::Add);
    EventTerm ev = parse_event_text("x & !y | TOP", free_ctx);
    CHECK(ev.kind() == EventTerm::Kind::Or);
}

TEST_CASE("stalk expressions render and reparse") {
    ResolveContext free_ctx = ResolveContext::free();
    for (const char* text :
         {"P(x) + P(y) - P(x & y)", "s(s(P(x)) + 1)", "-1/2 * inv(p - q)",
          "P(x | y) / P((x | y))", "2 * (p + q) * r", "p - (q - r)", "0.4 + 1/3"}) {
        StalkExpr e = parse_stalk_expr_text(text, free_ctx);
        CHECK(parse_stalk_expr_text(e.str(), free_ctx) == e);
    }
}
