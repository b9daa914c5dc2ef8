#include "meadowprob/errors.hpp"
#include "meadowprob/lab.hpp"
#include "meadowprob/solver.hpp"
#include "meadowprob/spec.hpp"

#include <doctest.h>

#include "support.hpp"

#include <random>

using namespace meadowprob;

namespace {

LinRow row(std::vector<long> coeffs, Stalk rhs, bool strict = false) {
    std::vector<Stalk> c;
    for (long v : coeffs) c.push_back(Stalk(v));
    return LinRow{std::move(c), rhs, strict};
}

const char* kScreeningP =
    "event RD; event NH; P(RD) = 1/100000; P(NH) = 4/10; P(NH | RD) = 8/10;";
const char* kScreeningR =
    "event RD; event NH; P(RD) = 1/100000; P(NH) = 1/1000000; P(NH | RD) = 8/10;";

// Split a rendered ground comparison "a >= b" / "a > b" into its two sides.
struct GroundCmp {
    Stalk lhs, rhs;
    bool strict;
};

GroundCmp parse_ground(const std::string& text) {
    auto pos = text.find(" >= ");
    bool strict = false;
    std::size_t w = 4;
    if (pos == std::string::npos) {
        pos = text.find(" > ");
        strict = true;
        w = 3;
    }
    REQUIRE(pos != std::string::npos);
    return GroundCmp{Stalk::from_string(text.substr(0, pos)),
                     Stalk::from_string(text.substr(pos + w)), strict};
}

} // namespace

TEST_CASE("fm_eliminate projects bounded intervals away") {
    LinearSystem sys;
    sys.vars = {"u"};
    sys.inequalities.push_back(row({1}, Stalk(0)));        // u >= 0
    sys.inequalities.push_back(row({-1}, Stalk(-1, 2)));   // u <= 1/2
    LinearSystem projected = fm_eliminate(sys, "u");
    CHECK(projected.vars.empty());
    CHECK(projected.inequalities.empty());
    CHECK(projected.equalities.empty());
}

TEST_CASE("fm_eliminate keeps ground contradictions") {
    LinearSystem sys;
    sys.vars = {"u"};
    sys.inequalities.push_back(row({1}, Stalk(1), true));    // u > 1
    sys.inequalities.push_back(row({-1}, Stalk(-1), true));  // u < 1
    LinearSystem projected = fm_eliminate(sys, "u");
    REQUIRE(projected.inequalities.size() == 1);
    const LinRow& ground = projected.inequalities[0];
    CHECK(ground.coeffs.empty());
    CHECK(ground.strict);
    CHECK(ground.rhs == Stalk(0));  // 0 > 0 is the retained falsehood
}

TEST_CASE("fm_eliminate pairs lower and upper bounds") {
    LinearSystem sys;
    sys.vars = {"u", "v"};
    sys.inequalities.push_back(row({1, -1}, Stalk(0)));  // u >= v
    sys.inequalities.push_back(row({-1, 0}, Stalk(-1))); // u <= 1
    sys.inequalities.push_back(row({0, 1}, Stalk(3, 4)));// v >= 3/4
    LinearSystem projected = fm_eliminate(sys, "u");
    CHECK(projected.vars == std::vector<std::string>{"v"});
    REQUIRE(projected.inequalities.size() == 2);
    // v >= 3/4 survives untouched; the pairing derives v <= 1
    CHECK(projected.inequalities[0] == LinRow{{Stalk(1)}, Stalk(3, 4), false});
    CHECK(projected.inequalities[1] == LinRow{{Stalk(-1)}, Stalk(-1), false});
}

TEST_CASE("projection is exact: a point satisfies it iff it extends") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 60; ++t) {
        LinearSystem sys;
        sys.vars = {"a", "b", "c"};
        int n_rows = 2 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n_rows; ++i) {
            std::vector<Stalk> coeffs;
            for (int j = 0; j < 3; ++j)
                coeffs.push_back(Stalk(static_cast<long>(rng() % 5) - 2));
            sys.inequalities.push_back(
                LinRow{std::move(coeffs), Stalk(static_cast<long>(rng() % 5) - 2, 2), rng() % 4 == 0});
        }
        LinearSystem projected = fm_eliminate(sys, "a");

        for (long bi = -4; bi <= 4; bi += 2) {
            for (long ci = -4; ci <= 4; ci += 2) {
                Stalk b(bi, 2), c(ci, 2);
                bool proj_ok = true;
                for (const auto& r : projected.inequalities) {
                    Stalk acc = r.coeffs[0] * b + r.coeffs[1] * c;
                    if (!(r.strict ? lt(r.rhs, acc) : le(r.rhs, acc))) { proj_ok = false; break; }
                }
                // independent oracle: the interval for `a` implied by the
                // original rows at (b, c) is nonempty
                std::optional<std::pair<Stalk, bool>> lo, hi;
                bool ground_ok = true;
                for (const auto& r : sys.inequalities) {
                    Stalk rest = r.rhs - r.coeffs[1] * b - r.coeffs[2] * c;
                    int s = r.coeffs[0].signum();
                    if (s == 0) {
                        if (!(r.strict ? lt(Stalk(0), -rest) : le(Stalk(0), -rest))) ground_ok = false;
                        continue;
                    }
                    Stalk bound = div(rest, r.coeffs[0]);
                    if (s > 0) {
                        if (!lo || lt(lo->first, bound)) lo = {bound, r.strict};
                        else if (lo->first == bound) lo->second = lo->second || r.strict;
                    } else {
                        if (!hi || lt(bound, hi->first)) hi = {bound, r.strict};
                        else if (hi->first == bound) hi->second = hi->second || r.strict;
                    }
                }
                bool extends = ground_ok;
                if (extends && lo && hi) {
                    if (lt(hi->first, lo->first)) extends = false;
                    else if (lo->first == hi->first && (lo->second || hi->second)) extends = false;
                }
                CHECK(proj_ok == extends);
            }
        }
    }
}

TEST_CASE("empty constraint set over one generator gives the midpoint witness") {
    SolveResult r = solve(lower(parse_spec("event x;")));
    const Witness& w = std::get<Witness>(r);
    CHECK(w.weights.at("0") == Stalk(1, 2));
    CHECK(w.weights.at("1") == Stalk(1, 2));
}

TEST_CASE("the screening data admit exactly one model and we find it") {
    SpecDocument doc = parse_spec(kScreeningP);
    SolveResult r = solve(lower(doc));
    REQUIRE(std::holds_alternative<Witness>(r));
    const Witness& w = std::get<Witness>(r);
    CHECK(w.weights.at("11") == Stalk(1, 125000));
    CHECK(w.weights.at("10") == Stalk(1, 500000));
    CHECK(w.weights.at("01") == Stalk(49999, 125000));
    CHECK(w.weights.at("00") == Stalk(299999, 500000));
    CHECK(verify_witness(doc, w));
    // hand checks: P(RD) splits as stated and the conditional holds
    CHECK(w.weights.at("11") + w.weights.at("10") == Stalk(1, 100000));
    CHECK(div(w.weights.at("11"), Stalk(1, 100000)) == Stalk(4, 5));
    CHECK(w.branch == std::vector<std::pair<std::string, std::string>>{
                          {"P(NH | RD) = 4/5", "positive"}});
}

TEST_CASE("the rare-habit variant is refuted with the monotonicity contradiction") {
    SpecDocument doc = parse_spec(kScreeningR);
    SolveResult r = solve(lower(doc));
    REQUIRE(std::holds_alternative<Infeasible>(r));
    const Infeasible& inf = std::get<Infeasible>(r);
    GroundCmp g = parse_ground(inf.contradiction);
    CHECK(g.lhs == Stalk(1, 1000000));
    CHECK(g.rhs == Stalk(8, 1000000));
    CHECK(!g.strict);
    CHECK(!inf.steps.empty());
}

TEST_CASE("verify_witness rejects short mass and wrong conditionals") {
    SpecDocument doc = parse_spec(kScreeningP);
    Witness bad;
    bad.weights["11"] = Stalk(1, 10);
    bad.weights["10"] = Stalk(2, 10);
    bad.weights["01"] = Stalk(3, 10);
    bad.weights["00"] = Stalk(3, 10);  // sums to 9/10
    CHECK(!verify_witness(doc, bad));

    Witness wrong;
    wrong.weights["11"] = Stalk(1, 4);
    wrong.weights["10"] = Stalk(1, 4);
    wrong.weights["01"] = Stalk(1, 4);
    wrong.weights["00"] = Stalk(1, 4);
    CHECK(!verify_witness(doc, wrong));
}

TEST_CASE("strict and totalized readings differ on zero-probability conditions") {
    const char* text = "event x; event y; P(y) = 0; P(x | y) = 0;";
    SpecDocument doc = parse_spec(text);
    SolveResult strict = solve(lower(doc), SolverMode::Strict);
    CHECK(std::holds_alternative<Infeasible>(strict));
    SolveResult meadow = solve(lower(doc), SolverMode::Meadow);
    REQUIRE(std::holds_alternative<Witness>(meadow));
    const Witness& w = std::get<Witness>(meadow);
    CHECK(w.branch == std::vector<std::pair<std::string, std::string>>{
                          {"P(x | y) = 0", "zero"}});
    CHECK(verify_witness(doc, w));

    // a nonzero target has no totalized zero branch either
    SpecDocument impossible = parse_spec("event x; event y; P(y) = 0; P(x | y) = 1/2;");
    CHECK(std::holds_alternative<Infeasible>(solve(lower(impossible), SolverMode::Meadow)));
}

TEST_CASE("solver soundness on fuzzed satisfiable documents") {
    std::mt19937_64 rng(59);
    for (int t = 0; t < 120; ++t) {
        testsupport::SatDoc sample = testsupport::random_satisfiable_doc(rng);
        SolveResult r = solve(lower(sample.doc));
        REQUIRE_MESSAGE(std::holds_alternative<Witness>(r),
                        "expected SAT for:\n" << render_spec(sample.doc));
        CHECK(verify_witness(sample.doc, std::get<Witness>(r)));
    }
}

TEST_CASE("planted contradictions are refuted, and no sampled model satisfies them") {
    std::mt19937_64 rng(61);
    int refutation_checks = 0;
    for (int t = 0; t < 120; ++t) {
        SpecDocument doc = testsupport::random_contradictory_doc(rng);
        SolveResult r = solve(lower(doc));
        REQUIRE_MESSAGE(std::holds_alternative<Infeasible>(r),
                        "expected UNSAT for:\n" << render_spec(doc));
        if (t < 3) {
            // refutation soundness, sampled: 10000 random models all violate
            std::vector<std::string> gens = doc.generators();
            for (int s = 0; s < 10000; ++s) {
                PmfModel m = random_model(gens, rng());
                Witness w;
                for (uint32_t i = 0; i < m.minterm_count(); ++i)
                    w.weights[minterm_bits(i, m.width())] = m.weight(i);
                if (verify_witness(doc, w)) {
                    FAIL("sampled model satisfies a refuted document:\n" << render_spec(doc));
                }
                ++refutation_checks;
            }
        }
    }
    CHECK(refutation_checks == 30000);
}

TEST_CASE("solve results serialize to the documented schema") {
    SpecDocument doc = parse_spec(kScreeningP);
    SolveResult sat = solve(lower(doc));
    nlohmann::json js = to_json(sat);
    CHECK(js["status"] == "sat");
    CHECK(js["witness"]["11"] == "1/125000");
    CHECK(Stalk::from_string(js["witness"]["00"].get<std::string>()) == Stalk(299999, 500000));
    CHECK(js["branch"]["cases"][0]["case"] == "positive");

    SolveResult unsat = solve(lower(parse_spec(kScreeningR)));
    nlohmann::json ju = to_json(unsat);
    CHECK(ju["status"] == "unsat");
    REQUIRE(!ju["trace"].empty());
    nlohmann::json last = ju["trace"].back();
    REQUIRE(last.contains("contradiction"));
    GroundCmp g = parse_ground(last["contradiction"].get<std::string>());
    CHECK(g.lhs == Stalk(1, 1000000));
    CHECK(g.rhs == Stalk(1, 125000));
}

TEST_CASE("conditional case splits explore the totalized branches") {
    // consistent only when the conditioning event has probability zero
    const char* text = "event x; event y; P(x & y) = 0; P(x) = 0; P(y | x) = 0; P(y) = 1/2;";
    SpecDocument doc = parse_spec(text);
    CHECK(std::holds_alternative<Infeasible>(solve(lower(doc), SolverMode::Strict)));
    SolveResult r = solve(lower(doc), SolverMode::Meadow);
    REQUIRE(std::holds_alternative<Witness>(r));
    CHECK(verify_witness(doc, std::get<Witness>(r)));
}
