#pragma once

#include "meadowprob/event.hpp"
#include "meadowprob/lab.hpp"
#include "meadowprob/spec.hpp"
#include "meadowprob/stalk.hpp"

#include <random>
#include <string>
#include <vector>

namespace testsupport {

using namespace meadowprob;

inline std::vector<std::string> gen_names(int k) {
    std::vector<std::string> gens;
    for (int i = 1; i <= k; ++i) gens.push_back("g" + std::to_string(i));
    return gens;
}

// Swap | with & and TOP with BOT throughout.
inline EventTerm dual(const EventTerm& t) {
    switch (t.kind()) {
        case EventTerm::Kind::Top: return EventTerm::bottom();
        case EventTerm::Kind::Bottom: return EventTerm::top();
        case EventTerm::Kind::Or: return dual(t.left()) & dual(t.right());
        case EventTerm::Kind::And: return dual(t.left()) | dual(t.right());
        case EventTerm::Kind::Not: return !dual(t.left());
        default: return t;
    }
}

// Random document together with a model that satisfies it by construction.
struct SatDoc {
    SpecDocument doc;
    PmfModel model;
};

inline SatDoc random_satisfiable_doc(std::mt19937_64& rng) {
    int k = 1 + static_cast<int>(rng() % 3);
    std::vector<std::string> gens = gen_names(k);
    PmfModel m = random_model(gens, rng());

    SpecDocument doc;
    for (const auto& g : gens) doc.decls.push_back(EventDecl{g});

    int n_constraints = 1 + static_cast<int>(rng() % 5);
    for (int c = 0; c < n_constraints; ++c) {
        EventTerm t = random_event_term(gens, rng);
        switch (rng() % 5) {
            case 0: doc.constraints.push_back(ProbEq{t, prob(m, t)}); break;
            case 1: {
                EventTerm u = random_event_term(gens, rng);
                doc.constraints.push_back(JointEq{t, u, prob(m, t & u)});
                break;
            }
            case 2: {
                EventTerm given = random_event_term(gens, rng);
                if (prob(m, given).is_zero()) {
                    doc.constraints.push_back(ProbEq{given, Stalk(0)});
                } else {
                    doc.constraints.push_back(CondEq{t, given, cond(m, t, given)});
                }
                break;
            }
            case 3: {
                Stalk p = prob(m, t);
                // a non-strict bound that the model meets, sometimes strict
                if (rng() % 2) {
                    doc.constraints.push_back(ProbCmp{t, Rel::Le, p + Stalk(1, 7)});
                } else {
                    doc.constraints.push_back(ProbCmp{t, Rel::Ge, p});
                }
                break;
            }
            default: {
                Stalk p = prob(m, t);
                if (lt(Stalk(0), p)) doc.constraints.push_back(ProbCmp{t, Rel::Gt, Stalk(0)});
                else doc.constraints.push_back(ProbEq{t, Stalk(0)});
                break;
            }
        }
    }
    return SatDoc{std::move(doc), std::move(m)};
}

// Document carrying a planted monotonicity violation: the joint event gets a
// larger probability than one of its conjuncts.
inline SpecDocument random_contradictory_doc(std::mt19937_64& rng) {
    int k = 1 + static_cast<int>(rng() % 3);
    std::vector<std::string> gens = gen_names(k);
    SpecDocument doc;
    for (const auto& g : gens) doc.decls.push_back(EventDecl{g});

    EventTerm a = EventTerm::generator(gens[rng() % gens.size()]);
    EventTerm b = random_event_term(gens, rng);
    long denom = 5 + static_cast<long>(rng() % 20);
    Stalk smaller(1 + static_cast<long>(rng() % 3), denom);
    Stalk larger = smaller + Stalk(1 + static_cast<long>(rng() % 3), denom);
    if (lt(Stalk(1), larger)) larger = Stalk(1);
    if (!lt(smaller, larger)) smaller = larger - Stalk(1, 100);
    doc.constraints.push_back(ProbEq{a & b, larger});
    doc.constraints.push_back(ProbEq{a, smaller});
    return doc;
}

} // namespace testsupport
