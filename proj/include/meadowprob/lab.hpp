#pragma once

#include "meadowprob/event.hpp"
#include "meadowprob/pmf.hpp"
#include "meadowprob/spec.hpp"
#include "meadowprob/stalk.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace meadowprob {

/// Valuation of the free names of an expression: stalk variables to stalks,
/// event variables to event terms over the model's generators.
struct Env {
    std::map<std::string, Stalk> stalks;
    std::map<std::string, EventTerm> events;
};

/// Test seam: overriding an operator lets the suite prove it would catch a
/// law violation. Null members mean the built-in operation.
struct EvalHooks {
    std::function<Stalk(const Stalk&)> sign_fn;
};

/// Structural evaluation; P and conditional nodes are resolved against the
/// model after substituting the environment's event bindings.
Stalk eval_expr(const StalkExpr& e, const PmfModel& m, const Env& env,
                const EvalHooks* hooks = nullptr);

/// Result of the atom decomposition: the two sides with every P-occurrence
/// replaced by a fresh z variable, plus the guard expression that is 1
/// exactly on assignments encoding a genuine pmf over the minterm weights
/// with the correct P-values.
struct GuardedEquation {
    StalkExpr lhs, rhs;                     // no Prob/Cond nodes remain
    StalkExpr guard;                        // the product-form guard
    std::vector<std::string> event_vars;    // ordered generator list of the decomposition
    std::vector<std::string> u_vars;        // one per minterm, "u" + bits
    std::vector<std::string> z_vars;        // one per P-occurrence, "z1"...
    std::vector<std::vector<uint32_t>> h_sets;  // minterm index set per occurrence
};

/// Decompose lhs = rhs over the given event variables. Conditional nodes are
/// first rewritten into P and division; P-occurrences are enumerated left to
/// right, lhs before rhs.
GuardedEquation atom_decompose(const StalkExpr& lhs, const StalkExpr& rhs,
                               const std::vector<std::string>& event_vars);

/// The assignment that realizes the decomposition in a model: u maps to the
/// minterm weights, z to the probabilities of the replaced occurrences.
Env canonical_assignment(const GuardedEquation& ge, const PmfModel& m);

struct RandomModelOptions {
    double zero_weight_prob = 0.25;  // chance a minterm weight is forced to exactly 0
    int max_denominator = 60;
};

/// Deterministic in seed. Weights are stick-breaking differences of bounded-
/// denominator rationals, so they are nonnegative and sum to exactly 1.
PmfModel random_model(const std::vector<std::string>& gens, uint64_t seed,
                      const RandomModelOptions& options = {});

/// Random event term over gens, depth-bounded.
EventTerm random_event_term(const std::vector<std::string>& gens, std::mt19937_64& rng,
                            int max_depth = 3);

/// Random rational with small numerator and denominator; zero, one and
/// negative values all occur.
Stalk random_stalk(std::mt19937_64& rng);

struct Counterexample {
    PmfModel model;
    Env env;
    Stalk lhs_value, rhs_value;

    std::string describe() const;
};

struct Verdict {
    std::optional<Counterexample> counterexample;
    bool holds() const { return !counterexample.has_value(); }
};

/// Evaluate both sides on `trials` random models and environments; exact
/// comparison, first mismatch wins.
Verdict check_equation(const StalkExpr& lhs, const StalkExpr& rhs, int trials,
                       uint64_t seed, const EvalHooks* hooks = nullptr);

struct SuiteItem {
    std::string id;
    std::string law;
    int trials = 0;
    bool passed = false;
    std::string counterexample;  // empty when passed
};

struct SuiteReport {
    std::vector<SuiteItem> items;
    bool all_passed() const;
};

/// Run every axiom and derived law against random models: the Boolean
/// algebra basis, the meadow and sign laws, the pmf laws, the inverse law,
/// the order/indicator facts, the upper-bound/factorization/Bayes laws, the
/// independence equivalences, the update-composition equivalence, and the
/// rationals-only equation.
SuiteReport axiom_suite(int trials, uint64_t seed, const EvalHooks* hooks = nullptr);

std::string render_table(const SuiteReport& report);
nlohmann::json to_json(const SuiteReport& report);

} // namespace meadowprob
