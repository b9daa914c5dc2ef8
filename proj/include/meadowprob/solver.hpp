#pragma once

#include "meadowprob/linear.hpp"
#include "meadowprob/pmf.hpp"
#include "meadowprob/spec.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace meadowprob {

enum class SolverMode { Strict, Meadow };

/// Satisfying assignment of minterm weights, keyed by minterm bit string,
/// together with the conditional case split it was found under.
struct Witness {
    std::map<std::string, Stalk> weights;
    std::vector<std::pair<std::string, std::string>> branch;  // constraint text -> "positive"/"zero"
};

struct TraceStep {
    std::string op;                    // "substitute" or "eliminate"
    std::string var;
    std::vector<std::string> derived;  // rendered rows produced by the step
};

/// Refutation: the derivation steps of the first explored branch, ending in
/// a ground falsehood such as `1/1000000 >= 1/125000` or `0 > 0`.
struct Infeasible {
    std::vector<TraceStep> steps;
    std::string contradiction;
    int branches_explored = 1;
};

using SolveResult = std::variant<Witness, Infeasible>;

/// Decide feasibility by exact Gaussian substitution of equalities followed
/// by Fourier-Motzkin elimination, branching over the conditional case
/// splits. Witness values are chosen by interval midpoints in reverse
/// elimination order.
SolveResult solve(const ConstraintSystem& cs, SolverMode mode = SolverMode::Strict);

/// One projection step: every pairing of a lower bound with an upper bound
/// on var. Trivially-true ground rows are dropped; contradictory ground rows
/// are kept. The result no longer mentions var.
LinearSystem fm_eliminate(const LinearSystem& sys, const std::string& var);

/// Build the model a witness denotes; throws if the witness is incomplete or
/// violates the pmf invariants.
PmfModel witness_model(const SpecDocument& doc, const Witness& w);

/// Independent semantic check: the model built from w satisfies the pmf
/// invariants and every constraint of doc, conditionals evaluated with
/// totalized division.
bool verify_witness(const SpecDocument& doc, const Witness& w);

nlohmann::json to_json(const SolveResult& result);

} // namespace meadowprob
