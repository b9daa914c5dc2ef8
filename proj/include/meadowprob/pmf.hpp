#pragma once

#include "meadowprob/event.hpp"
#include "meadowprob/stalk.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace meadowprob {

/// Concrete probability mass function over the minterms of an ordered
/// generator list: one nonnegative rational weight per minterm, summing to 1.
/// Immutable once constructed; the constructor enforces both invariants.
class PmfModel {
public:
    /// weights[i] is the weight of minterm index i; size must be 2^k.
    PmfModel(std::vector<std::string> gens, std::vector<Stalk> weights);

    const std::vector<std::string>& gens() const { return gens_; }
    const Stalk& weight(uint32_t minterm_index) const;
    std::size_t minterm_count() const { return weights_.size(); }
    int width() const { return static_cast<int>(gens_.size()); }

    /// Text block: a `gens:` header line, then one `bits: num/den` line per
    /// minterm, all-positive minterm first. Round-trips exactly.
    std::string to_text() const;
    static PmfModel from_text(std::string_view text);

    friend bool operator==(const PmfModel& a, const PmfModel& b) {
        return a.gens_ == b.gens_ && a.weights_ == b.weights_;
    }

private:
    std::vector<std::string> gens_;
    std::vector<Stalk> weights_;
};

/// Sum of the weights of the minterms covered by t.
Stalk prob(const PmfModel& m, const EventTerm& t);

/// prob(x & y) * inv(prob(y)); zero when the conditioning event has
/// probability zero.
Stalk cond(const PmfModel& m, const EventTerm& x, const EventTerm& y);

/// Exact test of prob(x & y) = prob(x) * prob(y).
bool independent(const PmfModel& m, const EventTerm& x, const EventTerm& y);

/// Evidence with probability zero: conditioning yields the all-zero
/// valuation, which is not a pmf, so no posterior exists.
struct DegenerateUpdate {
    friend bool operator==(const DegenerateUpdate&, const DegenerateUpdate&) = default;
};

using UpdateResult = std::variant<PmfModel, DegenerateUpdate>;

/// Posterior after conditioning every minterm weight on the evidence.
UpdateResult update(const PmfModel& m, const EventTerm& evidence);

/// The two-stage update compared against the one-step update on x & y,
/// minterm by minterm with totalized division. The second stage is
/// normalized by the prior probability of x — the division the composition
/// law is stated with — so the comparison can fail exactly when x and y are
/// dependent. Degenerate sides evaluate to the all-zero valuation.
bool update_composition_matches(const PmfModel& m, const EventTerm& x, const EventTerm& y);

/// Finite-domain variable: a family of pairwise disjoint events, one per
/// value label, whose probabilities sum to 1 in a valid model.
struct RandomVariable {
    std::string name;
    std::vector<std::string> domain;       // ordered value labels
    std::vector<std::string> generators;   // encoding generators, in order
    std::vector<EventTerm> events;         // one per label, parallel to domain
    std::vector<EventTerm> unused_codes;   // encodings of no label; must carry weight 0
};

/// Encode a variable over its labels: two-valued variables use a single
/// generator g with family {g, !g}; n-valued variables use ceil(log2 n)
/// generators named `<name>.<bit>`, with unused codes exposed for lowering.
RandomVariable make_random_variable(std::string name, std::vector<std::string> labels);

/// Event for `name = label`; NameError on an unknown label.
const EventTerm& rv_event(const RandomVariable& v, std::string_view label);

/// True iff the family is pairwise disjoint (as Boolean-algebra equalities)
/// and its probabilities sum to 1 in m.
bool validate_rv(const PmfModel& m, const RandomVariable& v);

} // namespace meadowprob
