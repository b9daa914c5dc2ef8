#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace meadowprob {

/// Immutable Boolean term over named generators. Copies share structure.
class EventTerm {
public:
    enum class Kind { Generator, Or, And, Not, Top, Bottom };

    EventTerm();  // Bottom

    static EventTerm generator(std::string name);
    static EventTerm top();
    static EventTerm bottom();

    Kind kind() const;
    const std::string& name() const;  // Generator only
    EventTerm left() const;           // Or/And left, Not operand
    EventTerm right() const;          // Or/And right

    /// Sorted, deduplicated generator names occurring in the term.
    std::vector<std::string> generators() const;

    /// `|` / `&` / `!` / TOP / BOT syntax, parenthesized by precedence.
    std::string str() const;

    bool same(const EventTerm& other) const;
    friend bool operator==(const EventTerm& a, const EventTerm& b) { return a.same(b); }
    friend bool operator!=(const EventTerm& a, const EventTerm& b) { return !a.same(b); }

    friend EventTerm operator|(const EventTerm& a, const EventTerm& b);
    friend EventTerm operator&(const EventTerm& a, const EventTerm& b);
    friend EventTerm operator!(const EventTerm& a);

    /// Truth value under the assignment encoded by a minterm index over gens
    /// (first generator = most significant bit).
    bool holds(const std::vector<std::string>& gens, uint32_t minterm_index) const;

private:
    struct Node;
    using Ptr = std::shared_ptr<const Node>;
    explicit EventTerm(Ptr node) : node_(std::move(node)) {}
    Ptr node_;
};

/// Replace generator leaves by mapped terms; unmapped names stay as they are.
EventTerm substitute(const EventTerm& t, const std::map<std::string, EventTerm>& binding);

/// One cell of the event space over an ordered generator list. Bit j of the
/// rendered string is generator j's polarity; the first generator is the most
/// significant bit of `index`.
struct Minterm {
    uint32_t index = 0;
    int width = 0;

    std::string str() const;
    static Minterm from_string(std::string_view bits);

    friend bool operator==(const Minterm&, const Minterm&) = default;
};

std::string minterm_bits(uint32_t index, int width);

/// Canonical denotation of a term over an ordered generator list: the sorted
/// set of minterm indices it covers. Equivalent terms over the same list
/// produce identical sets.
struct MintermSet {
    std::vector<std::string> gens;
    std::vector<uint32_t> indices;  // ascending

    bool contains(uint32_t index) const;
    std::size_t size() const { return indices.size(); }
    int width() const { return static_cast<int>(gens.size()); }

    friend bool operator==(const MintermSet&, const MintermSet&) = default;
};

/// Expand t over gens. Errors: NameError when t mentions a generator outside
/// gens; CapError when gens exceeds the configured cap.
MintermSet minterms(const EventTerm& t, const std::vector<std::string>& gens);

/// Boolean-algebra equality, decided by canonical minterm expansion over the
/// lexicographic union of both terms' generators.
bool equivalent(const EventTerm& a, const EventTerm& b);

/// Set-notation expression: bases, unions, intersections, the empty set and
/// the universe.
class SetExpr {
public:
    enum class Kind { Base, Union, Intersect, Empty, Universe };

    static SetExpr base(std::string name);
    static SetExpr empty();
    static SetExpr universe();
    static SetExpr union_of(const SetExpr& a, const SetExpr& b);
    static SetExpr intersect_of(const SetExpr& a, const SetExpr& b);

    Kind kind() const;
    const std::string& name() const;
    SetExpr left() const;
    SetExpr right() const;

private:
    struct Node;
    using Ptr = std::shared_ptr<const Node>;
    explicit SetExpr(Ptr node) : node_(std::move(node)) {}
    Ptr node_;
};

/// Structural embedding of set notation into event terms: the empty set maps
/// to BOT, the universe to TOP, union to |, intersection to &.
EventTerm embed(const SetExpr& s, const std::map<std::string, EventTerm>& base_map);

} // namespace meadowprob
