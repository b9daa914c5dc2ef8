#pragma once

#include "meadowprob/event.hpp"
#include "meadowprob/linear.hpp"
#include "meadowprob/pmf.hpp"
#include "meadowprob/stalk.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace meadowprob {

/// Expression denoting a stalk: rational constants, free stalk variables,
/// applications of P, conditional probability, and the meadow operators.
class StalkExpr {
public:
    enum class Kind { Const, Var, Prob, Cond, Add, Sub, Mul, Div, Neg, Inv, Sign };

    StalkExpr();  // Const 0

    static StalkExpr constant(Stalk value);
    static StalkExpr variable(std::string name);
    static StalkExpr prob(EventTerm t);
    static StalkExpr cond(EventTerm x, EventTerm y);
    static StalkExpr add(const StalkExpr& a, const StalkExpr& b);
    static StalkExpr sub(const StalkExpr& a, const StalkExpr& b);
    static StalkExpr mul(const StalkExpr& a, const StalkExpr& b);
    static StalkExpr div(const StalkExpr& a, const StalkExpr& b);
    static StalkExpr neg(const StalkExpr& a);
    static StalkExpr inv(const StalkExpr& a);
    static StalkExpr sign(const StalkExpr& a);

    Kind kind() const;
    const Stalk& value() const;      // Const
    const std::string& name() const; // Var
    const EventTerm& event() const;  // Prob/Cond
    const EventTerm& given() const;  // Cond
    StalkExpr left() const;
    StalkExpr right() const;

    std::string str() const;

    bool same(const StalkExpr& other) const;
    friend bool operator==(const StalkExpr& a, const StalkExpr& b) { return a.same(b); }
    friend bool operator!=(const StalkExpr& a, const StalkExpr& b) { return !a.same(b); }

    friend StalkExpr operator+(const StalkExpr& a, const StalkExpr& b) { return add(a, b); }
    friend StalkExpr operator-(const StalkExpr& a, const StalkExpr& b) { return sub(a, b); }
    friend StalkExpr operator*(const StalkExpr& a, const StalkExpr& b) { return mul(a, b); }
    friend StalkExpr operator-(const StalkExpr& a) { return neg(a); }

private:
    struct Node;
    using Ptr = std::shared_ptr<const Node>;
    explicit StalkExpr(Ptr node) : node_(std::move(node)) {}
    Ptr node_;
};

enum class Rel { Lt, Le, Gt, Ge };

std::string rel_str(Rel r);

struct ProbEq {           // P(term) = value
    EventTerm term;
    Stalk value;
    friend bool operator==(const ProbEq&, const ProbEq&) = default;
};
struct CondEq {           // P(event | given) = value
    EventTerm event;
    EventTerm given;
    Stalk value;
    friend bool operator==(const CondEq&, const CondEq&) = default;
};
struct CondEqCond {       // P(e1 | g1) = P(e2 | g2); unconditioned sides carry g = TOP
    EventTerm e1, g1, e2, g2;
    friend bool operator==(const CondEqCond&, const CondEqCond&) = default;
};
struct ProbCmp {          // P(term) rel value
    EventTerm term;
    Rel rel;
    Stalk value;
    friend bool operator==(const ProbCmp&, const ProbCmp&) = default;
};
struct JointEq {          // P(a, b) = value
    EventTerm a, b;
    Stalk value;
    friend bool operator==(const JointEq&, const JointEq&) = default;
};
struct IndependentDecl {  // independent(a, b)
    EventTerm a, b;
    friend bool operator==(const IndependentDecl&, const IndependentDecl&) = default;
};

using Constraint =
    std::variant<ProbEq, CondEq, CondEqCond, ProbCmp, JointEq, IndependentDecl>;

std::string constraint_str(const Constraint& c);

struct EventDecl {
    std::string name;
    friend bool operator==(const EventDecl&, const EventDecl&) = default;
};
struct VarDecl {
    std::string name;
    std::vector<std::string> labels;
    friend bool operator==(const VarDecl&, const VarDecl&) = default;
};
using Declaration = std::variant<EventDecl, VarDecl>;

/// Parsed prior-pmf specification: declarations, constraints on P, and
/// queries to evaluate against a satisfying model.
struct SpecDocument {
    std::vector<Declaration> decls;
    std::vector<Constraint> constraints;
    std::vector<StalkExpr> queries;

    /// Generator universe in declaration order (variable declarations
    /// contribute their encoding generators).
    std::vector<std::string> generators() const;

    /// Encoded random variables, in declaration order.
    std::vector<RandomVariable> variables() const;

    friend bool operator==(const SpecDocument&, const SpecDocument&) = default;
};

/// Parse the specification language. Errors: ParseError with position and an
/// expected-token hint; NameError for undeclared or duplicate names.
SpecDocument parse_spec(std::string_view text);

/// Inverse of parse_spec up to structural equality.
std::string render_spec(const SpecDocument& doc);

/// Name-resolution context for parsing stand-alone expressions.
struct ResolveContext {
    std::vector<std::string> generators;      // declared generator names
    std::vector<RandomVariable> variables;    // for `name = label` desugaring
    bool free_names = false;                  // unknown idents become generators / stalk variables

    static ResolveContext for_document(const SpecDocument& doc);
    static ResolveContext free();
};

/// Parse one event expression (the `--evidence` / test surface).
EventTerm parse_event_text(std::string_view text, const ResolveContext& ctx);

/// Parse one stalk expression (the `--query` / `--lhs` / `--rhs` surface).
StalkExpr parse_stalk_expr_text(std::string_view text, const ResolveContext& ctx);

/// Conditional-probability constraint awaiting the solver's case split.
/// In the positive case the conditioning probability (guard . u) is positive
/// and positive_equation is asserted; in the zero case guard . u = 0, which
/// satisfies the constraint only when zero_branch_ok.
struct ConditionalConstraint {
    EqRow positive_equation;
    std::vector<Stalk> guard;
    bool zero_branch_ok = false;
    std::string text;
};

/// Linear feasibility problem over one weight variable per minterm, plus the
/// pending conditional constraints.
struct ConstraintSystem {
    std::vector<std::string> gens;
    LinearSystem base;                 // always contains sum(u) = 1 and u >= 0
    std::vector<ConditionalConstraint> conditionals;

    uint32_t var_count() const { return static_cast<uint32_t>(base.vars.size()); }
    std::string bits(uint32_t index) const;
};

/// Lower a valid document to linear constraints over minterm weights.
/// Errors: CapError past the generator cap; LoweringError for constraints
/// with no linear form (independence declarations, conditional equations
/// whose conditioning events differ).
ConstraintSystem lower(const SpecDocument& doc);

} // namespace meadowprob
