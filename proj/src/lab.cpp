#include "meadowprob/lab.hpp"

#include "meadowprob/config.hpp"
#include "meadowprob/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace meadowprob {

// ---------------------------------------------------------------------------
// Evaluation

Stalk eval_expr(const StalkExpr& e, const PmfModel& m, const Env& env, const EvalHooks* hooks) {
    switch (e.kind()) {
        case StalkExpr::Kind::Const: return e.value();
        case StalkExpr::Kind::Var: {
            auto it = env.stalks.find(e.name());
            if (it == env.stalks.end())
                throw NameError("unresolved stalk variable '" + e.name() + "'");
            return it->second;
        }
        case StalkExpr::Kind::Prob:
            return prob(m, substitute(e.event(), env.events));
        case StalkExpr::Kind::Cond:
            return cond(m, substitute(e.event(), env.events), substitute(e.given(), env.events));
        case StalkExpr::Kind::Add:
            return eval_expr(e.left(), m, env, hooks) + eval_expr(e.right(), m, env, hooks);
        case StalkExpr::Kind::Sub:
            return eval_expr(e.left(), m, env, hooks) - eval_expr(e.right(), m, env, hooks);
        case StalkExpr::Kind::Mul:
            return eval_expr(e.left(), m, env, hooks) * eval_expr(e.right(), m, env, hooks);
        case StalkExpr::Kind::Div:
            return div(eval_expr(e.left(), m, env, hooks), eval_expr(e.right(), m, env, hooks));
        case StalkExpr::Kind::Neg: return -eval_expr(e.left(), m, env, hooks);
        case StalkExpr::Kind::Inv: return inv(eval_expr(e.left(), m, env, hooks));
        case StalkExpr::Kind::Sign: {
            Stalk operand = eval_expr(e.left(), m, env, hooks);
            if (hooks && hooks->sign_fn) return hooks->sign_fn(operand);
            return sign(operand);
        }
    }
    throw Error("unreachable stalk node kind");
}

// ---------------------------------------------------------------------------
// Atom decomposition

namespace {

StalkExpr desugar_cond(const StalkExpr& e) {
    switch (e.kind()) {
        case StalkExpr::Kind::Cond:
            return StalkExpr::div(StalkExpr::prob(e.event() & e.given()),
                                  StalkExpr::prob(e.given()));
        case StalkExpr::Kind::Add:
            return StalkExpr::add(desugar_cond(e.left()), desugar_cond(e.right()));
        case StalkExpr::Kind::Sub:
            return StalkExpr::sub(desugar_cond(e.left()), desugar_cond(e.right()));
        case StalkExpr::Kind::Mul:
            return StalkExpr::mul(desugar_cond(e.left()), desugar_cond(e.right()));
        case StalkExpr::Kind::Div:
            return StalkExpr::div(desugar_cond(e.left()), desugar_cond(e.right()));
        case StalkExpr::Kind::Neg: return StalkExpr::neg(desugar_cond(e.left()));
        case StalkExpr::Kind::Inv: return StalkExpr::inv(desugar_cond(e.left()));
        case StalkExpr::Kind::Sign: return StalkExpr::sign(desugar_cond(e.left()));
        default: return e;
    }
}

StalkExpr replace_probs(const StalkExpr& e, const std::vector<std::string>& event_vars,
                        std::vector<std::vector<uint32_t>>& h_sets) {
    switch (e.kind()) {
        case StalkExpr::Kind::Prob: {
            for (const auto& g : e.event().generators())
                if (std::find(event_vars.begin(), event_vars.end(), g) == event_vars.end())
                    throw NameError("P applied to undeclared event variable '" + g + "'");
            h_sets.push_back(minterms(e.event(), event_vars).indices);
            return StalkExpr::variable("z" + std::to_string(h_sets.size()));
        }
        case StalkExpr::Kind::Cond:
            throw Error("internal: conditional node survived desugaring");
        case StalkExpr::Kind::Add:
            return StalkExpr::add(replace_probs(e.left(), event_vars, h_sets),
                                  replace_probs(e.right(), event_vars, h_sets));
        case StalkExpr::Kind::Sub:
            return StalkExpr::sub(replace_probs(e.left(), event_vars, h_sets),
                                  replace_probs(e.right(), event_vars, h_sets));
        case StalkExpr::Kind::Mul:
            return StalkExpr::mul(replace_probs(e.left(), event_vars, h_sets),
                                  replace_probs(e.right(), event_vars, h_sets));
        case StalkExpr::Kind::Div:
            return StalkExpr::div(replace_probs(e.left(), event_vars, h_sets),
                                  replace_probs(e.right(), event_vars, h_sets));
        case StalkExpr::Kind::Neg:
            return StalkExpr::neg(replace_probs(e.left(), event_vars, h_sets));
        case StalkExpr::Kind::Inv:
            return StalkExpr::inv(replace_probs(e.left(), event_vars, h_sets));
        case StalkExpr::Kind::Sign:
            return StalkExpr::sign(replace_probs(e.left(), event_vars, h_sets));
        default: return e;
    }
}

StalkExpr indicator_zero(const StalkExpr& e) {
    // 0_w = 1 - w * inv(w): 1 exactly when w = 0.
    return StalkExpr::sub(StalkExpr::constant(Stalk(1)), StalkExpr::mul(e, StalkExpr::inv(e)));
}

} // namespace

GuardedEquation atom_decompose(const StalkExpr& lhs, const StalkExpr& rhs,
                               const std::vector<std::string>& event_vars) {
    int cap = config::max_generators();
    if (static_cast<int>(event_vars.size()) > cap)
        throw CapError("event variable count exceeds the cap of " + std::to_string(cap));

    GuardedEquation ge;
    ge.event_vars = event_vars;
    ge.lhs = replace_probs(desugar_cond(lhs), event_vars, ge.h_sets);
    ge.rhs = replace_probs(desugar_cond(rhs), event_vars, ge.h_sets);

    uint32_t n = 1u << event_vars.size();
    int width = static_cast<int>(event_vars.size());
    for (uint32_t i = 0; i < n; ++i) ge.u_vars.push_back("u" + minterm_bits(i, width));
    for (std::size_t j = 0; j < ge.h_sets.size(); ++j)
        ge.z_vars.push_back("z" + std::to_string(j + 1));

    auto uvar = [&](uint32_t i) { return StalkExpr::variable(ge.u_vars[i]); };
    StalkExpr one = StalkExpr::constant(Stalk(1));

    StalkExpr total = uvar(0);
    for (uint32_t i = 1; i < n; ++i) total = StalkExpr::add(total, uvar(i));
    StalkExpr guard = indicator_zero(StalkExpr::sub(one, total));

    for (std::size_t j = 0; j < ge.h_sets.size(); ++j) {
        StalkExpr sum = StalkExpr::constant(Stalk());
        bool first = true;
        for (uint32_t idx : ge.h_sets[j]) {
            sum = first ? uvar(idx) : StalkExpr::add(sum, uvar(idx));
            first = false;
        }
        guard = StalkExpr::mul(
            guard, indicator_zero(StalkExpr::sub(StalkExpr::variable(ge.z_vars[j]), sum)));
    }
    for (uint32_t i = 0; i < n; ++i) {
        StalkExpr nonneg = StalkExpr::sign(StalkExpr::add(StalkExpr::sign(uvar(i)), one));
        guard = StalkExpr::mul(guard, indicator_zero(StalkExpr::sub(one, nonneg)));
    }
    ge.guard = guard;
    return ge;
}

Env canonical_assignment(const GuardedEquation& ge, const PmfModel& m) {
    if (m.gens() != ge.event_vars)
        throw Error("model generators do not match the decomposition's event variables");
    Env env;
    for (uint32_t i = 0; i < m.minterm_count(); ++i)
        env.stalks[ge.u_vars[i]] = m.weight(i);
    for (std::size_t j = 0; j < ge.h_sets.size(); ++j) {
        Stalk total;
        for (uint32_t idx : ge.h_sets[j]) total += m.weight(idx);
        env.stalks[ge.z_vars[j]] = total;
    }
    return env;
}

// ---------------------------------------------------------------------------
// Random generation

PmfModel random_model(const std::vector<std::string>& gens, uint64_t seed,
                      const RandomModelOptions& options) {
    int cap = config::max_generators();
    if (static_cast<int>(gens.size()) > cap)
        throw CapError("generator count exceeds the cap of " + std::to_string(cap));
    std::mt19937_64 rng(seed);
    uint32_t n = 1u << gens.size();

    uint64_t threshold = static_cast<uint64_t>(options.zero_weight_prob * 1000000.0);
    std::vector<bool> zeroed(n, false);
    uint32_t nonzero = 0;
    for (uint32_t i = 0; i < n; ++i) {
        if (rng() % 1000000 < threshold) zeroed[i] = true;
        else ++nonzero;
    }
    if (nonzero == 0) {
        zeroed[rng() % n] = false;
        nonzero = 1;
    }

    std::vector<Stalk> cuts;
    cuts.push_back(Stalk(0));
    cuts.push_back(Stalk(1));
    for (uint32_t i = 0; i + 1 < nonzero; ++i) {
        long den = 1 + static_cast<long>(rng() % static_cast<uint64_t>(options.max_denominator));
        long num = static_cast<long>(rng() % static_cast<uint64_t>(den + 1));
        cuts.push_back(Stalk(num, den));
    }
    std::sort(cuts.begin(), cuts.end(), [](const Stalk& a, const Stalk& b) { return lt(a, b); });

    std::vector<Stalk> weights(n);
    std::size_t cell = 0;
    for (uint32_t i = 0; i < n; ++i) {
        if (zeroed[i]) continue;
        weights[i] = cuts[cell + 1] - cuts[cell];
        ++cell;
    }
    return PmfModel(gens, std::move(weights));
}

EventTerm random_event_term(const std::vector<std::string>& gens, std::mt19937_64& rng,
                            int max_depth) {
    auto leaf = [&]() -> EventTerm {
        if (gens.empty()) return rng() % 2 ? EventTerm::top() : EventTerm::bottom();
        switch (rng() % 8) {
            case 6: return EventTerm::top();
            case 7: return EventTerm::bottom();
            default: return EventTerm::generator(gens[rng() % gens.size()]);
        }
    };
    if (max_depth <= 0) return leaf();
    switch (rng() % 8) {
        case 0:
        case 1:
        case 2: return leaf();
        case 3:
        case 4: return random_event_term(gens, rng, max_depth - 1) |
                       random_event_term(gens, rng, max_depth - 1);
        case 5:
        case 6: return random_event_term(gens, rng, max_depth - 1) &
                       random_event_term(gens, rng, max_depth - 1);
        default: return !random_event_term(gens, rng, max_depth - 1);
    }
}

Stalk random_stalk(std::mt19937_64& rng) {
    switch (rng() % 8) {
        case 0: return Stalk(0);
        case 1: return Stalk(1);
        case 2: return Stalk(-1);
        case 3:
        case 4: return Stalk(static_cast<long>(rng() % 21) - 10);
        default: {
            long num = static_cast<long>(rng() % 61) - 30;
            long den = 1 + static_cast<long>(rng() % 30);
            return Stalk(num, den);
        }
    }
}

// ---------------------------------------------------------------------------
// Equation checking

namespace {

void collect_names(const StalkExpr& e, std::set<std::string>& stalk_vars,
                   std::set<std::string>& event_vars, bool& has_prob) {
    switch (e.kind()) {
        case StalkExpr::Kind::Var: stalk_vars.insert(e.name()); return;
        case StalkExpr::Kind::Prob: {
            has_prob = true;
            for (const auto& g : e.event().generators()) event_vars.insert(g);
            return;
        }
        case StalkExpr::Kind::Cond: {
            has_prob = true;
            for (const auto& g : e.event().generators()) event_vars.insert(g);
            for (const auto& g : e.given().generators()) event_vars.insert(g);
            return;
        }
        case StalkExpr::Kind::Const: return;
        case StalkExpr::Kind::Neg:
        case StalkExpr::Kind::Inv:
        case StalkExpr::Kind::Sign:
            collect_names(e.left(), stalk_vars, event_vars, has_prob);
            return;
        default:
            collect_names(e.left(), stalk_vars, event_vars, has_prob);
            collect_names(e.right(), stalk_vars, event_vars, has_prob);
            return;
    }
}

std::vector<std::string> model_generators(int k) {
    std::vector<std::string> gens;
    for (int i = 1; i <= k; ++i) gens.push_back("g" + std::to_string(i));
    return gens;
}

} // namespace

std::string Counterexample::describe() const {
    std::ostringstream out;
    out << "lhs = " << lhs_value.str() << ", rhs = " << rhs_value.str();
    for (const auto& [name, value] : env.stalks) out << ", " << name << " := " << value.str();
    for (const auto& [name, term] : env.events) out << ", " << name << " := " << term.str();
    if (model.width() > 0) {
        out << "; model";
        for (uint32_t i = 0; i < model.minterm_count(); ++i)
            out << ' ' << minterm_bits(i, model.width()) << '=' << model.weight(i).str();
    }
    return out.str();
}

Verdict check_equation(const StalkExpr& lhs, const StalkExpr& rhs, int trials, uint64_t seed,
                       const EvalHooks* hooks) {
    if (trials < 1) throw Error("trials must be >= 1");
    std::set<std::string> stalk_vars, event_vars;
    bool has_prob = false;
    collect_names(lhs, stalk_vars, event_vars, has_prob);
    collect_names(rhs, stalk_vars, event_vars, has_prob);

    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        int k = has_prob ? 1 + static_cast<int>(rng() % 4) : 0;
        std::vector<std::string> gens = model_generators(k);
        PmfModel m = has_prob ? random_model(gens, rng())
                              : PmfModel({}, {Stalk(1)});
        Env env;
        for (const auto& name : event_vars) env.events[name] = random_event_term(gens, rng);
        for (const auto& name : stalk_vars) env.stalks[name] = random_stalk(rng);
        Stalk lv = eval_expr(lhs, m, env, hooks);
        Stalk rv = eval_expr(rhs, m, env, hooks);
        if (lv != rv) return Verdict{Counterexample{std::move(m), std::move(env), lv, rv}};
    }
    return Verdict{};
}

// ---------------------------------------------------------------------------
// Axiom suite

namespace {

using RunFn = std::function<std::optional<std::string>(int, uint64_t, const EvalHooks*)>;

struct Item {
    std::string id;
    std::string law;
    RunFn run;
};

Item eq_item(std::string id, const StalkExpr& lhs, const StalkExpr& rhs) {
    return Item{std::move(id), lhs.str() + " = " + rhs.str(),
                [lhs, rhs](int trials, uint64_t seed, const EvalHooks* hooks)
                    -> std::optional<std::string> {
                    Verdict v = check_equation(lhs, rhs, trials, seed, hooks);
                    if (v.holds()) return std::nullopt;
                    return v.counterexample->describe();
                }};
}

Item ba_item(std::string id, const EventTerm& lhs, const EventTerm& rhs) {
    return Item{std::move(id), lhs.str() + " = " + rhs.str(),
                [lhs, rhs](int trials, uint64_t seed, const EvalHooks*)
                    -> std::optional<std::string> {
                    std::mt19937_64 rng(seed);
                    for (int t = 0; t < trials; ++t) {
                        int k = 1 + static_cast<int>(rng() % 3);
                        std::vector<std::string> gens = model_generators(k);
                        std::map<std::string, EventTerm> binding;
                        for (const char* name : {"x", "y", "z"})
                            binding.emplace(name, random_event_term(gens, rng));
                        EventTerm l = substitute(lhs, binding);
                        EventTerm r = substitute(rhs, binding);
                        if (!equivalent(l, r)) {
                            std::ostringstream out;
                            out << "lhs = " << l.str() << ", rhs = " << r.str();
                            for (const auto& [n, e] : binding) out << ", " << n << " := " << e.str();
                            return out.str();
                        }
                    }
                    return std::nullopt;
                }};
}

struct PairSample {
    PmfModel model;
    EventTerm x, y;
};

PairSample sample_pair(std::mt19937_64& rng) {
    int k = 1 + static_cast<int>(rng() % 4);
    std::vector<std::string> gens = model_generators(k);
    PmfModel m = random_model(gens, rng());
    EventTerm x = random_event_term(gens, rng);
    EventTerm y = random_event_term(gens, rng);
    return PairSample{std::move(m), std::move(x), std::move(y)};
}

std::string pair_note(const PairSample& s) {
    std::ostringstream out;
    out << "x := " << s.x.str() << ", y := " << s.y.str() << "; model";
    for (uint32_t i = 0; i < s.model.minterm_count(); ++i)
        out << ' ' << minterm_bits(i, s.model.width()) << '=' << s.model.weight(i).str();
    return out.str();
}

std::vector<Item> build_items() {
    std::vector<Item> items;
    using SE = StalkExpr;
    EventTerm x = EventTerm::generator("x");
    EventTerm y = EventTerm::generator("y");
    EventTerm z = EventTerm::generator("z");
    SE p = SE::variable("p"), q = SE::variable("q"), r = SE::variable("r");
    SE zero = SE::constant(Stalk(0)), one = SE::constant(Stalk(1));
    auto one_of = [](const SE& e) { return SE::mul(e, SE::inv(e)); };
    auto zero_of = [&](const SE& e) { return SE::sub(SE::constant(Stalk(1)), SE::mul(e, SE::inv(e))); };

    // Boolean algebra basis
    items.push_back(ba_item("ba.absorb-or-and", (x | y) & y, y));
    items.push_back(ba_item("ba.absorb-and-or", (x & y) | y, y));
    items.push_back(ba_item("ba.distrib-and-or", x & (y | z), (y & x) | (z & x)));
    items.push_back(ba_item("ba.distrib-or-and", x | (y & z), (y | x) & (z | x)));
    items.push_back(ba_item("ba.complement-and", x & !x, EventTerm::bottom()));
    items.push_back(ba_item("ba.complement-or", x | !x, EventTerm::top()));

    // Meadow laws
    items.push_back(eq_item("md.add-assoc", (p + q) + r, p + (q + r)));
    items.push_back(eq_item("md.add-comm", p + q, q + p));
    items.push_back(eq_item("md.add-zero", p + zero, p));
    items.push_back(eq_item("md.add-inverse", p + (-p), zero));
    items.push_back(eq_item("md.mul-assoc", (p * q) * r, p * (q * r)));
    items.push_back(eq_item("md.mul-comm", p * q, q * p));
    items.push_back(eq_item("md.mul-one", one * p, p));
    items.push_back(eq_item("md.mul-distrib", p * (q + r), p * q + p * r));
    items.push_back(eq_item("md.inv-involution", SE::inv(SE::inv(p)), p));
    items.push_back(eq_item("md.inv-restricted", p * (p * SE::inv(p)), p));

    // Sign laws
    items.push_back(eq_item("sign.fix-one-ind", SE::sign(one_of(p)), one_of(p)));
    items.push_back(eq_item("sign.fix-zero-ind", SE::sign(zero_of(p)), zero_of(p)));
    items.push_back(eq_item("sign.minus-one", SE::sign(SE::constant(Stalk(-1))), SE::constant(Stalk(-1))));
    items.push_back(eq_item("sign.inv", SE::sign(SE::inv(p)), SE::sign(p)));
    items.push_back(eq_item("sign.mul", SE::sign(p * q), SE::sign(p) * SE::sign(q)));
    items.push_back(eq_item("sign.add-compat",
                            zero_of(SE::sign(p) - SE::sign(q)) * (SE::sign(p + q) - SE::sign(p)),
                            zero));

    // Pmf laws
    items.push_back(eq_item("pmf.top", SE::prob(EventTerm::top()), one));
    items.push_back(eq_item("pmf.bot", SE::prob(EventTerm::bottom()), zero));
    items.push_back(eq_item("pmf.nonneg-sign", SE::sign(SE::sign(SE::prob(x)) + one), one));
    items.push_back(eq_item("pmf.additivity", SE::prob(x | y),
                            SE::prob(x) + SE::prob(y) - SE::prob(x & y)));
    items.push_back(eq_item("pmf.conditioning-support",
                            SE::prob(x & y) * SE::prob(y) * SE::inv(SE::prob(y)),
                            SE::prob(x & y)));

    // Inverse law (restricted to nonzero stalks)
    items.push_back(Item{"meadow.inverse-law", "p != 0 -> p * inv(p) = 1",
                         [](int trials, uint64_t seed, const EvalHooks*)
                             -> std::optional<std::string> {
                             std::mt19937_64 rng(seed);
                             for (int t = 0; t < trials; ++t) {
                                 Stalk a = random_stalk(rng);
                                 while (a.is_zero()) a = random_stalk(rng);
                                 if (mul(a, inv(a)) != Stalk(1))
                                     return "p := " + a.str() + ", p * inv(p) = " +
                                            mul(a, inv(a)).str();
                             }
                             return std::nullopt;
                         }});

    // Derived indicator and order facts
    items.push_back(Item{"derived.one-ind-boolean", "1_p = 0 when p = 0, otherwise 1",
                         [](int trials, uint64_t seed, const EvalHooks*)
                             -> std::optional<std::string> {
                             std::mt19937_64 rng(seed);
                             for (int t = 0; t < trials; ++t) {
                                 Stalk a = random_stalk(rng);
                                 Stalk expected = a.is_zero() ? Stalk(0) : Stalk(1);
                                 if (one_ind(a) != expected)
                                     return "p := " + a.str() + ", 1_p = " + one_ind(a).str();
                             }
                             return std::nullopt;
                         }});
    items.push_back(eq_item("derived.ind-partition", zero_of(p) + one_of(p), one));
    items.push_back(Item{"derived.order-coherence",
                         "p <= q via the sign order agrees with the rational order",
                         [](int trials, uint64_t seed, const EvalHooks*)
                             -> std::optional<std::string> {
                             std::mt19937_64 rng(seed);
                             for (int t = 0; t < trials; ++t) {
                                 Stalk a = random_stalk(rng), b = random_stalk(rng);
                                 bool expectation = cmp(a.raw(), b.raw()) <= 0;
                                 if (le(a, b) != expectation)
                                     return "p := " + a.str() + ", q := " + b.str();
                             }
                             return std::nullopt;
                         }});
    items.push_back(Item{"derived.le-refl", "p <= p",
                         [](int trials, uint64_t seed, const EvalHooks*)
                             -> std::optional<std::string> {
                             std::mt19937_64 rng(seed);
                             for (int t = 0; t < trials; ++t) {
                                 Stalk a = random_stalk(rng);
                                 if (!le(a, a)) return "p := " + a.str();
                             }
                             return std::nullopt;
                         }});

    // Key pmf properties
    items.push_back(eq_item("prob.upper-bound",
                            SE::sign(SE::sign(one - SE::prob(x)) + one), one));
    items.push_back(eq_item("prob.joint-factorization", SE::prob(x & y),
                            SE::cond(x, y) * SE::prob(y)));
    items.push_back(eq_item("prob.bayes", SE::cond(x, y),
                            SE::div(SE::cond(y, x) * SE::prob(x), SE::prob(y))));

    // Independence equivalences
    auto independence_item = [](std::string id, std::string law, bool swap) {
        return Item{std::move(id), std::move(law),
                    [swap](int trials, uint64_t seed, const EvalHooks*)
                        -> std::optional<std::string> {
                        std::mt19937_64 rng(seed);
                        for (int t = 0; t < trials; ++t) {
                            PairSample s = sample_pair(rng);
                            const EventTerm& a = swap ? s.y : s.x;
                            const EventTerm& b = swap ? s.x : s.y;
                            bool ind = independent(s.model, a, b);
                            bool via_cond =
                                cond(s.model, a, b) == prob(s.model, a) * cond(s.model, b, b);
                            if (ind != via_cond) return pair_note(s);
                        }
                        return std::nullopt;
                    }};
    };
    items.push_back(independence_item("independence.iff-cond",
                                      "independent(x, y) <-> P(x | y) = P(x) * P(y | y)", false));
    items.push_back(independence_item("independence.iff-cond-swapped",
                                      "independent(x, y) <-> P(y | x) = P(y) * P(x | x)", true));

    // Immediate conditional facts
    items.push_back(Item{"prob.nonneg", "0 <= P(x)",
                         [](int trials, uint64_t seed, const EvalHooks*)
                             -> std::optional<std::string> {
                             std::mt19937_64 rng(seed);
                             for (int t = 0; t < trials; ++t) {
                                 PairSample s = sample_pair(rng);
                                 if (!le(Stalk(0), prob(s.model, s.x))) return pair_note(s);
                             }
                             return std::nullopt;
                         }});
    items.push_back(eq_item("prob.self-factor", SE::prob(x), SE::prob(x) * SE::cond(x, x)));
    items.push_back(eq_item("prob.self-cond", SE::cond(x, x),
                            SE::div(SE::prob(x), SE::prob(x))));

    // Update composition equivalence, both directions; conditioned on the
    // joint event having positive probability so neither side degenerates.
    auto update_item = [](std::string id, std::string law, bool forward) {
        return Item{std::move(id), std::move(law),
                    [forward](int trials, uint64_t seed, const EvalHooks*)
                        -> std::optional<std::string> {
                        std::mt19937_64 rng(seed);
                        int done = 0;
                        int attempts = 0;
                        while (done < trials && attempts < trials * 300) {
                            ++attempts;
                            PairSample s = sample_pair(rng);
                            Stalk pxy = prob(s.model, s.x & s.y);
                            if (pxy.is_zero()) continue;
                            ++done;
                            bool ratio_holds =
                                div(pxy, prob(s.model, s.x) * prob(s.model, s.y)) == div(pxy, pxy);
                            bool composed = update_composition_matches(s.model, s.x, s.y);
                            bool ok = forward ? (!ratio_holds || composed)
                                              : (!composed || ratio_holds);
                            if (!ok) return pair_note(s);
                        }
                        return std::nullopt;
                    }};
    };
    items.push_back(update_item(
        "update.compose-forward",
        "P(x & y) / (P(x) * P(y)) = P(x & y) / P(x & y) -> update_x(update_y(P)) = update_{x & y}(P)",
        true));
    items.push_back(update_item(
        "update.compose-backward",
        "update_x(update_y(P)) = update_{x & y}(P) -> P(x & y) / (P(x) * P(y)) = P(x & y) / P(x & y)",
        false));

    // Holds over rational-valued models only; separates them from real-valued ones.
    EventTerm a = EventTerm::generator("a");
    SE two_sq = SE::constant(Stalk(2)) * (SE::prob(a) * SE::prob(a)) - one;
    items.push_back(eq_item("rational.double-square", SE::div(two_sq, two_sq), one));

    return items;
}

} // namespace

bool SuiteReport::all_passed() const {
    return std::all_of(items.begin(), items.end(), [](const SuiteItem& i) { return i.passed; });
}

SuiteReport axiom_suite(int trials, uint64_t seed, const EvalHooks* hooks) {
    if (trials < 1) throw Error("trials must be >= 1");
    SuiteReport report;
    std::vector<Item> items = build_items();
    for (std::size_t i = 0; i < items.size(); ++i) {
        uint64_t item_seed = seed * 1000003ULL + i * 7919ULL + 1;
        std::optional<std::string> cex = items[i].run(trials, item_seed, hooks);
        report.items.push_back(
            SuiteItem{items[i].id, items[i].law, trials, !cex.has_value(), cex.value_or("")});
    }
    return report;
}

std::string render_table(const SuiteReport& report) {
    std::size_t id_width = 4, law_width = 3;
    for (const auto& item : report.items) {
        id_width = std::max(id_width, item.id.size());
        law_width = std::max(law_width, item.law.size());
    }
    std::ostringstream out;
    auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    out << pad("item", id_width) << "  " << pad("law", law_width) << "  trials  result\n";
    out << std::string(id_width + law_width + 18, '-') << '\n';
    for (const auto& item : report.items) {
        out << pad(item.id, id_width) << "  " << pad(item.law, law_width) << "  "
            << pad(std::to_string(item.trials), 6) << "  "
            << (item.passed ? "pass" : "FAIL") << '\n';
        if (!item.passed) out << "    counterexample: " << item.counterexample << '\n';
    }
    out << (report.all_passed() ? "all laws hold\n" : "LAW VIOLATIONS FOUND\n");
    return out.str();
}

nlohmann::json to_json(const SuiteReport& report) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : report.items) {
        nlohmann::json j{{"id", item.id},
                         {"law", item.law},
                         {"trials", item.trials},
                         {"passed", item.passed}};
        if (!item.passed) j["counterexample"] = item.counterexample;
        items.push_back(std::move(j));
    }
    return nlohmann::json{{"items", std::move(items)}, {"all_passed", report.all_passed()}};
}

} // namespace meadowprob
