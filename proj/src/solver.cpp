#include "meadowprob/solver.hpp"

#include "meadowprob/errors.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

namespace meadowprob {

namespace {

bool row_is_ground(const std::vector<Stalk>& coeffs) {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const Stalk& c) { return c.is_zero(); });
}

// 0 >= rhs (or 0 > rhs when strict).
bool ground_holds(const Stalk& rhs, bool strict) {
    return strict ? lt(rhs, Stalk()) : le(rhs, Stalk());
}

std::optional<std::size_t> single_var(const std::vector<Stalk>& coeffs) {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i].is_zero()) continue;
        if (found) return std::nullopt;
        found = i;
    }
    return found;
}

// Key for duplicate detection: the row scaled so its first nonzero
// coefficient has absolute value 1.
std::string row_key(const LinRow& row) {
    Stalk scale(1);
    for (const auto& c : row.coeffs)
        if (!c.is_zero()) {
            scale = inv(c.signum() < 0 ? -c : c);
            break;
        }
    std::string key = row.strict ? ">" : ">=";
    for (const auto& c : row.coeffs) key += "," + (c * scale).str();
    key += ";" + (row.rhs * scale).str();
    return key;
}

struct BoundValue {
    Stalk value;
    bool strict = false;
};

// Exact feasibility of one assembled branch: Gaussian substitution of the
// equalities, Fourier-Motzkin over the remainder, midpoint extraction.
class Engine {
public:
    explicit Engine(const LinearSystem& sys)
        : vars_(sys.vars), eqs_(sys.equalities), rows_(sys.inequalities),
          active_(sys.vars.size(), true) {}

    bool run() {
        if (!initial_scan()) return false;
        if (!gaussian()) return false;
        if (!fourier_motzkin()) return false;
        return true;
    }

    std::vector<Stalk> extract() const;

    std::vector<TraceStep> steps;
    std::string contradiction;

private:
    std::vector<std::string> vars_;
    std::vector<EqRow> eqs_;
    std::vector<LinRow> rows_;
    std::vector<bool> active_;

    struct SubstRecord {
        std::size_t var;
        std::vector<Stalk> coeffs;  // var = constant + coeffs . u
        Stalk constant;
        bool is_constant;
    };
    struct FmRecord {
        std::size_t var;
        std::vector<LinRow> lowers, uppers;
    };
    std::vector<SubstRecord> substs_;
    std::vector<FmRecord> fm_;

    bool initial_scan() {
        for (auto it = eqs_.begin(); it != eqs_.end();) {
            if (!row_is_ground(it->coeffs)) { ++it; continue; }
            if (!it->rhs.is_zero()) {
                contradiction = "0 = " + it->rhs.str();
                return false;
            }
            it = eqs_.erase(it);
        }
        for (auto it = rows_.begin(); it != rows_.end();) {
            if (!row_is_ground(it->coeffs)) { ++it; continue; }
            if (!ground_holds(it->rhs, it->strict)) {
                contradiction = std::string("0 ") + (it->strict ? ">" : ">=") + " " + it->rhs.str();
                return false;
            }
            it = rows_.erase(it);
        }
        return true;
    }

    bool gaussian() {
        while (!eqs_.empty()) {
            EqRow eq = std::move(eqs_.front());
            eqs_.erase(eqs_.begin());
            std::size_t pivot = 0;
            bool found = false;
            for (std::size_t j = 0; j < eq.coeffs.size(); ++j)
                if (!eq.coeffs[j].is_zero()) { pivot = j; found = true; break; }
            if (!found) {
                if (eq.rhs.is_zero()) continue;
                contradiction = "0 = " + eq.rhs.str();
                return false;
            }

            Stalk a = eq.coeffs[pivot];
            SubstRecord rec;
            rec.var = pivot;
            rec.constant = div(eq.rhs, a);
            rec.coeffs.assign(eq.coeffs.size(), Stalk());
            rec.is_constant = true;
            for (std::size_t j = 0; j < eq.coeffs.size(); ++j) {
                if (j == pivot || eq.coeffs[j].is_zero()) continue;
                rec.coeffs[j] = div(-eq.coeffs[j], a);
                rec.is_constant = false;
            }
            active_[pivot] = false;

            TraceStep step;
            step.op = "substitute";
            step.var = vars_[pivot];
            step.derived.push_back(vars_[pivot] + " = " +
                                   format_affine(vars_, rec.coeffs, rec.constant));

            for (auto& other : eqs_) {
                if (other.coeffs[pivot].is_zero()) continue;
                apply_subst(other.coeffs, other.rhs, pivot, rec);
            }
            for (auto it = rows_.begin(); it != rows_.end();) {
                Stalk c = it->coeffs[pivot];
                if (c.is_zero()) { ++it; continue; }
                auto before_single = single_var(it->coeffs);
                Stalk before_coeff = c;
                Stalk before_rhs = it->rhs;
                bool strict = it->strict;
                apply_subst(it->coeffs, it->rhs, pivot, rec);
                if (row_is_ground(it->coeffs)) {
                    if (!ground_holds(it->rhs, it->strict)) {
                        contradiction = render_ground_subst(before_single, rec, before_coeff,
                                                            before_rhs, strict, it->rhs);
                        steps.push_back(std::move(step));
                        return false;
                    }
                    it = rows_.erase(it);
                    continue;
                }
                step.derived.push_back(format_row(vars_, *it));
                ++it;
            }
            substs_.push_back(std::move(rec));
            steps.push_back(std::move(step));
        }
        return true;
    }

    void apply_subst(std::vector<Stalk>& coeffs, Stalk& rhs, std::size_t pivot,
                     const SubstRecord& rec) {
        Stalk c = coeffs[pivot];
        coeffs[pivot] = Stalk();
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            if (!rec.coeffs[j].is_zero()) coeffs[j] += c * rec.coeffs[j];
        rhs -= c * rec.constant;
    }

    // A row a*v >= r whose variable was pinned to a constant reads naturally
    // as a comparison of two numbers; render it that way.
    std::string render_ground_subst(std::optional<std::size_t> before_single,
                                    const SubstRecord& rec, const Stalk& coeff,
                                    const Stalk& rhs, bool strict, const Stalk& ground_rhs) {
        const char* op = strict ? " > " : " >= ";
        if (before_single && *before_single == rec.var && rec.is_constant) {
            Stalk bound = div(rhs, coeff);
            if (coeff.signum() > 0) return rec.constant.str() + op + bound.str();
            return bound.str() + op + rec.constant.str();
        }
        return std::string("0") + op + ground_rhs.str();
    }

    bool fourier_motzkin() {
        std::set<std::string> keys;
        for (const auto& r : rows_) keys.insert(row_key(r));

        while (true) {
            std::optional<std::size_t> best;
            std::size_t best_cost = 0;
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                if (!active_[v]) continue;
                std::size_t lo = 0, hi = 0;
                for (const auto& r : rows_) {
                    int s = r.coeffs[v].signum();
                    if (s > 0) ++lo;
                    else if (s < 0) ++hi;
                }
                std::size_t cost = lo * hi;
                if (!best || cost < best_cost) { best = v; best_cost = cost; }
            }
            if (!best) return true;
            std::size_t v = *best;

            FmRecord rec;
            rec.var = v;
            std::vector<LinRow> rest;
            for (auto& r : rows_) {
                int s = r.coeffs[v].signum();
                if (s > 0) rec.lowers.push_back(std::move(r));
                else if (s < 0) rec.uppers.push_back(std::move(r));
                else rest.push_back(std::move(r));
            }
            rows_ = std::move(rest);
            keys.clear();
            for (const auto& r : rows_) keys.insert(row_key(r));

            TraceStep step;
            step.op = "eliminate";
            step.var = vars_[v];

            for (const auto& lo : rec.lowers) {
                for (const auto& up : rec.uppers) {
                    Stalk al = lo.coeffs[v];
                    Stalk au = up.coeffs[v];
                    LinRow derived;
                    derived.strict = lo.strict || up.strict;
                    derived.coeffs.assign(vars_.size(), Stalk());
                    for (std::size_t j = 0; j < vars_.size(); ++j) {
                        if (j == v) continue;
                        Stalk value = (-au) * lo.coeffs[j] + al * up.coeffs[j];
                        if (!value.is_zero()) derived.coeffs[j] = value;
                    }
                    derived.rhs = (-au) * lo.rhs + al * up.rhs;
                    if (row_is_ground(derived.coeffs)) {
                        if (ground_holds(derived.rhs, derived.strict)) continue;
                        contradiction = render_ground_pair(lo, up, v, derived);
                        steps.push_back(std::move(step));
                        active_[v] = false;
                        fm_.push_back(std::move(rec));
                        return false;
                    }
                    std::string key = row_key(derived);
                    if (!keys.insert(key).second) continue;
                    step.derived.push_back(format_row(vars_, derived));
                    rows_.push_back(std::move(derived));
                }
            }
            active_[v] = false;
            fm_.push_back(std::move(rec));
            if (!step.derived.empty() || !rec.lowers.empty() || !rec.uppers.empty())
                steps.push_back(std::move(step));
        }
    }

    // A pairing of two single-variable bounds reads as upper >= lower.
    std::string render_ground_pair(const LinRow& lo, const LinRow& up, std::size_t v,
                                   const LinRow& derived) {
        const char* op = derived.strict ? " > " : " >= ";
        if (single_var(lo.coeffs) == std::optional<std::size_t>(v) &&
            single_var(up.coeffs) == std::optional<std::size_t>(v)) {
            Stalk lower = div(lo.rhs, lo.coeffs[v]);
            Stalk upper = div(up.rhs, up.coeffs[v]);
            return upper.str() + op + lower.str();
        }
        return std::string("0") + op + derived.rhs.str();
    }
};

std::vector<Stalk> Engine::extract() const {
    std::vector<std::optional<Stalk>> values(vars_.size());
    auto evaluate_bound = [&](const LinRow& row, std::size_t var) {
        Stalk acc = row.rhs;
        for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
            if (j == var || row.coeffs[j].is_zero()) continue;
            if (!values[j])
                throw Error("internal: bound row references an unvalued variable");
            acc -= row.coeffs[j] * *values[j];
        }
        return div(acc, row.coeffs[var]);
    };

    for (auto it = fm_.rbegin(); it != fm_.rend(); ++it) {
        std::optional<BoundValue> lower, upper;
        for (const auto& row : it->lowers) {
            BoundValue b{evaluate_bound(row, it->var), row.strict};
            if (!lower || lt(lower->value, b.value)) lower = b;
            else if (lower->value == b.value) lower->strict = lower->strict || b.strict;
        }
        for (const auto& row : it->uppers) {
            BoundValue b{evaluate_bound(row, it->var), row.strict};
            if (!upper || lt(b.value, upper->value)) upper = b;
            else if (upper->value == b.value) upper->strict = upper->strict || b.strict;
        }
        Stalk chosen;
        if (lower && upper) {
            if (lower->value == upper->value) {
                if (lower->strict || upper->strict)
                    throw Error("internal: empty interval survived elimination");
                chosen = lower->value;
            } else {
                chosen = div(lower->value + upper->value, Stalk(2));
            }
        } else if (lower) {
            chosen = lower->strict ? lower->value + Stalk(1) : lower->value;
        } else if (upper) {
            chosen = upper->strict ? upper->value - Stalk(1) : upper->value;
        }
        values[it->var] = chosen;
    }
    for (auto it = substs_.rbegin(); it != substs_.rend(); ++it) {
        Stalk acc = it->constant;
        for (std::size_t j = 0; j < it->coeffs.size(); ++j) {
            if (it->coeffs[j].is_zero()) continue;
            if (!values[j]) throw Error("internal: substitution references an unvalued variable");
            acc += it->coeffs[j] * *values[j];
        }
        values[it->var] = acc;
    }
    std::vector<Stalk> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        if (!v) throw Error("internal: variable left unvalued after extraction");
        out.push_back(*v);
    }
    return out;
}

LinearSystem assemble_branch(const ConstraintSystem& cs, uint64_t mask) {
    LinearSystem sys = cs.base;
    for (std::size_t i = 0; i < cs.conditionals.size(); ++i) {
        const auto& cc = cs.conditionals[i];
        if ((mask >> i) & 1u) {
            sys.equalities.push_back(EqRow{cc.guard, Stalk()});
        } else {
            sys.equalities.push_back(cc.positive_equation);
            sys.inequalities.push_back(LinRow{cc.guard, Stalk(), true});
        }
    }
    return sys;
}

void check_branch_satisfies(const LinearSystem& sys, const std::vector<Stalk>& values) {
    for (const auto& eq : sys.equalities) {
        Stalk acc;
        for (std::size_t j = 0; j < values.size(); ++j) acc += eq.coeffs[j] * values[j];
        if (acc != eq.rhs) throw Error("internal: witness violates " + format_eq(sys.vars, eq));
    }
    for (const auto& row : sys.inequalities) {
        Stalk acc;
        for (std::size_t j = 0; j < values.size(); ++j) acc += row.coeffs[j] * values[j];
        bool ok = row.strict ? lt(row.rhs, acc) : le(row.rhs, acc);
        if (!ok) throw Error("internal: witness violates " + format_row(sys.vars, row));
    }
}

} // namespace

SolveResult solve(const ConstraintSystem& cs, SolverMode mode) {
    std::size_t n_cond = cs.conditionals.size();
    std::vector<uint64_t> masks;
    if (mode == SolverMode::Strict || n_cond == 0) {
        masks.push_back(0);
    } else {
        if (n_cond > 16)
            throw Error("case split over " + std::to_string(n_cond) +
                        " conditional constraints is too large; use strict mode");
        for (uint64_t mask = 0; mask < (uint64_t{1} << n_cond); ++mask) {
            bool viable = true;
            for (std::size_t i = 0; i < n_cond; ++i)
                if (((mask >> i) & 1u) && !cs.conditionals[i].zero_branch_ok) { viable = false; break; }
            if (viable) masks.push_back(mask);
        }
    }

    std::optional<Infeasible> failure;
    int branches = 0;
    for (uint64_t mask : masks) {
        ++branches;
        LinearSystem sys = assemble_branch(cs, mask);
        Engine engine(sys);
        if (engine.run()) {
            std::vector<Stalk> values = engine.extract();
            check_branch_satisfies(sys, values);
            Witness w;
            for (uint32_t i = 0; i < cs.var_count(); ++i) w.weights[cs.bits(i)] = values[i];
            for (std::size_t i = 0; i < n_cond; ++i)
                w.branch.emplace_back(cs.conditionals[i].text,
                                      ((mask >> i) & 1u) ? "zero" : "positive");
            return w;
        }
        if (!failure)
            failure = Infeasible{std::move(engine.steps), std::move(engine.contradiction), 0};
    }
    failure->branches_explored = branches;
    return *failure;
}

LinearSystem fm_eliminate(const LinearSystem& sys, const std::string& var) {
    auto it = std::find(sys.vars.begin(), sys.vars.end(), var);
    if (it == sys.vars.end()) throw NameError("unknown variable '" + var + "'");
    std::size_t v = static_cast<std::size_t>(it - sys.vars.begin());

    LinearSystem out;
    for (std::size_t j = 0; j < sys.vars.size(); ++j)
        if (j != v) out.vars.push_back(sys.vars[j]);
    auto drop_column = [&](const std::vector<Stalk>& coeffs) {
        std::vector<Stalk> r;
        r.reserve(coeffs.size() - 1);
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            if (j != v) r.push_back(coeffs[j]);
        return r;
    };

    std::vector<LinRow> rows = sys.inequalities;
    for (const auto& eq : sys.equalities) {
        if (eq.coeffs[v].is_zero()) {
            out.equalities.push_back(EqRow{drop_column(eq.coeffs), eq.rhs});
            continue;
        }
        // split into a pair of opposite inequalities so the pairing covers it
        rows.push_back(LinRow{eq.coeffs, eq.rhs, false});
        std::vector<Stalk> negated = eq.coeffs;
        for (auto& c : negated) c = -c;
        rows.push_back(LinRow{std::move(negated), -eq.rhs, false});
    }

    std::vector<LinRow> lowers, uppers;
    std::set<std::string> keys;
    auto emit = [&](LinRow row) {
        if (row_is_ground(row.coeffs) && ground_holds(row.rhs, row.strict)) return;
        if (!keys.insert(row_key(row)).second) return;
        out.inequalities.push_back(LinRow{drop_column(row.coeffs), row.rhs, row.strict});
    };
    for (const auto& r : rows) {
        int s = r.coeffs[v].signum();
        if (s > 0) lowers.push_back(r);
        else if (s < 0) uppers.push_back(r);
        else emit(r);
    }
    for (const auto& lo : lowers) {
        for (const auto& up : uppers) {
            Stalk al = lo.coeffs[v], au = up.coeffs[v];
            LinRow derived;
            derived.strict = lo.strict || up.strict;
            derived.coeffs.assign(sys.vars.size(), Stalk());
            for (std::size_t j = 0; j < sys.vars.size(); ++j) {
                if (j == v) continue;
                derived.coeffs[j] = (-au) * lo.coeffs[j] + al * up.coeffs[j];
            }
            derived.rhs = (-au) * lo.rhs + al * up.rhs;
            emit(std::move(derived));
        }
    }
    return out;
}

PmfModel witness_model(const SpecDocument& doc, const Witness& w) {
    std::vector<std::string> gens = doc.generators();
    uint32_t n = 1u << gens.size();
    std::vector<Stalk> weights;
    weights.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        std::string bits = minterm_bits(i, static_cast<int>(gens.size()));
        auto it = w.weights.find(bits);
        if (it == w.weights.end()) throw Error("witness is missing minterm '" + bits + "'");
        weights.push_back(it->second);
    }
    return PmfModel(std::move(gens), std::move(weights));
}

bool verify_witness(const SpecDocument& doc, const Witness& w) {
    try {
        PmfModel m = witness_model(doc, w);
        for (const auto& c : doc.constraints) {
            bool ok = std::visit(
                [&](const auto& k) -> bool {
                    using T = std::decay_t<decltype(k)>;
                    if constexpr (std::is_same_v<T, ProbEq>) {
                        return prob(m, k.term) == k.value;
                    } else if constexpr (std::is_same_v<T, CondEq>) {
                        return cond(m, k.event, k.given) == k.value;
                    } else if constexpr (std::is_same_v<T, CondEqCond>) {
                        return cond(m, k.e1, k.g1) == cond(m, k.e2, k.g2);
                    } else if constexpr (std::is_same_v<T, JointEq>) {
                        return prob(m, k.a & k.b) == k.value;
                    } else if constexpr (std::is_same_v<T, ProbCmp>) {
                        Stalk p = prob(m, k.term);
                        switch (k.rel) {
                            case Rel::Lt: return lt(p, k.value);
                            case Rel::Le: return le(p, k.value);
                            case Rel::Gt: return lt(k.value, p);
                            case Rel::Ge: return le(k.value, p);
                        }
                        return false;
                    } else {
                        return independent(m, k.a, k.b);
                    }
                },
                c);
            if (!ok) return false;
        }
        return true;
    } catch (const Error&) {
        return false;
    }
}

nlohmann::json to_json(const SolveResult& result) {
    nlohmann::json j;
    if (const auto* w = std::get_if<Witness>(&result)) {
        j["status"] = "sat";
        nlohmann::json weights = nlohmann::json::object();
        for (const auto& [bits, value] : w->weights) weights[bits] = value.str();
        j["witness"] = std::move(weights);
        nlohmann::json cases = nlohmann::json::array();
        for (const auto& [text, which] : w->branch)
            cases.push_back({{"constraint", text}, {"case", which}});
        j["branch"] = {{"cases", std::move(cases)}};
    } else {
        const auto& inf = std::get<Infeasible>(result);
        j["status"] = "unsat";
        j["branches_explored"] = inf.branches_explored;
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& s : inf.steps)
            trace.push_back({{"op", s.op}, {"var", s.var}, {"derived", s.derived}});
        trace.push_back({{"contradiction", inf.contradiction}});
        j["trace"] = std::move(trace);
    }
    return j;
}

} // namespace meadowprob
