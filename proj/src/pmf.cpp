#include "meadowprob/pmf.hpp"

#include "meadowprob/config.hpp"
#include "meadowprob/errors.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <set>
#include <sstream>

namespace meadowprob {

PmfModel::PmfModel(std::vector<std::string> gens, std::vector<Stalk> weights)
    : gens_(std::move(gens)), weights_(std::move(weights)) {
    int cap = config::max_generators();
    if (static_cast<int>(gens_.size()) > cap)
        throw CapError("generator count " + std::to_string(gens_.size()) +
                       " exceeds the cap of " + std::to_string(cap));
    std::set<std::string> seen(gens_.begin(), gens_.end());
    if (seen.size() != gens_.size()) throw NameError("duplicate generator in model");
    std::size_t expected = 1u << gens_.size();
    if (weights_.size() != expected)
        throw Error("model needs " + std::to_string(expected) + " weights, got " +
                    std::to_string(weights_.size()));
    Stalk total;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const Stalk& w = weights_[i];
        if (sign(add(sign(w), Stalk(1))) != Stalk(1))
            throw Error("negative weight " + w.str() + " at minterm " +
                        minterm_bits(static_cast<uint32_t>(i), width()));
        total += w;
    }
    if (total != Stalk(1)) throw Error("weights sum to " + total.str() + ", expected 1");
}

const Stalk& PmfModel::weight(uint32_t minterm_index) const {
    if (minterm_index >= weights_.size())
        throw Error("minterm index " + std::to_string(minterm_index) + " out of range");
    return weights_[minterm_index];
}

std::string PmfModel::to_text() const {
    std::ostringstream out;
    out << "gens:";
    for (const auto& g : gens_) out << ' ' << g;
    out << '\n';
    for (std::size_t i = weights_.size(); i-- > 0;)
        out << minterm_bits(static_cast<uint32_t>(i), width()) << ": " << weights_[i].str() << '\n';
    return out.str();
}

PmfModel PmfModel::from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::string> gens;
    bool header_seen = false;
    std::vector<std::optional<Stalk>> weights;
    auto trim = [](std::string& s) {
        auto issp = [](unsigned char c) { return std::isspace(c); };
        while (!s.empty() && issp(s.front())) s.erase(s.begin());
        while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
    };
    while (std::getline(in, line)) {
        trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line.rfind("gens:", 0) != 0) throw Error("model text must start with a 'gens:' line");
            std::istringstream names(line.substr(5));
            std::string g;
            while (names >> g) gens.push_back(g);
            header_seen = true;
            weights.assign(1u << gens.size(), std::nullopt);
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string::npos) throw Error("malformed model line '" + line + "'");
        std::string bits = line.substr(0, colon);
        trim(bits);
        Minterm m = Minterm::from_string(bits);
        if (m.width != static_cast<int>(gens.size()))
            throw Error("minterm '" + bits + "' has the wrong width");
        if (weights[m.index].has_value()) throw Error("duplicate minterm '" + bits + "'");
        weights[m.index] = Stalk::from_string(line.substr(colon + 1));
    }
    if (!header_seen) throw Error("empty model text");
    std::vector<Stalk> resolved;
    resolved.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!weights[i].has_value())
            throw Error("missing minterm '" +
                        minterm_bits(static_cast<uint32_t>(i), static_cast<int>(gens.size())) + "'");
        resolved.push_back(*weights[i]);
    }
    return PmfModel(std::move(gens), std::move(resolved));
}

Stalk prob(const PmfModel& m, const EventTerm& t) {
    MintermSet set = minterms(t, m.gens());
    Stalk total;
    for (uint32_t idx : set.indices) total += m.weight(idx);
    return total;
}

Stalk cond(const PmfModel& m, const EventTerm& x, const EventTerm& y) {
    return div(prob(m, x & y), prob(m, y));
}

bool independent(const PmfModel& m, const EventTerm& x, const EventTerm& y) {
    return prob(m, x & y) == prob(m, x) * prob(m, y);
}

UpdateResult update(const PmfModel& m, const EventTerm& evidence) {
    Stalk p = prob(m, evidence);
    if (p.is_zero()) return DegenerateUpdate{};
    MintermSet covered = minterms(evidence, m.gens());
    Stalk scale = inv(p);
    std::vector<Stalk> weights;
    weights.reserve(m.minterm_count());
    for (uint32_t i = 0; i < m.minterm_count(); ++i)
        weights.push_back(covered.contains(i) ? m.weight(i) * scale : Stalk());
    return PmfModel(m.gens(), std::move(weights));
}

bool update_composition_matches(const PmfModel& m, const EventTerm& x, const EventTerm& y) {
    MintermSet in_x = minterms(x, m.gens());
    MintermSet in_y = minterms(y, m.gens());
    Stalk px = prob(m, x);
    Stalk py = prob(m, y);
    Stalk pxy = prob(m, x & y);
    for (uint32_t i = 0; i < m.minterm_count(); ++i) {
        if (!(in_x.contains(i) && in_y.contains(i))) continue;  // both sides are 0 off x & y
        Stalk composite = div(div(m.weight(i), py), px);
        Stalk joint = div(m.weight(i), pxy);
        if (composite != joint) return false;
    }
    return true;
}

RandomVariable make_random_variable(std::string name, std::vector<std::string> labels) {
    if (labels.empty()) throw NameError("variable '" + name + "' needs at least one label");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) throw NameError("duplicate label in variable '" + name + "'");

    RandomVariable v;
    v.name = std::move(name);
    v.domain = std::move(labels);

    std::size_t n = v.domain.size();
    if (n == 1) {
        v.events.push_back(EventTerm::top());
        return v;
    }
    if (n == 2) {
        EventTerm g = EventTerm::generator(v.name);
        v.generators.push_back(v.name);
        v.events.push_back(g);
        v.events.push_back(!g);
        return v;
    }

    int bits = 0;
    while ((1u << bits) < n) ++bits;
    for (int j = 0; j < bits; ++j)
        v.generators.push_back(v.name + "." + std::to_string(j));
    auto code_event = [&](std::size_t code) {
        EventTerm acc = EventTerm::top();
        bool first = true;
        for (int j = 0; j < bits; ++j) {
            EventTerm g = EventTerm::generator(v.generators[static_cast<std::size_t>(j)]);
            EventTerm lit = ((code >> j) & 1u) ? g : !g;
            acc = first ? lit : (acc & lit);
            first = false;
        }
        return acc;
    };
    for (std::size_t i = 0; i < n; ++i) v.events.push_back(code_event(i));
    for (std::size_t i = n; i < (1u << bits); ++i) v.unused_codes.push_back(code_event(i));
    return v;
}

const EventTerm& rv_event(const RandomVariable& v, std::string_view label) {
    for (std::size_t i = 0; i < v.domain.size(); ++i)
        if (v.domain[i] == label) return v.events[i];
    throw NameError("variable '" + v.name + "' has no label '" + std::string(label) + "'");
}

bool validate_rv(const PmfModel& m, const RandomVariable& v) {
    for (std::size_t i = 0; i < v.events.size(); ++i)
        for (std::size_t j = i + 1; j < v.events.size(); ++j)
            if (!equivalent(v.events[i] & v.events[j], EventTerm::bottom())) return false;
    Stalk total;
    for (const auto& e : v.events) total += prob(m, e);
    return total == Stalk(1);
}

} // namespace meadowprob
