#include "meadowprob/event.hpp"

#include "meadowprob/config.hpp"
#include "meadowprob/errors.hpp"

#include <algorithm>
#include <set>

namespace meadowprob {

struct EventTerm::Node {
    Kind kind;
    std::string name;  // Generator
    Ptr a, b;
};

namespace {

EventTerm::Kind constexpr kGen = EventTerm::Kind::Generator;

}

EventTerm::EventTerm() : node_(bottom().node_) {}

EventTerm::Kind EventTerm::kind() const { return node_->kind; }

EventTerm EventTerm::generator(std::string name) {
    if (name.empty()) throw NameError("generator name must be nonempty");
    return EventTerm(std::make_shared<Node>(Node{kGen, std::move(name), nullptr, nullptr}));
}

EventTerm EventTerm::top() {
    static const Ptr node = std::make_shared<Node>(Node{Kind::Top, {}, nullptr, nullptr});
    return EventTerm(node);
}

EventTerm EventTerm::bottom() {
    static const Ptr node = std::make_shared<Node>(Node{Kind::Bottom, {}, nullptr, nullptr});
    return EventTerm(node);
}

const std::string& EventTerm::name() const {
    if (kind() != Kind::Generator) throw Error("name() on a non-generator event node");
    return node_->name;
}

EventTerm EventTerm::left() const {
    if (!node_->a) throw Error("left() on a leaf event node");
    return EventTerm(node_->a);
}

EventTerm EventTerm::right() const {
    if (!node_->b) throw Error("right() on a non-binary event node");
    return EventTerm(node_->b);
}

EventTerm operator|(const EventTerm& a, const EventTerm& b) {
    return EventTerm(std::make_shared<EventTerm::Node>(
        EventTerm::Node{EventTerm::Kind::Or, {}, a.node_, b.node_}));
}

EventTerm operator&(const EventTerm& a, const EventTerm& b) {
    return EventTerm(std::make_shared<EventTerm::Node>(
        EventTerm::Node{EventTerm::Kind::And, {}, a.node_, b.node_}));
}

EventTerm operator!(const EventTerm& a) {
    return EventTerm(std::make_shared<EventTerm::Node>(
        EventTerm::Node{EventTerm::Kind::Not, {}, a.node_, nullptr}));
}

namespace {

void collect_generators(const EventTerm& t, std::set<std::string>& out) {
    switch (t.kind()) {
        case EventTerm::Kind::Generator: out.insert(t.name()); break;
        case EventTerm::Kind::Or:
        case EventTerm::Kind::And:
            collect_generators(t.left(), out);
            collect_generators(t.right(), out);
            break;
        case EventTerm::Kind::Not: collect_generators(t.left(), out); break;
        case EventTerm::Kind::Top:
        case EventTerm::Kind::Bottom: break;
    }
}

// Precedence: ! binds tighter than &, which binds tighter than |.
int precedence(EventTerm::Kind k) {
    switch (k) {
        case EventTerm::Kind::Or: return 1;
        case EventTerm::Kind::And: return 2;
        case EventTerm::Kind::Not: return 3;
        default: return 4;
    }
}

void render(const EventTerm& t, int parent_prec, std::string& out) {
    int prec = precedence(t.kind());
    bool parens = prec < parent_prec;
    if (parens) out += '(';
    switch (t.kind()) {
        case EventTerm::Kind::Generator: out += t.name(); break;
        case EventTerm::Kind::Top: out += "TOP"; break;
        case EventTerm::Kind::Bottom: out += "BOT"; break;
        case EventTerm::Kind::Not:
            out += '!';
            render(t.left(), prec, out);
            break;
        case EventTerm::Kind::Or:
            render(t.left(), prec, out);
            out += " | ";
            render(t.right(), prec + 1, out);
            break;
        case EventTerm::Kind::And:
            render(t.left(), prec, out);
            out += " & ";
            render(t.right(), prec + 1, out);
            break;
    }
    if (parens) out += ')';
}

} // namespace

std::vector<std::string> EventTerm::generators() const {
    std::set<std::string> names;
    collect_generators(*this, names);
    return {names.begin(), names.end()};
}

std::string EventTerm::str() const {
    std::string out;
    render(*this, 0, out);
    return out;
}

bool EventTerm::same(const EventTerm& other) const {
    if (node_ == other.node_) return true;
    if (kind() != other.kind()) return false;
    switch (kind()) {
        case Kind::Generator: return name() == other.name();
        case Kind::Top:
        case Kind::Bottom: return true;
        case Kind::Not: return left().same(other.left());
        case Kind::Or:
        case Kind::And:
            return left().same(other.left()) && right().same(other.right());
    }
    return false;
}

bool EventTerm::holds(const std::vector<std::string>& gens, uint32_t minterm_index) const {
    switch (kind()) {
        case Kind::Top: return true;
        case Kind::Bottom: return false;
        case Kind::Not: return !left().holds(gens, minterm_index);
        case Kind::Or: return left().holds(gens, minterm_index) || right().holds(gens, minterm_index);
        case Kind::And: return left().holds(gens, minterm_index) && right().holds(gens, minterm_index);
        case Kind::Generator: {
            auto it = std::find(gens.begin(), gens.end(), name());
            if (it == gens.end()) throw NameError("unknown generator '" + name() + "'");
            int pos = static_cast<int>(it - gens.begin());
            int shift = static_cast<int>(gens.size()) - 1 - pos;
            return (minterm_index >> shift) & 1u;
        }
    }
    return false;
}

EventTerm substitute(const EventTerm& t, const std::map<std::string, EventTerm>& binding) {
    switch (t.kind()) {
        case EventTerm::Kind::Generator: {
            auto it = binding.find(t.name());
            return it == binding.end() ? t : it->second;
        }
        case EventTerm::Kind::Not: return !substitute(t.left(), binding);
        case EventTerm::Kind::Or: return substitute(t.left(), binding) | substitute(t.right(), binding);
        case EventTerm::Kind::And: return substitute(t.left(), binding) & substitute(t.right(), binding);
        default: return t;
    }
}

std::string minterm_bits(uint32_t index, int width) {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int j = 0; j < width; ++j)
        if ((index >> (width - 1 - j)) & 1u) s[static_cast<std::size_t>(j)] = '1';
    return s;
}

std::string Minterm::str() const { return minterm_bits(index, width); }

Minterm Minterm::from_string(std::string_view bits) {
    Minterm m;
    m.width = static_cast<int>(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') throw Error("invalid minterm bits '" + std::string(bits) + "'");
        m.index = (m.index << 1) | static_cast<uint32_t>(c == '1');
    }
    return m;
}

bool MintermSet::contains(uint32_t index) const {
    return std::binary_search(indices.begin(), indices.end(), index);
}

namespace {

void check_generator_list(const std::vector<std::string>& gens) {
    int cap = config::max_generators();
    if (static_cast<int>(gens.size()) > cap)
        throw CapError("generator count " + std::to_string(gens.size()) +
                       " exceeds the cap of " + std::to_string(cap));
    std::set<std::string> seen(gens.begin(), gens.end());
    if (seen.size() != gens.size()) throw NameError("duplicate generator in list");
}

} // namespace

MintermSet minterms(const EventTerm& t, const std::vector<std::string>& gens) {
    check_generator_list(gens);
    for (const auto& g : t.generators())
        if (std::find(gens.begin(), gens.end(), g) == gens.end())
            throw NameError("unknown generator '" + g + "'");
    MintermSet result;
    result.gens = gens;
    uint32_t count = 1u << gens.size();
    for (uint32_t i = 0; i < count; ++i)
        if (t.holds(gens, i)) result.indices.push_back(i);
    return result;
}

bool equivalent(const EventTerm& a, const EventTerm& b) {
    std::set<std::string> names;
    collect_generators(a, names);
    collect_generators(b, names);
    std::vector<std::string> gens(names.begin(), names.end());
    return minterms(a, gens).indices == minterms(b, gens).indices;
}

struct SetExpr::Node {
    Kind kind;
    std::string name;
    Ptr a, b;
};

SetExpr SetExpr::base(std::string name) {
    return SetExpr(std::make_shared<Node>(Node{Kind::Base, std::move(name), nullptr, nullptr}));
}

SetExpr SetExpr::empty() {
    return SetExpr(std::make_shared<Node>(Node{Kind::Empty, {}, nullptr, nullptr}));
}

SetExpr SetExpr::universe() {
    return SetExpr(std::make_shared<Node>(Node{Kind::Universe, {}, nullptr, nullptr}));
}

SetExpr SetExpr::union_of(const SetExpr& a, const SetExpr& b) {
    return SetExpr(std::make_shared<Node>(Node{Kind::Union, {}, a.node_, b.node_}));
}

SetExpr SetExpr::intersect_of(const SetExpr& a, const SetExpr& b) {
    return SetExpr(std::make_shared<Node>(Node{Kind::Intersect, {}, a.node_, b.node_}));
}

SetExpr::Kind SetExpr::kind() const { return node_->kind; }

const std::string& SetExpr::name() const {
    if (kind() != Kind::Base) throw Error("name() on a non-base set node");
    return node_->name;
}

SetExpr SetExpr::left() const {
    if (!node_->a) throw Error("left() on a leaf set node");
    return SetExpr(node_->a);
}

SetExpr SetExpr::right() const {
    if (!node_->b) throw Error("right() on a leaf set node");
    return SetExpr(node_->b);
}

EventTerm embed(const SetExpr& s, const std::map<std::string, EventTerm>& base_map) {
    switch (s.kind()) {
        case SetExpr::Kind::Empty: return EventTerm::bottom();
        case SetExpr::Kind::Universe: return EventTerm::top();
        case SetExpr::Kind::Union: return embed(s.left(), base_map) | embed(s.right(), base_map);
        case SetExpr::Kind::Intersect: return embed(s.left(), base_map) & embed(s.right(), base_map);
        case SetExpr::Kind::Base: {
            auto it = base_map.find(s.name());
            if (it == base_map.end()) throw NameError("unmapped base name '" + s.name() + "'");
            return it->second;
        }
    }
    throw Error("unreachable set node kind");
}

} // namespace meadowprob
