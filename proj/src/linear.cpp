#include "meadowprob/linear.hpp"

namespace meadowprob {

namespace {

std::string format_terms(const std::vector<std::string>& vars, const std::vector<Stalk>& coeffs) {
    std::string out;
    bool first = true;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const Stalk& c = coeffs[i];
        if (c.is_zero()) continue;
        const std::string& name = i < vars.size() ? vars[i] : "v" + std::to_string(i);
        if (first) {
            if (c == Stalk(1)) out += name;
            else if (c == Stalk(-1)) out += "-" + name;
            else out += c.str() + "*" + name;
            first = false;
        } else {
            Stalk a = c.signum() < 0 ? -c : c;
            out += c.signum() < 0 ? " - " : " + ";
            out += a == Stalk(1) ? name : a.str() + "*" + name;
        }
    }
    if (first) out = "0";
    return out;
}

} // namespace

std::string format_row(const std::vector<std::string>& vars, const LinRow& row) {
    return format_terms(vars, row.coeffs) + (row.strict ? " > " : " >= ") + row.rhs.str();
}

std::string format_eq(const std::vector<std::string>& vars, const EqRow& row) {
    return format_terms(vars, row.coeffs) + " = " + row.rhs.str();
}

std::string format_affine(const std::vector<std::string>& vars,
                          const std::vector<Stalk>& coeffs, const Stalk& constant) {
    std::string out;
    if (!constant.is_zero()) out = constant.str();
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const Stalk& c = coeffs[i];
        if (c.is_zero()) continue;
        const std::string& name = i < vars.size() ? vars[i] : "v" + std::to_string(i);
        if (out.empty()) {
            if (c == Stalk(1)) out = name;
            else if (c == Stalk(-1)) out = "-" + name;
            else out = c.str() + "*" + name;
        } else {
            Stalk a = c.signum() < 0 ? -c : c;
            out += c.signum() < 0 ? " - " : " + ";
            out += a == Stalk(1) ? name : a.str() + "*" + name;
        }
    }
    return out.empty() ? "0" : out;
}

} // namespace meadowprob
