#include "meadowprob/config.hpp"
#include "meadowprob/errors.hpp"
#include "meadowprob/lab.hpp"
#include "meadowprob/solver.hpp"
#include "meadowprob/spec.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace meadowprob;

constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitError = 2;

std::string read_input(const std::string& path, const std::string& inline_text) {
    if (!inline_text.empty()) return inline_text;
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

SolverMode parse_mode(const std::string& mode) {
    if (mode == "strict") return SolverMode::Strict;
    if (mode == "meadow") return SolverMode::Meadow;
    throw Error("unknown solver mode '" + mode + "' (expected strict or meadow)");
}

void print_witness_human(const SpecDocument& doc, const Witness& w, std::ostream& out) {
    PmfModel m = witness_model(doc, w);
    out << m.to_text();
    for (const auto& [text, which] : w.branch)
        out << "# case " << which << ": " << text << "\n";
}

void print_trace_human(const Infeasible& inf, std::ostream& out) {
    for (const auto& step : inf.steps) {
        out << step.op << ' ' << step.var << ":\n";
        for (const auto& row : step.derived) out << "  " << row << '\n';
    }
    out << "contradiction: " << inf.contradiction << '\n';
    if (inf.branches_explored > 1)
        out << "(" << inf.branches_explored << " case-split branches explored, all infeasible)\n";
}

int run_check(const std::string& text, const std::string& format, SolverMode mode) {
    SpecDocument doc = parse_spec(text);
    SolveResult result = solve(lower(doc), mode);
    if (format == "json") {
        std::cout << to_json(result).dump(2) << '\n';
        return std::holds_alternative<Witness>(result) ? kExitSat : kExitUnsat;
    }
    if (const auto* w = std::get_if<Witness>(&result)) {
        std::cout << "SAT\n";
        print_witness_human(doc, *w, std::cout);
        return kExitSat;
    }
    std::cout << "UNSAT\n";
    print_trace_human(std::get<Infeasible>(result), std::cout);
    return kExitUnsat;
}

int run_eval(const std::string& text, const std::vector<std::string>& extra_queries,
             const std::string& model_path, const std::string& format, SolverMode mode) {
    SpecDocument doc = parse_spec(text);
    ResolveContext ctx = ResolveContext::for_document(doc);

    std::vector<StalkExpr> queries = doc.queries;
    for (const auto& q : extra_queries) queries.push_back(parse_stalk_expr_text(q, ctx));

    std::optional<PmfModel> model;
    std::string note;
    nlohmann::json jout;

    if (!model_path.empty()) {
        std::ifstream in(model_path);
        if (!in) throw Error("cannot open model file '" + model_path + "'");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        PmfModel loaded = PmfModel::from_text(buffer.str());
        Witness w;
        for (uint32_t i = 0; i < loaded.minterm_count(); ++i)
            w.weights[minterm_bits(i, loaded.width())] = loaded.weight(i);
        if (!verify_witness(doc, w))
            throw Error("the supplied model does not satisfy the specification");
        model = std::move(loaded);
        note = "values computed on the supplied model";
    } else {
        SolveResult result = solve(lower(doc), mode);
        if (const auto* inf = std::get_if<Infeasible>(&result)) {
            if (format == "json") {
                std::cout << to_json(result).dump(2) << '\n';
            } else {
                std::cout << "UNSAT\n";
                print_trace_human(*inf, std::cout);
                std::cout << "inconsistent specification: queries were not evaluated\n";
            }
            return kExitUnsat;
        }
        const Witness& w = std::get<Witness>(result);
        model = witness_model(doc, w);
        note = "consistency established; values are computed on one satisfying model and are "
               "unique only where the constraints pin them";
        jout["witness"] = to_json(result)["witness"];
    }

    nlohmann::json jqueries = nlohmann::json::array();
    Env empty_env;
    std::ostringstream human;
    for (const auto& q : queries) {
        Stalk value = eval_expr(q, *model, empty_env);
        human << q.str() << " = " << value.str() << '\n';
        jqueries.push_back({{"expr", q.str()}, {"value", value.str()}});
    }
    if (format == "json") {
        jout["status"] = "sat";
        jout["note"] = note;
        jout["queries"] = std::move(jqueries);
        std::cout << jout.dump(2) << '\n';
    } else {
        std::cout << "# " << note << '\n' << human.str();
    }
    return kExitSat;
}

int run_update(const std::string& text, const std::string& evidence_text,
               const std::string& format, SolverMode mode) {
    std::optional<PmfModel> model;
    ResolveContext ctx;

    std::string_view sv = text;
    auto first_content = sv.find_first_not_of(" \t\r\n");
    bool is_model = first_content != std::string_view::npos &&
                    sv.substr(first_content).rfind("gens:", 0) == 0;
    if (is_model) {
        model = PmfModel::from_text(text);
        ctx.generators = model->gens();
    } else {
        SpecDocument doc = parse_spec(text);
        ctx = ResolveContext::for_document(doc);
        SolveResult result = solve(lower(doc), mode);
        if (const auto* inf = std::get_if<Infeasible>(&result)) {
            if (format == "json") std::cout << to_json(result).dump(2) << '\n';
            else {
                std::cout << "UNSAT\n";
                print_trace_human(*inf, std::cout);
            }
            return kExitUnsat;
        }
        model = witness_model(doc, std::get<Witness>(result));
    }

    EventTerm evidence = parse_event_text(evidence_text, ctx);
    UpdateResult posterior = update(*model, evidence);
    if (std::holds_alternative<DegenerateUpdate>(posterior)) {
        if (format == "json") {
            std::cout << nlohmann::json{{"status", "degenerate"},
                                        {"evidence", evidence.str()}}
                             .dump(2)
                      << '\n';
        } else {
            std::cout << "degenerate update: evidence '" << evidence.str()
                      << "' has probability 0; no posterior exists\n";
        }
        return kExitUnsat;
    }
    const PmfModel& post = std::get<PmfModel>(posterior);
    if (format == "json") {
        nlohmann::json weights = nlohmann::json::object();
        for (uint32_t i = 0; i < post.minterm_count(); ++i)
            weights[minterm_bits(i, post.width())] = post.weight(i).str();
        std::cout << nlohmann::json{{"status", "ok"},
                                    {"evidence", evidence.str()},
                                    {"posterior", std::move(weights)}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << post.to_text();
    }
    return kExitSat;
}

int run_decompose(const std::string& lhs_text, const std::string& rhs_text,
                  const std::string& events_csv, const std::string& format) {
    ResolveContext ctx = ResolveContext::free();
    StalkExpr lhs = parse_stalk_expr_text(lhs_text, ctx);
    StalkExpr rhs = parse_stalk_expr_text(rhs_text, ctx);

    std::vector<std::string> events;
    if (!events_csv.empty()) {
        std::istringstream in(events_csv);
        std::string name;
        while (std::getline(in, name, ',')) {
            auto b = name.find_first_not_of(" \t");
            auto e = name.find_last_not_of(" \t");
            if (b == std::string::npos) continue;
            events.push_back(name.substr(b, e - b + 1));
        }
    } else {
        std::set<std::string> found;
        for (const StalkExpr* side : {&lhs, &rhs}) {
            // event names are exactly the generators inside P-applications
            std::function<void(const StalkExpr&)> walk = [&](const StalkExpr& e) {
                switch (e.kind()) {
                    case StalkExpr::Kind::Prob:
                        for (const auto& g : e.event().generators()) found.insert(g);
                        break;
                    case StalkExpr::Kind::Cond:
                        for (const auto& g : e.event().generators()) found.insert(g);
                        for (const auto& g : e.given().generators()) found.insert(g);
                        break;
                    case StalkExpr::Kind::Const:
                    case StalkExpr::Kind::Var: break;
                    case StalkExpr::Kind::Neg:
                    case StalkExpr::Kind::Inv:
                    case StalkExpr::Kind::Sign: walk(e.left()); break;
                    default:
                        walk(e.left());
                        walk(e.right());
                }
            };
            walk(*side);
        }
        events.assign(found.begin(), found.end());
    }

    GuardedEquation ge = atom_decompose(lhs, rhs, events);
    int width = static_cast<int>(ge.event_vars.size());
    if (format == "json") {
        nlohmann::json hsets = nlohmann::json::array();
        for (std::size_t j = 0; j < ge.h_sets.size(); ++j) {
            nlohmann::json bits = nlohmann::json::array();
            for (uint32_t idx : ge.h_sets[j]) bits.push_back(minterm_bits(idx, width));
            hsets.push_back({{"z", ge.z_vars[j]}, {"minterms", std::move(bits)}});
        }
        std::cout << nlohmann::json{{"events", ge.event_vars},
                                    {"lhs", ge.lhs.str()},
                                    {"rhs", ge.rhs.str()},
                                    {"h_sets", std::move(hsets)},
                                    {"guard", ge.guard.str()}}
                         .dump(2)
                  << '\n';
        return kExitSat;
    }
    std::cout << "events:";
    for (const auto& e : ge.event_vars) std::cout << ' ' << e;
    std::cout << "\nt' = " << ge.lhs.str() << "\nr' = " << ge.rhs.str() << '\n';
    for (std::size_t j = 0; j < ge.h_sets.size(); ++j) {
        std::cout << "H(" << ge.z_vars[j] << ") = {";
        for (std::size_t i = 0; i < ge.h_sets[j].size(); ++i)
            std::cout << (i ? ", " : "") << minterm_bits(ge.h_sets[j][i], width);
        std::cout << "}\n";
    }
    std::cout << "F = " << ge.guard.str() << '\n';
    return kExitSat;
}

int run_selftest(int trials, uint64_t seed, const std::string& format) {
    SuiteReport report = axiom_suite(trials, seed);
    if (format == "json") std::cout << to_json(report).dump(2) << '\n';
    else std::cout << render_table(report);
    return report.all_passed() ? kExitSat : kExitUnsat;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact probabilistic reasoning over rational-valued pmfs on finite event algebras"};
    app.require_subcommand(1);
    app.fallthrough();  // --format/--mode may follow the subcommand

    std::string format = "human";
    std::string mode_name = "strict";
    app.add_option("--format", format, "output format: human or json")
        ->check(CLI::IsMember({"human", "json"}))
        ->capture_default_str();
    app.add_option("--mode", mode_name, "conditional-constraint reading: strict or meadow")
        ->check(CLI::IsMember({"strict", "meadow"}))
        ->capture_default_str();

    std::string input_path, inline_text;
    auto add_input = [&](CLI::App* cmd) {
        cmd->add_option("input", input_path, "specification file ('-' for stdin)");
        cmd->add_option("--text", inline_text, "inline specification text");
    };

    CLI::App* check = app.add_subcommand("check", "decide consistency of a specification");
    add_input(check);

    CLI::App* eval = app.add_subcommand("eval", "evaluate queries against a satisfying model");
    add_input(eval);
    std::vector<std::string> queries;
    std::string model_path;
    eval->add_option("--query", queries, "additional stalk expression to evaluate");
    eval->add_option("--model", model_path, "evaluate on this model file instead of solving");

    CLI::App* upd = app.add_subcommand("update", "condition a model on evidence");
    add_input(upd);
    std::string evidence;
    upd->add_option("--evidence", evidence, "event expression to condition on")->required();

    CLI::App* dec = app.add_subcommand("decompose", "guarded atom decomposition of an equation");
    std::string lhs_text, rhs_text, events_csv;
    dec->add_option("--lhs", lhs_text, "left-hand stalk expression")->required();
    dec->add_option("--rhs", rhs_text, "right-hand stalk expression")->required();
    dec->add_option("--events", events_csv, "comma-separated event variables (default: inferred)");

    CLI::App* self = app.add_subcommand("selftest", "run the axiom and law suite");
    int trials = 250;
    std::uint64_t seed = 0;
    self->add_option("--trials", trials, "random trials per law")->check(CLI::PositiveNumber);
    self->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    if (const char* cap = std::getenv("MEADOWPROB_MAX_GENERATORS")) {
        try {
            int value = std::stoi(cap);
            if (value < 0) throw std::invalid_argument("negative");
            meadowprob::config::set_max_generators(value);
        } catch (const std::exception&) {
            std::cerr << "error: MEADOWPROB_MAX_GENERATORS must be a nonnegative integer\n";
            return kExitError;
        }
    }

    try {
        SolverMode mode = parse_mode(mode_name);
        if (check->parsed()) {
            if (input_path.empty() == inline_text.empty())
                throw Error("provide exactly one of an input file or --text");
            return run_check(read_input(input_path, inline_text), format, mode);
        }
        if (eval->parsed()) {
            if (input_path.empty() == inline_text.empty())
                throw Error("provide exactly one of an input file or --text");
            return run_eval(read_input(input_path, inline_text), queries, model_path, format, mode);
        }
        if (upd->parsed()) {
            if (input_path.empty() == inline_text.empty())
                throw Error("provide exactly one of an input file or --text");
            return run_update(read_input(input_path, inline_text), evidence, format, mode);
        }
        if (dec->parsed()) return run_decompose(lhs_text, rhs_text, events_csv, format);
        if (self->parsed()) return run_selftest(trials, seed, format);
    } catch (const meadowprob::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
