#pragma once

// Command-line front end. `run` takes the argument vector and output streams
// so it can be driven from tests; the tool's main only forwards to it.
//
// Exit codes: 0 success, 1 internal error, 2 not found (or a witness that
// fails verification), 3 invalid input, 4 budget exceeded.

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prodense/bounds.hpp"
#include "prodense/correlation.hpp"
#include "prodense/errors.hpp"
#include "prodense/exact.hpp"
#include "prodense/extraction.hpp"
#include "prodense/family.hpp"
#include "prodense/grid.hpp"
#include "prodense/limits.hpp"
#include "prodense/workbench.hpp"

namespace prodense::cli {

enum ExitCode : int { ok = 0, internal_error = 1, not_found = 2, invalid_input = 3, budget_exceeded = 4 };

namespace detail {

using nlohmann::json;

inline std::string subset_text(const std::vector<std::uint64_t>& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "}";
}

inline std::string witness_text(const SubgridWitness& w) {
    std::string out;
    for (std::size_t j = 0; j < w.subsets.size(); ++j) {
        out += (j ? " " : "") + std::string("I_") + std::to_string(w.start + j) + "=" + subset_text(w.subsets[j]);
    }
    return out;
}

inline WitnessFile witness_file(const SubgridWitness& w, std::vector<std::size_t> levels,
                                std::optional<std::vector<std::uint64_t>> gamma = std::nullopt) {
    return WitnessFile{w.start, std::move(gamma), w.subsets, std::move(levels)};
}

inline ExtractionMode parse_mode(const std::string& s) {
    if (s == "proof") return ExtractionMode::proof;
    if (s == "exhaustive") return ExtractionMode::exhaustive;
    throw ParseError("--mode must be proof or exhaustive");
}

inline LogBase parse_log_base(const std::string& s) {
    if (s == "two" || s == "2") return LogBase::two;
    if (s == "natural" || s == "e") return LogBase::natural;
    throw ParseError("--log-base must be two or natural");
}

inline std::vector<BigNatural> parse_naturals(const std::vector<std::string>& items) {
    std::vector<BigNatural> out;
    for (const auto& s : items) out.push_back(parse_natural(s));
    return out;
}

struct Options {
    // global
    std::string format = "text";
    unsigned threads = 1;
    std::uint64_t max_nodes = Limits{}.max_nodes;
    std::uint64_t max_cells = Limits{}.max_cells;
    // numeric parameters, all exact
    std::string theta, eps, delta, noise = "0", r = "1", value, x = "0";
    std::uint64_t k = 2, n = 1, iterations = 1, seed = 0, t = 1, cut = 0, cap = 4, level = 0;
    std::vector<std::uint64_t> targets, sizes, levels, gamma_points;
    std::vector<std::string> big_sizes;
    bool no_prune = false, planted = false, has_gamma = false;
    std::string log_base = "two", mode = "proof", order = "end-extension", encoding = "auto";
    std::string quantity, instance, witness, out, witness_out;
    std::size_t k0 = 0;

    Limits limits() const {
        Limits l;
        l.threads = threads;
        l.max_nodes = max_nodes;
        l.max_cells = max_cells;
        return l;
    }
    bool json_output() const { return format == "json"; }
};

inline ExactRational required_rational(const std::string& text, const char* flag) {
    if (text.empty()) throw ParseError(std::string(flag) + " is required");
    return parse_rational(text);
}

inline void emit(std::ostream& out, const Options& o, const json& j, const std::string& text) {
    if (o.json_output()) {
        out << j.dump() << "\n";
    } else {
        out << text;
    }
}

// --- verbs ------------------------------------------------------------------

inline int run_bounds(const Options& o, std::ostream& out) {
    const Limits limits = o.limits();
    const auto& q = o.quantity;
    auto rational_result = [&](const ExactRational& v) {
        emit(out, o, json{{"quantity", q}, {"value", to_string(v)}}, to_string(v) + "\n");
        return ok;
    };
    auto natural_result = [&](const BigNatural& v) {
        emit(out, o, json{{"quantity", q}, {"value", to_string(v)}}, to_string(v) + "\n");
        return ok;
    };
    if (q == "sigma") {
        return natural_result(sigma(required_rational(o.theta, "--theta"), required_rational(o.eps, "--eps"), o.k));
    }
    if (q == "eps-prime") return rational_result(eps_prime(required_rational(o.eps, "--eps"), o.targets, limits));
    if (q == "t") return rational_result(t_bound(required_rational(o.eps, "--eps"), o.targets, limits));
    if (q == "q") {
        return rational_result(q_bound(required_rational(o.theta, "--theta"), required_rational(o.eps, "--eps"),
                                       parse_natural(o.r), o.targets, limits));
    }
    if (q == "s") return natural_result(from_u64(s_delta(required_rational(o.delta, "--delta"))));
    if (q == "v") {
        const auto sizes = parse_naturals(o.big_sizes);
        return rational_result(v_delta(required_rational(o.delta, "--delta"), o.targets, sizes, !o.no_prune, limits));
    }
    if (q == "f") {
        const auto chain = f_chain(required_rational(o.delta, "--delta"), o.targets, limits, !o.no_prune);
        json values = json::array();
        std::string text;
        for (const auto& v : chain) {
            values.push_back(to_string(v));
            text += to_string(v) + "\n";
        }
        emit(out, o, json{{"quantity", q}, {"value", values}}, text);
        return ok;
    }
    if (q == "ackermann") return natural_result(ackermann(o.n, parse_natural(o.x), limits));
    if (q == "p-eps") {
        return natural_result(from_u64(p_eps(required_rational(o.eps, "--eps"), parse_log_base(o.log_base))));
    }
    if (q == "leq-tower") {
        const bool holds = leq_tower(parse_natural(o.value), TowerRef{o.iterations, parse_natural(o.x)});
        emit(out, o, json{{"quantity", q}, {"value", holds}}, std::string(holds ? "true" : "false") + "\n");
        return ok;
    }
    throw ParseError("unknown bound quantity \"" + q +
                     "\" (expected sigma, eps-prime, t, q, s, v, f, ackermann, p-eps or leq-tower)");
}

inline int run_gen(const Options& o, std::ostream& out) {
    if (o.out.empty()) throw ParseError("--out is required");
    const Limits limits = o.limits();
    const GridShape base(o.k0, o.sizes);
    std::vector<std::size_t> level_keys(o.levels.begin(), o.levels.end());
    if (level_keys.empty()) level_keys.push_back(base.end());
    LevelEncoding encoding = LevelEncoding::automatic;
    if (o.encoding == "points") encoding = LevelEncoding::points;
    else if (o.encoding == "bitset") encoding = LevelEncoding::bitset;
    else if (o.encoding != "auto") throw ParseError("--encoding must be auto, points or bitset");

    Instance inst;
    std::optional<SubgridWitness> planted;
    if (o.planted) {
        auto made = gen_planted(o.seed, base, o.targets, parse_rational(o.noise), level_keys, limits);
        inst = std::move(made.instance);
        planted = std::move(made.planted);
    } else {
        inst = gen_random_levels(o.seed, base, required_rational(o.delta, "--delta"), level_keys, o.targets, limits);
    }
    write_instance(inst, o.out, encoding);
    if (planted && !o.witness_out.empty()) {
        write_witness(witness_file(*planted, inst.levels.keys()), o.witness_out);
    }
    json j{{"instance", o.out}, {"delta", to_string(inst.delta)}, {"levels", json::array()}};
    std::string text;
    for (const auto& [k, d] : inst.levels.levels()) {
        j["levels"].push_back({{"k", k}, {"count", d.count()}, {"density", to_string(density(d))}});
        text += "level " + std::to_string(k) + ": " + std::to_string(d.count()) + " points, density " +
                to_string(density(d)) + "\n";
    }
    if (planted) {
        j["planted"] = witness_to_json(witness_file(*planted, inst.levels.keys()));
        text += "planted " + witness_text(*planted) + "\n";
    }
    emit(out, o, j, text);
    return ok;
}

inline std::size_t chosen_level(const Options& o, const Instance& inst) {
    if (o.level == 0) return inst.levels.keys().back();
    if (!inst.levels.levels().contains(o.level)) throw ParseError("--level " + std::to_string(o.level) + " is not in the instance");
    return o.level;
}

inline int run_extract(const Options& o, std::ostream& out) {
    const Limits limits = o.limits();
    const Instance inst = read_instance(o.instance, limits);
    const std::size_t k = chosen_level(o, inst);
    const ExactRational eps = o.eps.empty() ? inst.delta : parse_rational(o.eps);
    const auto targets = inst.absolute_targets();
    const auto w = extract_subgrid(inst.levels.at(k), targets, eps, parse_mode(o.mode), limits);
    const auto file = witness_file(w, {k});
    if (!o.out.empty()) write_witness(file, o.out);
    emit(out, o, witness_to_json(file), "level " + std::to_string(k) + ": " + witness_text(w) + "\n");
    return ok;
}

inline int run_per_level(const Options& o, std::ostream& out) {
    const Limits limits = o.limits();
    const Instance inst = read_instance(o.instance, limits);
    const ExactRational eps = o.eps.empty() ? inst.delta : parse_rational(o.eps);
    const auto targets = inst.absolute_targets();
    const auto found = extract_per_level(inst.levels, targets, eps, parse_mode(o.mode), limits);
    json j = json::object();
    std::string text;
    bool all = true;
    for (const auto& [k, w] : found) {
        j[std::to_string(k)] = w ? witness_to_json(witness_file(*w, {k})) : json(nullptr);
        text += "level " + std::to_string(k) + ": " + (w ? witness_text(*w) : std::string("not found")) + "\n";
        all = all && w.has_value();
    }
    emit(out, o, j, text);
    return all ? ok : not_found;
}

inline int run_split(const Options& o, std::ostream& out) {
    const Limits limits = o.limits();
    const Instance inst = read_instance(o.instance, limits);
    const ExactRational eps = o.eps.empty() ? inst.delta : parse_rational(o.eps);
    const auto result = split_and_extract(inst.levels, o.cut, required_rational(o.theta, "--theta"), eps,
                                          inst.absolute_targets(), parse_mode(o.mode), limits);
    const auto gamma = result.gamma.indices();
    json j{{"cut", o.cut},
           {"gamma_points", gamma},
           {"gamma_density", to_string(density(result.gamma))},
           {"kept", result.kept},
           {"witnesses", json::object()}};
    std::string text = "gamma: " + std::to_string(gamma.size()) + " points, density " +
                       to_string(density(result.gamma)) + "\nkept levels:";
    for (auto k : result.kept) text += " " + std::to_string(k);
    text += "\n";
    for (const auto& [k, w] : result.witnesses) {
        j["witnesses"][std::to_string(k)] = w ? witness_to_json(witness_file(*w, {k}, gamma)) : json(nullptr);
        text += "level " + std::to_string(k) + ": " + (w ? witness_text(*w) : std::string("not found")) + "\n";
    }
    emit(out, o, j, text);
    return ok;
}

inline int run_witness(const Options& o, std::ostream& out) {
    const Limits limits = o.limits();
    const Instance inst = read_instance(o.instance, limits);
    const ExactRational delta = o.delta.empty() ? inst.delta : parse_rational(o.delta);
    const auto found = common_witness(inst.levels, inst.absolute_targets(), delta, o.t, limits);
    const auto file = witness_file(found.witness, found.kept);
    if (!o.out.empty()) write_witness(file, o.out);
    json j = witness_to_json(file);
    j["delta_dense"] = found.delta_dense;
    std::string text = "levels:";
    for (auto k : found.kept) text += " " + std::to_string(k);
    text += "\n" + witness_text(found.witness) + "\n";
    if (!found.delta_dense) text += "note: not every level is delta-dense\n";
    emit(out, o, j, text);
    return ok;
}

inline int run_rank(const Options& o, std::ostream& out) {
    const Limits limits = o.limits();
    const Instance inst = read_instance(o.instance, limits);
    const std::size_t cut = o.has_gamma || o.cut ? o.cut : inst.levels.start();
    if (cut < inst.levels.start() || cut > inst.levels.base().end()) throw ParseError("--cut outside the instance");
    const GridShape head = inst.levels.base().prefix(cut);
    const PointSet gamma = o.has_gamma ? PointSet::from_indices(head, o.gamma_points, limits) : PointSet::full(head, limits);
    const auto fam = enumerate_family(cut, gamma, inst.levels, inst.absolute_targets(), o.cap, limits);
    const std::size_t end_rank = hereditary_rank(fam, RankOrder::end_extension);
    const std::size_t inc_rank = hereditary_rank(fam, RankOrder::inclusion);
    json members = json::array();
    for (const auto& m : fam.members) members.push_back(m);
    json j{{"cut", cut}, {"members", members}, {"rank", end_rank}, {"rank_inclusion", inc_rank}};
    std::string text = "members: " + std::to_string(fam.members.size()) + "\nrank: " + std::to_string(end_rank) + "\n";
    if (inc_rank != end_rank || o.order == "both") {
        text += "rank (inclusion order): " + std::to_string(inc_rank) + "\n";
    }
    emit(out, o, j, text);
    return ok;
}

inline int run_verify(const Options& o, std::ostream& out) {
    const Limits limits = o.limits();
    const Instance inst = read_instance(o.instance, limits);
    const WitnessFile w = read_witness(o.witness);
    const auto verdicts = verify_witness(inst, w);
    json j = json::array();
    std::string text;
    bool all = true;
    for (const auto& v : verdicts) {
        j.push_back({{"level", v.level}, {"ok", v.ok}, {"reason", v.reason}});
        text += "level " + std::to_string(v.level) + ": " + (v.ok ? "ok" : "FAILED (" + v.reason + ")") + "\n";
        all = all && v.ok;
    }
    emit(out, o, j, text);
    return all ? ok : not_found;
}

inline int run_report(const Options& o, std::ostream& out) {
    const auto report = bound_report(required_rational(o.delta, "--delta"), o.targets, o.limits());
    emit(out, o, bound_report_json(report), bound_report_text(report));
    return ok;
}

inline int run_oracle(const Options& o, std::ostream& out) {
    const Limits limits = o.limits();
    const Instance inst = read_instance(o.instance, limits);
    const std::size_t k = chosen_level(o, inst);
    const auto targets = inst.absolute_targets();
    const auto brute = brute_force_subgrid(inst.levels.at(k), targets, limits);
    std::optional<SubgridWitness> search;
    try {
        search = extract_subgrid(inst.levels.at(k), targets, inst.delta, ExtractionMode::exhaustive, limits);
    } catch (const NotFound&) {
    }
    const bool agree = brute == search;
    json j{{"level", k},
           {"brute_force", brute ? witness_to_json(witness_file(*brute, {k})) : json(nullptr)},
           {"exhaustive", search ? witness_to_json(witness_file(*search, {k})) : json(nullptr)},
           {"agree", agree}};
    std::string text = "brute force: " + (brute ? witness_text(*brute) : std::string("not found")) +
                       "\nexhaustive:  " + (search ? witness_text(*search) : std::string("not found")) +
                       "\n" + (agree ? "agree" : "DISAGREE") + "\n";
    emit(out, o, j, text);
    if (!agree) return internal_error;
    return brute ? ok : not_found;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    detail::Options o;
    CLI::App app{"Exact bounds and finite search for dense subsets of products", "prodense"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--max-nodes", o.max_nodes, "Search node budget");
    app.add_option("--max-cells", o.max_cells, "Point-set cell budget");

    auto targets_opt = [&](CLI::App* sub) { sub->add_option("--targets", o.targets, "Target sizes m_q")->delimiter(','); };
    auto instance_opt = [&](CLI::App* sub) { sub->add_option("--instance", o.instance, "Instance file")->required(); };

    auto* bounds = app.add_subcommand("bounds", "Exact bound values");
    bounds->add_option("quantity", o.quantity, "sigma|eps-prime|t|q|s|v|f|ackermann|p-eps|leq-tower")->required();
    bounds->add_option("--theta", o.theta);
    bounds->add_option("--eps", o.eps);
    bounds->add_option("--delta", o.delta);
    bounds->add_option("--k", o.k);
    bounds->add_option("--r", o.r);
    bounds->add_option("--sizes", o.big_sizes, "Sizes n_0..n_{k-1} for v")->delimiter(',');
    bounds->add_option("--n", o.n, "Ackermann level");
    bounds->add_option("--x", o.x, "Ackermann or tower argument");
    bounds->add_option("--value", o.value, "Value compared by leq-tower");
    bounds->add_option("--iterations", o.iterations, "Tower height for leq-tower");
    bounds->add_option("--log-base", o.log_base, "two|natural");
    bounds->add_flag("--no-prune", o.no_prune, "Enumerate the dyadic grids in full");
    targets_opt(bounds);

    auto* gen = app.add_subcommand("gen", "Generate an instance file");
    gen->add_option("--seed", o.seed)->required();
    gen->add_option("--k0", o.k0);
    gen->add_option("--sizes", o.sizes)->delimiter(',')->required();
    gen->add_option("--delta", o.delta);
    gen->add_option("--levels", o.levels)->delimiter(',');
    gen->add_flag("--planted", o.planted, "Plant a product of the target sizes");
    gen->add_option("--noise", o.noise, "Noise density for --planted");
    gen->add_option("--encoding", o.encoding, "auto|points|bitset");
    gen->add_option("--out", o.out)->required();
    gen->add_option("--witness-out", o.witness_out, "Planted witness file");
    targets_opt(gen);

    auto* extract = app.add_subcommand("extract", "Find a subgrid inside one level");
    instance_opt(extract);
    extract->add_option("--level", o.level, "Level (default: the largest)");
    extract->add_option("--mode", o.mode)->check(CLI::IsMember({"proof", "exhaustive"}));
    extract->add_option("--eps", o.eps, "Density for proof mode (default: instance delta)");
    extract->add_option("--out", o.out, "Witness file");

    auto* per_level = app.add_subcommand("per-level", "Extract on every level independently");
    instance_opt(per_level);
    per_level->add_option("--mode", o.mode)->check(CLI::IsMember({"proof", "exhaustive"}));
    per_level->add_option("--eps", o.eps);

    auto* split = app.add_subcommand("split", "Fubini split followed by per-level extraction");
    instance_opt(split);
    split->add_option("--cut", o.cut)->required();
    split->add_option("--theta", o.theta)->required();
    split->add_option("--eps", o.eps);
    split->add_option("--mode", o.mode)->check(CLI::IsMember({"proof", "exhaustive"}));

    auto* witness = app.add_subcommand("witness", "Common witness for at least t levels");
    instance_opt(witness);
    witness->add_option("--t", o.t)->required();
    witness->add_option("--delta", o.delta);
    witness->add_option("--out", o.out);

    auto* rank = app.add_subcommand("rank", "Enumerate the level-set family and print its rank");
    instance_opt(rank);
    rank->add_option("--cut", o.cut);
    rank->add_option("--gamma-points", o.gamma_points)->delimiter(',');
    rank->add_option("--cap", o.cap, "Largest level set tried");
    rank->add_option("--order", o.order)->check(CLI::IsMember({"end-extension", "both"}));

    auto* verify = app.add_subcommand("verify", "Check a witness file against an instance");
    instance_opt(verify);
    verify->add_option("--witness", o.witness)->required();

    auto* report = app.add_subcommand("report", "Bound comparison table");
    report->add_option("--delta", o.delta)->required();
    targets_opt(report);

    auto* oracle = app.add_subcommand("oracle", "Brute-force extraction next to the exhaustive search");
    instance_opt(oracle);
    oracle->add_option("--level", o.level);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    }
    o.has_gamma = rank->count("--gamma-points") > 0;
    if (split->parsed() && split->count("--mode") == 0) o.mode = "exhaustive";

    const std::vector<std::pair<CLI::App*, std::function<int(const detail::Options&, std::ostream&)>>> verbs{
        {bounds, detail::run_bounds},   {gen, detail::run_gen},       {extract, detail::run_extract},
        {per_level, detail::run_per_level}, {split, detail::run_split}, {witness, detail::run_witness},
        {rank, detail::run_rank},       {verify, detail::run_verify}, {report, detail::run_report},
        {oracle, detail::run_oracle}};
    try {
        for (const auto& [sub, fn] : verbs) {
            if (sub->parsed()) return fn(o, out);
        }
        return invalid_input;
    } catch (const NotFound& e) {
        err << "not found: " << e.what() << "\n";
        return not_found;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return budget_exceeded;
    } catch (const ParseError& e) {
        err << "invalid input: " << e.what() << "\n";
        return invalid_input;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << "\n";
        return invalid_input;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return internal_error;
    }
}

}  // namespace prodense::cli
