/**
 * @file cli.cpp
 * @brief Argument parsing and subcommand execution for the vnep tool.
 */
#include "vnep/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vnep/decompose.hpp"
#include "vnep/error.hpp"
#include "vnep/generators.hpp"
#include "vnep/multiroot.hpp"
#include "vnep/oracle.hpp"
#include "vnep/solver.hpp"

namespace vnep {

namespace {

using json = nlohmann::json;

std::shared_ptr<spdlog::logger> logger() {
    auto log = spdlog::get("vnep");
    if (!log) {
        log = spdlog::stderr_logger_st("vnep");
        const char* level = std::getenv("VNEP_LOG");
        const std::string name = level ? level : "error";
        log->set_level(name == "debug" ? spdlog::level::debug
                       : name == "info" ? spdlog::level::info
                                        : spdlog::level::err);
    }
    return log;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream file(path);
    if (!file) throw ParseError("cannot write " + path);
    file << text;
}

void emit(const RunConfig& config, const json& doc, std::ostream& out) {
    if (config.out_path.empty())
        out << doc.dump(2) << "\n";
    else
        write_text(config.out_path, doc.dump(2) + "\n");
}

Instance load_config_instance(const RunConfig& config) {
    if (config.instance_path.empty()) throw ValidationError("--instance is required");
    return load_instance_file(config.instance_path);
}

ExtractionOrder rooted_order(const RunConfig& config, const Instance& inst) {
    if (!config.order_path.empty()) return order_from_json(read_json_file(config.order_path), inst.request);
    const NodeId root = config.roots.empty() ? *inst.request.nodes.begin() : config.roots.front();
    return orient_bfs(inst.request, root);
}

LabelSetOrdering make_ordering(const RunConfig& config, const OrientedGraph& g, const EdgeLabelAssignment& labels) {
    if (config.ordering == "bag") return bag_label_set_ordering(g, labels);
    if (config.ordering == "auto") return auto_label_set_ordering(g, labels);
    throw ValidationError("--ordering must be bag or auto");
}

json width_report(const ExtractionOrder& order, const RunConfig& config) {
    const auto labels = confluence_edge_labels(order);
    const auto omega = make_ordering(config, order, labels);
    return {{"root", order.root},
            {"ordering", config.ordering},
            {"extraction_width", extraction_width(order, labels)},
            {"extraction_label_width", extraction_label_width(omega)}};
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
    const Instance inst = load_config_instance(config);
    json doc{{"valid", true},
             {"request_nodes", inst.request.nodes.size()},
             {"request_edges", inst.request.edges.size()},
             {"substrate_nodes", inst.substrate.nodes.size()},
             {"substrate_edges", inst.substrate.edges.size()}};
    if (!config.order_path.empty()) {
        const json order_doc = read_json_file(config.order_path);
        if (order_doc.contains("root"))
            order_from_json(order_doc, inst.request);
        else
            generalized_order_from_json(order_doc, inst.request);
        doc["order_valid"] = true;
    }
    emit(config, doc, out);
    return kExitOk;
}

int cmd_widths(const RunConfig& config, std::ostream& out) {
    const Instance inst = load_config_instance(config);
    json reports = json::array();
    if (!config.order_path.empty()) {
        reports.push_back(width_report(rooted_order(config, inst), config));
    } else {
        std::vector<NodeId> roots = config.roots;
        if (roots.empty()) roots.assign(inst.request.nodes.begin(), inst.request.nodes.end());
        for (const auto& r : roots) reports.push_back(width_report(orient_bfs(inst.request, r), config));
    }
    emit(config, {{"reports", reports}}, out);
    return kExitOk;
}

json solution_summary(const LpProgram& program, const LpSolution& sol) {
    return {{"status", to_string(sol.status)},
            {"objective", sol.objective},
            {"iterations", sol.iterations},
            {"variables", program.variables().size()},
            {"constraints", program.constraints().size()}};
}

/// Shared tail of every solve: decomposition result → verified JSON.
int finish_solve(const RunConfig& config, const Instance& inst, const Instance& report_instance,
                 const ConvexCombination& d, const Assignment& solution, json doc, std::ostream& out,
                 std::ostream& err) {
    const auto check = verify_convex_combination(inst, d, &solution, config.tolerance);
    ConvexCombination projected;
    for (const auto& entry : d.entries)
        projected.entries.push_back(
            {entry.value, project_mapping(entry.mapping, report_instance.request.nodes, report_instance.request.edges)});
    doc["combination"] = combination_to_json(projected);
    doc["verification"] = {{"passed", check.passed()}, {"failures", check.failures}};
    if (auto best = best_entry(report_instance, projected))
        doc["best"] = {{"cost", mapping_cost(report_instance, best->mapping)},
                       {"value", best->value},
                       {"mapping", mapping_to_json(best->mapping)}};
    emit(config, doc, out);
    if (!check.passed()) {
        err << json{{"error", {{"kind", "verification"}, {"message", check.failures.front()}}}}.dump() << "\n";
        return kExitFailed;
    }
    return kExitOk;
}

int report_unsolved(const LpSolution& sol, json doc, const RunConfig& config, std::ostream& out, std::ostream& err) {
    emit(config, doc, out);
    err << json{{"error", {{"kind", to_string(sol.status)}, {"message", sol.diagnostics}}}}.dump() << "\n";
    return sol.status == SolveStatus::NumericalFailure ? kExitInternal : kExitFailed;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const Instance inst = load_config_instance(config);
    auto log = logger();
    json doc{{"formulation", config.formulation}};

    if (config.formulation == "multiroot") {
        OrientedGraph g;
        if (!config.order_path.empty())
            g = generalized_order_from_json(read_json_file(config.order_path), inst.request);
        else if (!config.roots.empty())
            g = orient_from_roots(inst.request, config.roots);
        else
            throw ValidationError("multiroot needs --order or at least one --root");
        MultiRootSetup setup;
        setup.instance = inst;
        setup.order = g;
        setup.regions = partition_root_regions(g);
        NodeId top = setup.regions.roots.front();
        if (!config.roots.empty() && setup.regions.owner.count(config.roots.front()) &&
            std::count(setup.regions.roots.begin(), setup.regions.roots.end(), config.roots.front()))
            top = config.roots.front();
        setup.region_order = root_region_order(setup.regions, top);
        setup = collapse_cycles(std::move(setup));
        const auto labels = multiroot_confluence_labels(setup.order, setup.regions);
        std::vector<GammaScope> scopes;
        for (const auto& r : setup.regions.roots) {
            OrientedGraph graph = setup.regions.region_graph(r);
            LabelSetOrdering omega = make_ordering(config, graph, labels);
            scopes.push_back({r, std::move(graph), std::move(omega)});
        }
        doc["ordering"] = config.ordering;
        doc["regions"] = region_report(setup.regions, setup.region_order, labels, scopes);
        const LpProgram program = build_multiroot(setup.instance, setup.order, labels, scopes);
        if (!config.export_lp_path.empty()) write_text(config.export_lp_path, export_lp(program));
        log->info("multiroot program: {} variables, {} constraints", program.variables().size(),
                  program.constraints().size());
        const LpSolution sol = solve_lp(program);
        doc["lp"] = solution_summary(program, sol);
        if (!sol.optimal()) return report_unsolved(sol, doc, config, out, err);
        const Assignment values = sol.assignment(program);
        const auto d = decompose_multiroot(setup.instance, setup.order, setup.regions, setup.region_order, labels,
                                           scopes, values);
        return finish_solve(config, setup.instance, inst, d, values, doc, out, err);
    }

    const ExtractionOrder order = rooted_order(config, inst);
    doc["root"] = order.root;
    if (config.formulation == "mcf") {
        if (!inst.request.is_tree()) throw ValidationError("--formulation mcf requires a tree request");
        const LpProgram program = build_mcf(inst);
        if (!config.export_lp_path.empty()) write_text(config.export_lp_path, export_lp(program));
        const LpSolution sol = solve_lp(program);
        doc["lp"] = solution_summary(program, sol);
        if (!sol.optimal()) return report_unsolved(sol, doc, config, out, err);
        const Assignment values = sol.assignment(program);
        return finish_solve(config, inst, inst, decompose_mcf_tree(inst, order, values), values, doc, out, err);
    }
    if (config.formulation != "adapted") throw ValidationError("--formulation must be mcf, adapted or multiroot");
    const auto labels = confluence_edge_labels(order);
    const auto omega = make_ordering(config, order, labels);
    doc["ordering"] = config.ordering;
    doc["extraction_width"] = extraction_width(order, labels);
    doc["extraction_label_width"] = extraction_label_width(omega);
    const LpProgram program = build_adapted(inst, order, labels, omega);
    if (!config.export_lp_path.empty()) write_text(config.export_lp_path, export_lp(program));
    log->info("adapted program: {} variables, {} constraints", program.variables().size(),
              program.constraints().size());
    const LpSolution sol = solve_lp(program);
    doc["lp"] = solution_summary(program, sol);
    if (!sol.optimal()) return report_unsolved(sol, doc, config, out, err);
    const Assignment values = sol.assignment(program);
    return finish_solve(config, inst, inst, decompose_rip(inst, order, labels, omega, values), values, doc, out, err);
}

int cmd_oracle(const RunConfig& config, std::ostream& out) {
    const Instance inst = load_config_instance(config);
    const auto best = oracle_best(inst);
    json doc{{"feasible", best.has_value()}};
    if (best) {
        doc["cost"] = best->cost;
        doc["mapping"] = mapping_to_json(best->mapping);
    }
    emit(config, doc, out);
    return kExitOk;
}

std::uint64_t require_seed(const RunConfig& config) {
    if (!config.seed) throw ValidationError("generator " + config.kind + " requires --seed");
    return *config.seed;
}

int cmd_gen(const RunConfig& config, std::ostream& out) {
    SubstrateSpec substrate;
    substrate.nodes = config.substrate_nodes.value_or(config.kind == "two-half-wheels" ? 4 : 3);
    json instance_doc;
    json order_doc;
    if (config.kind == "half-wheel") {
        HalfWheelSpec spec;
        spec.n = config.n.value_or(9);
        if (config.wheel_root != "central" && config.wheel_root != "outer")
            throw ValidationError("--wheel-root must be central or outer");
        if (config.sinks != "even" && config.sinks != "odd") throw ValidationError("--sinks must be even or odd");
        spec.root = config.wheel_root == "central" ? HalfWheelRoot::Central : HalfWheelRoot::Outer;
        spec.sinks = config.sinks == "even" ? SinkParity::Even : SinkParity::Odd;
        spec.missing_rim.insert(config.omit_rim.begin(), config.omit_rim.end());
        spec.substrate = substrate;
        const auto g = half_wheel(spec);
        instance_doc = instance_to_json(g.instance);
        order_doc = order_to_json(g.order);
    } else if (config.kind == "cactus") {
        const auto g = random_cactus(require_seed(config), config.max_nodes, substrate);
        instance_doc = instance_to_json(g.instance);
        order_doc = order_to_json(g.order);
    } else if (config.kind == "tree") {
        const auto g = random_tree(require_seed(config), config.n.value_or(6), substrate);
        instance_doc = instance_to_json(g.instance);
        order_doc = order_to_json(g.order);
    } else if (config.kind == "two-half-wheels") {
        const auto g = two_half_wheels(config.n.value_or(7), substrate);
        instance_doc = instance_to_json(g.instance);
        order_doc = generalized_order_to_json(g.order);
    } else if (config.kind == "hypergraph-eo") {
        if (config.sets.empty()) throw ValidationError("hypergraph-eo requires --sets");
        json sets;
        try {
            sets = json::parse(config.sets);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("--sets: ") + e.what());
        }
        SetFamily family;
        for (const auto& s : sets) family.sets.push_back(s.get<LabelSet>());
        for (const auto& s : family.sets)
            for (const auto& k : s) check_identifier(k, "label");
        const auto g = hypergraph_instance(family, substrate);
        instance_doc = instance_to_json(g.instance);
        order_doc = order_to_json(g.order);
    } else if (config.kind == "random") {
        const auto g = random_instance(require_seed(config));
        instance_doc = instance_to_json(g.instance);
        order_doc = order_to_json(g.order);
    } else {
        throw ValidationError("unknown generator " + config.kind);
    }
    if (config.out_path.empty()) {
        out << json{{"instance", instance_doc}, {"order", order_doc}}.dump(2) << "\n";
        return kExitOk;
    }
    write_text(config.out_path, instance_doc.dump(2) + "\n");
    std::string order_path = config.order_out_path;
    if (order_path.empty()) {
        order_path = config.out_path;
        if (order_path.size() > 5 && order_path.substr(order_path.size() - 5) == ".json")
            order_path.resize(order_path.size() - 5);
        order_path += ".order.json";
    }
    write_text(order_path, order_doc.dump(2) + "\n");
    return kExitOk;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int parse_arguments(int argc, const char* const* argv, RunConfig& config, std::ostream& out, std::ostream& err) {
    CLI::App app{"Virtual network embedding toolkit: widths, LP formulations, decomposition, oracle."};
    app.require_subcommand(1);
    std::uint64_t seed = 0;

    auto add_instance = [&](CLI::App* sub) { sub->add_option("--instance", config.instance_path, "Instance JSON"); };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", config.out_path, "Output path (default stdout)"); };
    auto add_order = [&](CLI::App* sub) {
        sub->add_option("--order", config.order_path, "Orientation document (rooted or generalized)");
        sub->add_option("--root", config.roots, "Root node (repeatable for multiroot)");
        sub->add_option("--ordering", config.ordering, "Label set ordering {bag|auto}")
            ->check(CLI::IsMember({"bag", "auto"}));
    };

    auto* validate = app.add_subcommand("validate", "Check an instance (and optionally an orientation)");
    add_instance(validate);
    validate->add_option("--order", config.order_path, "Orientation document");
    add_out(validate);

    auto* widths = app.add_subcommand("widths", "Extraction width and label width per root");
    add_instance(widths);
    add_order(widths);
    add_out(widths);

    auto* solve = app.add_subcommand("solve", "Build, solve, decompose and verify");
    add_instance(solve);
    add_order(solve);
    solve->add_option("--formulation", config.formulation, "{mcf|adapted|multiroot}")
        ->check(CLI::IsMember({"mcf", "adapted", "multiroot"}));
    solve->add_option("--export-lp", config.export_lp_path, "Write the program in LP text format");
    solve->add_option("--tolerance", config.tolerance, "Verification tolerance");
    add_out(solve);

    auto* oracle = app.add_subcommand("oracle", "Cheapest feasible mapping by exhaustive search");
    add_instance(oracle);
    add_out(oracle);

    auto* gen = app.add_subcommand("gen", "Generate instances and orientations");
    gen->add_option("kind", config.kind, "half-wheel|cactus|tree|two-half-wheels|hypergraph-eo|random")->required();
    auto* seed_option = gen->add_option("--seed", seed, "Seed for randomized generators");
    gen->add_option("--n", config.n, "Rim nodes / tree nodes");
    gen->add_option("--wheel-root", config.wheel_root, "{central|outer}");
    gen->add_option("--sinks", config.sinks, "{even|odd}");
    gen->add_option("--omit-rim", config.omit_rim, "Omit rim edge between wK and wK+1 (repeatable)");
    gen->add_option("--max-nodes", config.max_nodes, "Cactus size limit");
    gen->add_option("--substrate-nodes", config.substrate_nodes, "Size of the complete substrate");
    gen->add_option("--sets", config.sets, "JSON array of label sets");
    gen->add_option("--order-out", config.order_out_path, "Orientation output path");
    add_out(gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "arguments", e.what());
        return kExitInput;
    }
    if (seed_option->count() > 0) config.seed = seed;
    for (const auto* sub : app.get_subcommands()) config.command = sub->get_name();
    return kExitOk;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        logger()->debug("command {}", config.command);
        if (config.command == "validate") return cmd_validate(config, out);
        if (config.command == "widths") return cmd_widths(config, out);
        if (config.command == "solve") return cmd_solve(config, out, err);
        if (config.command == "oracle") return cmd_oracle(config, out);
        if (config.command == "gen") return cmd_gen(config, out);
        report_error(err, "arguments", "unknown command " + config.command);
        return kExitInput;
    } catch (const ParseError& e) {
        report_error(err, "parse", e.what());
        return kExitInput;
    } catch (const ValidationError& e) {
        report_error(err, "validation", e.what());
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        report_error(err, "parse", e.what());
        return kExitInput;
    } catch (const BudgetExceeded& e) {
        report_error(err, "budget", e.what());
        return kExitFailed;
    } catch (const InvariantError& e) {
        report_error(err, "invariant", e.what());
        return kExitInternal;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return kExitInternal;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    if (int code = parse_arguments(argc, argv, config, out, err); code != kExitOk || config.command.empty())
        return code;
    return run(config, out, err);
}

}  // namespace vnep
