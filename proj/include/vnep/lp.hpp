/**
 * @file lp.hpp
 * @brief Linear programs: the multi-commodity-flow relaxation, the adapted
 *        formulation over label set orderings, lifting of convex
 *        combinations, LP text export/import and feasibility checks.
 */
#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vnep/instance.hpp"
#include "vnep/orderings.hpp"

namespace vnep {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { Equal, LessEqual, GreaterEqual };
enum class Sense { Minimize, Maximize };

struct LpVariable {
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
};

struct LpTerm {
    std::size_t var = 0;
    double coef = 0.0;
};

struct LpConstraint {
    std::string name;
    std::vector<LpTerm> terms;
    Relation relation = Relation::Equal;
    double rhs = 0.0;
};

/// Linear program over named variables. Names are unique.
class LpProgram {
public:
    /// Throws ValidationError on a duplicate name.
    std::size_t add_variable(std::string name, double lower = 0.0, double upper = kInfinity);
    std::optional<std::size_t> find(const std::string& name) const;
    /// Throws ValidationError for unknown names.
    std::size_t index(const std::string& name) const;
    void set_bounds(std::size_t var, double lower, double upper);
    /// Terms referencing the same variable are merged; zero terms dropped.
    void add_constraint(std::string name, std::vector<LpTerm> terms, Relation relation, double rhs);
    void set_objective(std::vector<LpTerm> terms, Sense sense);

    const std::vector<LpVariable>& variables() const { return variables_; }
    const std::vector<LpConstraint>& constraints() const { return constraints_; }
    const std::vector<LpTerm>& objective() const { return objective_; }
    Sense sense() const { return sense_; }

private:
    std::vector<LpVariable> variables_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<LpConstraint> constraints_;
    std::vector<LpTerm> objective_;
    Sense sense_ = Sense::Minimize;
};

/// Canonical variable name → value; absent names read as 0.
using Assignment = std::map<std::string, double>;

/// Mapping of label nodes to substrate nodes (an element of a mapping space).
using LabelMapping = std::map<NodeId, NodeId>;

/// "k:u,l:w" (sorted by label node; empty for the empty mapping).
std::string mapping_key(const LabelMapping& m);

/// All functions @p labels → substrate nodes supporting each label's type,
/// in lexicographic order.
std::vector<LabelMapping> mapping_space(const Instance& instance, const LabelSet& labels);

/// Restriction of @p m to @p labels.
LabelMapping restrict_mapping(const LabelMapping& m, const LabelSet& labels);

/// Structured variable identity; `str()` yields the canonical name.
struct VariableKey {
    enum class Kind { GlobalNode, GlobalAllocation, SubNode, SubEdge, Gamma };
    Kind kind = Kind::GlobalNode;
    NodeId request_node;     ///< y and gamma
    Edge request_edge;       ///< sub-kinds and MCF edge flow (original direction)
    NodeId substrate_node;   ///< y and gamma
    Edge substrate_edge;     ///< edge flow
    Resource resource;       ///< allocation
    LabelMapping mapping;    ///< edge-label mapping (sub-kinds) or label-set mapping (gamma)
    bool in_subformulation = false;  ///< SubEdge: false for plain MCF flow
    std::size_t set_index = 0;       ///< gamma: 0-based position in the node's sequence
    std::string scope;               ///< gamma: region tag, empty for rooted orders

    static VariableKey node(const NodeId& i, const NodeId& u);
    static VariableKey allocation(const Resource& r);
    static VariableKey flow(const Edge& request_edge, const Edge& substrate_edge);
    static VariableKey sub_node(const NodeId& i, const NodeId& u, const Edge& request_edge, const LabelMapping& m);
    static VariableKey sub_flow(const Edge& request_edge, const Edge& substrate_edge, const LabelMapping& m);
    static VariableKey gamma(const NodeId& i, const NodeId& u, std::size_t set_index, const LabelMapping& m,
                             const std::string& scope = {});

    /// `y[i@u]`, `a[u.type]`, `a[u->v]`, `z[i->j@u->v]`, `y[i@u|i->j|m]`,
    /// `z[i->j@u->v|m]`, `g[i@u|a|m]` (a 1-based) or `g[i@u|a|m|scope]`.
    std::string str() const;
};

/// One group of γ-variables: the label set ordering of a (sub)graph. Rooted
/// orders use a single scope with an empty tag.
struct GammaScope {
    std::string tag;
    OrientedGraph graph;
    LabelSetOrdering omega;
};

/// Multi-commodity-flow formulation (integrality is never enforced).
LpProgram build_mcf(const Instance& instance, bool relaxed = true);

/// Adapted formulation for an extraction label set ordering. Validates the
/// labels and the ordering first (throws ValidationError).
LpProgram build_adapted(const Instance& instance, const ExtractionOrder& order, const EdgeLabelAssignment& labels,
                        const LabelSetOrdering& omega);

/// Adapted formulation with γ-variables split into scopes (one per root
/// region). Subformulations exist for every edge of @p graph.
LpProgram build_adapted_scoped(const Instance& instance, const OrientedGraph& graph,
                               const EdgeLabelAssignment& labels, const std::vector<GammaScope>& scopes);

/// Assignment for build_mcf induced by a complete convex combination.
Assignment lift_to_mcf(const Instance& instance, const ConvexCombination& d);

/// Assignment for build_adapted induced by a complete convex combination.
Assignment lift_convex_combination(const Instance& instance, const ExtractionOrder& order,
                                   const EdgeLabelAssignment& labels, const LabelSetOrdering& omega,
                                   const ConvexCombination& d);

/// Same for build_adapted_scoped.
Assignment lift_convex_combination_scoped(const Instance& instance, const OrientedGraph& graph,
                                          const EdgeLabelAssignment& labels, const std::vector<GammaScope>& scopes,
                                          const ConvexCombination& d);

/// LP text with sections `Minimize`/`Maximize`, `Subject To`, `Bounds`,
/// `End`; tokens are whitespace separated.
std::string export_lp(const LpProgram& program);

/// Reads the subset of the LP text format written by export_lp.
LpProgram parse_lp(const std::string& text);

struct FeasibilityReport {
    bool feasible = true;
    double max_residual = 0.0;
    std::vector<std::string> violated;
};

FeasibilityReport check_feasible(const LpProgram& program, const Assignment& assignment, double tolerance);

/// Objective value of @p assignment.
double objective_value(const LpProgram& program, const Assignment& assignment);

}  // namespace vnep
