/**
 * @file solver.hpp
 * @brief Bounded primal revised simplex for LpProgram with a small presolve.
 */
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>
#include "vnep/lp.hpp"

namespace vnep {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

std::string to_string(SolveStatus status);

enum class PricingRule {
    Bland,            ///< first improving column; ratio ties to the smallest column
    DantzigFallback,  ///< steepest reduced cost, Bland after a run of degenerate pivots
};

struct SolverOptions {
    PricingRule pricing = PricingRule::Bland;
    double feasibility_tolerance = 1e-9;  ///< primal bound/row slack
    double optimality_tolerance = 1e-8;   ///< reduced-cost threshold
    double verify_tolerance = 1e-7;       ///< final residual check on the original program
    std::size_t max_iterations = 2'000'000;
    bool presolve = true;
};

struct LpSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    double objective = 0.0;
    std::vector<double> values;  ///< indexed like program.variables()
    std::size_t iterations = 0;
    std::string diagnostics;  ///< reason for a non-optimal status

    bool optimal() const { return status == SolveStatus::Optimal; }
    /// Named view of the values (zero entries omitted).
    Assignment assignment(const LpProgram& program) const;
};

/// Solves @p program to optimality. A returned Optimal solution has passed
/// check_feasible on the original program at `verify_tolerance`.
LpSolution solve_lp(const LpProgram& program, const SolverOptions& options = {});

/// {"status", "objective", "iterations", "assignment": {name: value}}.
nlohmann::json solution_to_json(const LpProgram& program, const LpSolution& solution);

}  // namespace vnep
