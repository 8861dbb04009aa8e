/**
 * @file solver.cpp
 * @brief Presolve plus a two-phase bounded revised simplex. The basis is kept
 *        as a sparse LU factorization with product-form updates and is
 *        refactored periodically.
 */
#include "vnep/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <limits>

#include "vnep/error.hpp"

namespace vnep {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration_limit";
        case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

Assignment LpSolution::assignment(const LpProgram& program) const {
    Assignment out;
    for (std::size_t v = 0; v < values.size(); ++v)
        if (values[v] != 0.0) out.emplace(program.variables()[v].name, values[v]);
    return out;
}

nlohmann::json solution_to_json(const LpProgram& program, const LpSolution& solution) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [name, value] : solution.assignment(program)) values[name] = value;
    nlohmann::json out{{"status", to_string(solution.status)},
                       {"objective", solution.objective},
                       {"iterations", solution.iterations},
                       {"assignment", values}};
    if (!solution.diagnostics.empty()) out["diagnostics"] = solution.diagnostics;
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SparseColumn {
    std::vector<int> rows;
    std::vector<double> values;
};

/// Elimination of x through an equality row: x = offset + slope · y.
struct Substitution {
    std::size_t eliminated = 0;
    std::size_t kept = 0;
    double offset = 0.0;
    double slope = 0.0;
};

/// Program after presolve: fixed variables and singleton/empty rows are
/// removed and doubleton equalities are aggregated.
struct Reduced {
    std::vector<std::size_t> original;  ///< reduced column → original variable
    std::vector<SparseColumn> columns;
    std::vector<double> lower, upper, cost;
    std::vector<Relation> relation;
    std::vector<double> rhs;
    std::vector<double> fixed;                ///< values of variables fixed by presolve
    std::vector<Substitution> substitutions;  ///< in elimination order
    bool infeasible = false;
    std::string reason;

    /// Original variable values from the reduced solution.
    std::vector<double> postsolve(const std::vector<double>& reduced) const {
        std::vector<double> values = fixed;
        for (std::size_t k = 0; k < reduced.size(); ++k) values[original[k]] = reduced[k];
        for (auto it = substitutions.rbegin(); it != substitutions.rend(); ++it)
            values[it->eliminated] = it->offset + it->slope * values[it->kept];
        return values;
    }
};

/// Mutable row-wise copy of a program used by presolve.
class PresolveModel {
public:
    PresolveModel(const LpProgram& p, double tol) : tol_(tol) {
        const std::size_t n = p.variables().size();
        const std::size_t m = p.constraints().size();
        lo_.resize(n);
        hi_.resize(n);
        cost_.assign(n, 0.0);
        state_.assign(n, Var::Active);
        fixed_value_.assign(n, 0.0);
        cols_.resize(n);
        for (std::size_t v = 0; v < n; ++v) {
            lo_[v] = p.variables()[v].lower;
            hi_[v] = p.variables()[v].upper;
            if (lo_[v] > hi_[v] + tol) fail("empty bound interval for " + p.variables()[v].name);
            hi_[v] = std::max(hi_[v], lo_[v]);
        }
        const double sign = p.sense() == Sense::Minimize ? 1.0 : -1.0;
        for (const auto& t : p.objective()) cost_[t.var] += sign * t.coef;
        rows_.resize(m);
        rhs_.resize(m);
        relation_.resize(m);
        names_.resize(m);
        active_.assign(m, true);
        for (std::size_t r = 0; r < m; ++r) {
            const auto& c = p.constraints()[r];
            for (const auto& t : c.terms) rows_[r][t.var] += t.coef;
            for (const auto& [v, coef] : rows_[r]) cols_[v].insert(r);
            rhs_[r] = c.rhs;
            relation_[r] = c.relation;
            names_[r] = c.name;
        }
        variable_names_.reserve(n);
        for (const auto& v : p.variables()) variable_names_.push_back(v.name);
    }

    void run() {
        std::vector<bool> queued(rows_.size(), true);
        std::deque<std::size_t> queue;
        for (std::size_t r = 0; r < rows_.size(); ++r) queue.push_back(r);
        enqueue_ = [&](std::size_t r) {
            if (active_[r] && !queued[r]) {
                queued[r] = true;
                queue.push_back(r);
            }
        };
        for (std::size_t v = 0; v < lo_.size() && !infeasible_; ++v)
            if (lo_[v] == hi_[v]) fix(v, lo_[v]);
        while (!queue.empty() && !infeasible_) {
            const std::size_t r = queue.front();
            queue.pop_front();
            queued[r] = false;
            if (active_[r]) process_row(r);
        }
        if (infeasible_) return;
        // Columns without active rows go to their cheapest finite bound.
        for (std::size_t v = 0; v < lo_.size(); ++v) {
            if (state_[v] != Var::Active || !cols_[v].empty()) continue;
            double target = cost_[v] > 0 ? lo_[v] : cost_[v] < 0 ? hi_[v] : (std::isfinite(lo_[v]) ? lo_[v] : hi_[v]);
            if (!std::isfinite(target)) target = cost_[v] == 0.0 ? 0.0 : target;
            if (std::isfinite(target)) {
                state_[v] = Var::Fixed;
                fixed_value_[v] = target;
            }
        }
    }

    Reduced result() const {
        Reduced out;
        if (infeasible_) {
            out.infeasible = true;
            out.reason = reason_;
            return out;
        }
        const std::size_t n = lo_.size();
        out.fixed.assign(n, 0.0);
        std::vector<int> reduced_index(n, -1);
        for (std::size_t v = 0; v < n; ++v) {
            if (state_[v] == Var::Fixed) out.fixed[v] = fixed_value_[v];
            if (state_[v] != Var::Active) continue;
            reduced_index[v] = static_cast<int>(out.original.size());
            out.original.push_back(v);
            out.lower.push_back(lo_[v]);
            out.upper.push_back(hi_[v]);
            out.cost.push_back(cost_[v]);
        }
        out.columns.resize(out.original.size());
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (!active_[r]) continue;
            const int row = static_cast<int>(out.rhs.size());
            for (const auto& [v, coef] : rows_[r]) {
                auto& col = out.columns[reduced_index[v]];
                col.rows.push_back(row);
                col.values.push_back(coef);
            }
            out.rhs.push_back(rhs_[r]);
            out.relation.push_back(relation_[r]);
        }
        out.substitutions = substitutions_;
        return out;
    }

private:
    enum class Var { Active, Fixed, Substituted };

    void fail(std::string reason) {
        if (!infeasible_) reason_ = std::move(reason);
        infeasible_ = true;
    }

    void deactivate(std::size_t r) {
        active_[r] = false;
        for (const auto& [v, coef] : rows_[r]) cols_[v].erase(r);
    }

    /// Fixes @p v and moves its contribution into the right-hand sides.
    void fix(std::size_t v, double value) {
        state_[v] = Var::Fixed;
        fixed_value_[v] = value;
        lo_[v] = hi_[v] = value;
        for (auto r : cols_[v]) {
            rhs_[r] -= rows_[r].at(v) * value;
            rows_[r].erase(v);
            enqueue_(r);
        }
        cols_[v].clear();
    }

    /// Intersects the bounds of @p v with [lo, hi]; fixes it if they meet.
    void tighten(std::size_t v, double lo, double hi, const std::string& why) {
        double new_lo = std::max(lo_[v], lo);
        double new_hi = std::min(hi_[v], hi);
        const double scale = 1.0 + std::max(std::isfinite(new_lo) ? std::abs(new_lo) : 0.0,
                                             std::isfinite(new_hi) ? std::abs(new_hi) : 0.0);
        if (new_lo > new_hi + tol_ * scale) {
            fail(why + " conflicts with the bounds of " + variable_names_[v]);
            return;
        }
        if (new_lo >= new_hi - tol_ * scale) {
            const double value = std::clamp(std::isfinite(new_lo) ? new_lo : new_hi, lo_[v], hi_[v]);
            fix(v, value);
            return;
        }
        lo_[v] = new_lo;
        hi_[v] = new_hi;
    }

    void process_row(std::size_t r) {
        auto& row = rows_[r];
        if (row.empty()) {
            const double scale = 1.0 + std::abs(rhs_[r]);
            const bool ok = relation_[r] == Relation::Equal       ? std::abs(rhs_[r]) <= tol_ * scale
                            : relation_[r] == Relation::LessEqual ? rhs_[r] >= -tol_ * scale
                                                                  : rhs_[r] <= tol_ * scale;
            if (!ok) fail("row " + names_[r] + " cannot be satisfied");
            active_[r] = false;
            return;
        }
        if (row.size() == 1) {
            const auto [v, coef] = *row.begin();
            const double value = rhs_[r] / coef;
            const bool upper_side = (relation_[r] == Relation::LessEqual) == (coef > 0);
            deactivate(r);
            if (relation_[r] == Relation::Equal)
                tighten(v, value, value, "row " + names_[r]);
            else if (upper_side)
                tighten(v, -kInf, value, "row " + names_[r]);
            else
                tighten(v, value, kInf, "row " + names_[r]);
            return;
        }
        if (row.size() == 2 && relation_[r] == Relation::Equal) aggregate(r);
    }

    /// a·x + b·y = c: eliminates x (the larger coefficient) via x = c/a − (b/a)·y.
    void aggregate(std::size_t r) {
        auto it = rows_[r].begin();
        std::size_t x = it->first;
        double a = it->second;
        ++it;
        std::size_t y = it->first;
        double b = it->second;
        if (std::abs(b) > std::abs(a)) {
            std::swap(x, y);
            std::swap(a, b);
        }
        const double offset = rhs_[r] / a;
        const double slope = -b / a;
        deactivate(r);
        // Bounds of x become bounds of y.
        double ylo = -kInf;
        double yhi = kInf;
        if (slope > 0) {
            if (std::isfinite(lo_[x])) ylo = (lo_[x] - offset) / slope;
            if (std::isfinite(hi_[x])) yhi = (hi_[x] - offset) / slope;
        } else {
            if (std::isfinite(hi_[x])) ylo = (hi_[x] - offset) / slope;
            if (std::isfinite(lo_[x])) yhi = (lo_[x] - offset) / slope;
        }
        cost_[y] += cost_[x] * slope;
        for (auto other : cols_[x]) {
            auto& row = rows_[other];
            const double coef = row.at(x);
            row.erase(x);
            rhs_[other] -= coef * offset;
            double& merged = row[y];
            merged += coef * slope;
            if (std::abs(merged) <= 1e-14) {
                row.erase(y);
                cols_[y].erase(other);
            } else {
                cols_[y].insert(other);
            }
            enqueue_(other);
        }
        cols_[x].clear();
        state_[x] = Var::Substituted;
        substitutions_.push_back({x, y, offset, slope});
        tighten(y, ylo, yhi, "aggregation of " + variable_names_[x]);
    }

    double tol_;
    std::vector<double> lo_, hi_, cost_, fixed_value_;
    std::vector<Var> state_;
    std::vector<std::map<std::size_t, double>> rows_;
    std::vector<std::set<std::size_t>> cols_;
    std::vector<double> rhs_;
    std::vector<Relation> relation_;
    std::vector<std::string> names_;
    std::vector<std::string> variable_names_;
    std::vector<bool> active_;
    std::vector<Substitution> substitutions_;
    std::function<void(std::size_t)> enqueue_ = [](std::size_t) {};
    bool infeasible_ = false;
    std::string reason_;
};

Reduced presolve(const LpProgram& p, bool enabled, double tol) {
    PresolveModel model(p, tol);
    if (enabled) model.run();
    return model.result();
}


/// Sparse LU factorization of a basis plus product-form eta updates.
class BasisFactor {
public:
    /// Factors the basis whose r-th column is @p columns[head[r]].
    bool factor(const std::vector<SparseColumn>& columns, const std::vector<std::size_t>& head, std::size_t m) {
        etas_.clear();
        m_ = m;
        if (m == 0) return true;
        std::vector<Eigen::Triplet<double>> entries;
        for (std::size_t r = 0; r < m; ++r) {
            const auto& c = columns[head[r]];
            for (std::size_t k = 0; k < c.rows.size(); ++k)
                entries.emplace_back(c.rows[k], static_cast<int>(r), c.values[k]);
        }
        Eigen::SparseMatrix<double> basis(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        basis.setFromTriplets(entries.begin(), entries.end());
        basis.makeCompressed();
        lu_.analyzePattern(basis);
        lu_.factorize(basis);
        return lu_.info() == Eigen::Success;
    }

    /// B⁻¹ a.
    Eigen::VectorXd ftran(const Eigen::VectorXd& a) const {
        if (m_ == 0) return a;
        Eigen::VectorXd x = lu_.solve(a);
        for (const auto& eta : etas_) {
            const double xr = x(eta.row) / eta.pivot;
            if (xr != 0.0)
                for (std::size_t k = 0; k < eta.rows.size(); ++k) x(eta.rows[k]) -= eta.values[k] * xr;
            x(eta.row) = xr;
        }
        return x;
    }

    /// B⁻ᵀ c.
    Eigen::VectorXd btran(Eigen::VectorXd c) {
        if (m_ == 0) return c;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = c(it->row);
            for (std::size_t k = 0; k < it->rows.size(); ++k) s -= it->values[k] * c(it->rows[k]);
            c(it->row) = s / it->pivot;
        }
        return lu_.transpose().solve(c);
    }

    /// Records the replacement of basis position @p row by a column whose
    /// representation in the current basis is @p alpha.
    void update(std::size_t row, const Eigen::VectorXd& alpha) {
        Eta eta;
        eta.row = static_cast<Eigen::Index>(row);
        eta.pivot = alpha(eta.row);
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
            if (i != eta.row && alpha(i) != 0.0) {
                eta.rows.push_back(i);
                eta.values.push_back(alpha(i));
            }
        etas_.push_back(std::move(eta));
    }

    std::size_t updates() const { return etas_.size(); }

private:
    struct Eta {
        Eigen::Index row = 0;
        double pivot = 1.0;
        std::vector<Eigen::Index> rows;
        std::vector<double> values;
    };

    std::size_t m_ = 0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;
};

enum class State { Basic, AtLower, AtUpper, FreeZero };

/// Product-form updates applied before the basis is factored afresh.
constexpr std::size_t kRefactorInterval = 64;

/// Two-phase bounded primal simplex on A x + s = b with logical columns s.
class Simplex {
public:
    Simplex(const Reduced& red, const SolverOptions& opt) : opt_(opt), m_(red.rhs.size()) {
        ns_ = red.columns.size();
        columns_ = red.columns;
        lower_ = red.lower;
        upper_ = red.upper;
        real_cost_ = red.cost;
        rhs_ = Eigen::Map<const Eigen::VectorXd>(red.rhs.data(), static_cast<Eigen::Index>(m_));
        // Logical column per row.
        for (std::size_t i = 0; i < m_; ++i) {
            columns_.push_back({{static_cast<int>(i)}, {1.0}});
            switch (red.relation[i]) {
                case Relation::Equal: lower_.push_back(0.0); upper_.push_back(0.0); break;
                case Relation::LessEqual: lower_.push_back(0.0); upper_.push_back(kInf); break;
                case Relation::GreaterEqual: lower_.push_back(-kInf); upper_.push_back(0.0); break;
            }
            real_cost_.push_back(0.0);
        }
    }

    SolveStatus run(std::string& diagnostics) {
        if (!initialise()) {
            diagnostics = "initial basis could not be factored";
            return SolveStatus::NumericalFailure;
        }
        SolveStatus s = iterate(true);
        if (s != SolveStatus::Optimal) {
            diagnostics = "phase one stopped: " + to_string(s);
            return s == SolveStatus::Unbounded ? SolveStatus::NumericalFailure : s;
        }
        double infeasibility = 0.0;
        for (std::size_t j = first_artificial_; j < columns_.size(); ++j) infeasibility += x_[j];
        if (infeasibility > opt_.feasibility_tolerance * (1.0 + rhs_.lpNorm<Eigen::Infinity>()) *
                                std::max<std::size_t>(1, m_)) {
            diagnostics = "phase one infeasibility " + std::to_string(infeasibility);
            return SolveStatus::Infeasible;
        }
        for (std::size_t j = first_artificial_; j < columns_.size(); ++j) {
            upper_[j] = 0.0;
            if (state_[j] != State::Basic) {
                x_[j] = 0.0;
                state_[j] = State::AtLower;
            }
        }
        cost_ = real_cost_;
        cost_.resize(columns_.size(), 0.0);
        if (!refresh()) {
            diagnostics = "basis became singular";
            return SolveStatus::NumericalFailure;
        }
        s = iterate(false);
        if (s != SolveStatus::Optimal) diagnostics = "phase two stopped: " + to_string(s);
        return s;
    }

    std::vector<double> structural_values() const {
        std::vector<double> out(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(ns_));
        for (std::size_t j = 0; j < ns_; ++j) out[j] = std::clamp(out[j], lower_[j], upper_[j]);
        return out;
    }

    std::size_t iterations() const { return iterations_; }

private:
    bool initialise() {
        const std::size_t nl = ns_ + m_;
        x_.assign(nl, 0.0);
        state_.assign(nl, State::AtLower);
        for (std::size_t j = 0; j < ns_; ++j) place_at_bound(j);
        Eigen::VectorXd residual = rhs_;
        for (std::size_t j = 0; j < ns_; ++j)
            if (x_[j] != 0.0) axpy(-x_[j], j, residual);
        head_.assign(m_, 0);
        first_artificial_ = nl;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t logical = ns_ + i;
            const double v = residual(static_cast<Eigen::Index>(i));
            if (v >= lower_[logical] && v <= upper_[logical]) {
                x_[logical] = v;
                state_[logical] = State::Basic;
                head_[i] = logical;
                continue;
            }
            place_at_bound(logical);
            if (state_[logical] == State::FreeZero) x_[logical] = 0.0;
            const double gap = v - x_[logical];
            const double s = gap >= 0 ? 1.0 : -1.0;
            columns_.push_back({{static_cast<int>(i)}, {s}});
            lower_.push_back(0.0);
            upper_.push_back(kInf);
            x_.push_back(std::abs(gap));
            state_.push_back(State::Basic);
            head_[i] = columns_.size() - 1;
        }
        cost_.assign(columns_.size(), 0.0);
        for (std::size_t j = first_artificial_; j < columns_.size(); ++j) cost_[j] = 1.0;
        if (!basis_.factor(columns_, head_, m_)) return false;
        compute_duals();
        return true;
    }

    void place_at_bound(std::size_t j) {
        if (std::isfinite(lower_[j])) {
            x_[j] = lower_[j];
            state_[j] = State::AtLower;
        } else if (std::isfinite(upper_[j])) {
            x_[j] = upper_[j];
            state_[j] = State::AtUpper;
        } else {
            x_[j] = 0.0;
            state_[j] = State::FreeZero;
        }
    }

    void axpy(double a, std::size_t j, Eigen::VectorXd& v) const {
        const auto& c = columns_[j];
        for (std::size_t k = 0; k < c.rows.size(); ++k) v(c.rows[k]) += a * c.values[k];
    }

    double dot_dual(std::size_t j) const {
        const auto& c = columns_[j];
        double s = 0.0;
        for (std::size_t k = 0; k < c.rows.size(); ++k) s += dual_(c.rows[k]) * c.values[k];
        return s;
    }

    void compute_duals() {
        Eigen::VectorXd basic_cost(static_cast<Eigen::Index>(m_));
        for (std::size_t r = 0; r < m_; ++r) basic_cost(static_cast<Eigen::Index>(r)) = cost_[head_[r]];
        dual_ = basis_.btran(std::move(basic_cost));
    }

    /// Refactors the basis and recomputes basic values and duals from the
    /// nonbasic values. False if the basis is singular.
    bool refresh() {
        if (!basis_.factor(columns_, head_, m_)) return false;
        Eigen::VectorXd residual = rhs_;
        for (std::size_t j = 0; j < columns_.size(); ++j)
            if (state_[j] != State::Basic && x_[j] != 0.0) axpy(-x_[j], j, residual);
        const Eigen::VectorXd xb = basis_.ftran(residual);
        for (std::size_t r = 0; r < m_; ++r) x_[head_[r]] = xb(static_cast<Eigen::Index>(r));
        compute_duals();
        return true;
    }

    bool eligible(std::size_t j, double d) const {
        if (state_[j] == State::Basic || lower_[j] == upper_[j]) return false;
        const double tol = opt_.optimality_tolerance;
        switch (state_[j]) {
            case State::AtLower: return d < -tol;
            case State::AtUpper: return d > tol;
            case State::FreeZero: return std::abs(d) > tol;
            default: return false;
        }
    }

    SolveStatus iterate(bool phase_one) {
        const std::size_t n = columns_.size();
        std::size_t degenerate_run = 0;
        bool bland = opt_.pricing == PricingRule::Bland;
        std::size_t since_refresh = 0;
        while (true) {
            if (iterations_ >= opt_.max_iterations) return SolveStatus::IterationLimit;
            if (basis_.updates() >= kRefactorInterval) {
                if (!refresh()) return SolveStatus::NumericalFailure;
                since_refresh = 0;
            }
            // Pricing.
            std::size_t q = n;
            double dq = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (state_[j] == State::Basic || lower_[j] == upper_[j]) continue;
                const double d = cost_[j] - dot_dual(j);
                if (!eligible(j, d)) continue;
                if (bland) {
                    q = j;
                    dq = d;
                    break;
                }
                if (q == n || std::abs(d) > std::abs(dq)) {
                    q = j;
                    dq = d;
                }
            }
            if (q == n) {
                // Confirm optimality on fresh data before stopping.
                if (since_refresh != 0) {
                    if (!refresh()) return SolveStatus::NumericalFailure;
                    since_refresh = 0;
                    continue;
                }
                return SolveStatus::Optimal;
            }
            const double dir = dq < 0 ? 1.0 : -1.0;

            // Column of the entering variable in the current basis.
            Eigen::VectorXd entering = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
            axpy(1.0, q, entering);
            const Eigen::VectorXd alpha = basis_.ftran(entering);

            // Ratio test; the entering variable's own range competes as a bound flip.
            const double pivot_tol = 1e-9;
            double best = upper_[q] - lower_[q];
            std::size_t leave = m_;  // m_ means bound flip
            double leave_alpha = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = alpha(static_cast<Eigen::Index>(r));
                if (std::abs(a) <= pivot_tol) continue;
                const std::size_t j = head_[r];
                const double rate = -dir * a;  // change of x_j per unit step
                double limit;
                if (rate < 0) {
                    if (!std::isfinite(lower_[j])) continue;
                    limit = std::max(0.0, x_[j] - lower_[j]) / -rate;
                } else {
                    if (!std::isfinite(upper_[j])) continue;
                    limit = std::max(0.0, upper_[j] - x_[j]) / rate;
                }
                const double tie = std::isfinite(best) ? 1e-12 * (1.0 + std::abs(best)) : 0.0;
                bool take = false;
                if (limit < best - tie)
                    take = true;
                else if (limit <= best + tie) {
                    if (leave == m_)
                        take = false;  // prefer the bound flip on ties
                    else if (bland)
                        take = j < head_[leave];
                    else
                        take = std::abs(a) > std::abs(leave_alpha);
                }
                if (take) {
                    best = std::min(best, limit);
                    leave = r;
                    leave_alpha = a;
                }
            }
            if (!std::isfinite(best)) return phase_one ? SolveStatus::NumericalFailure : SolveStatus::Unbounded;
            ++iterations_;
            ++since_refresh;

            const double step = best;
            if (step > opt_.feasibility_tolerance) {
                degenerate_run = 0;
                if (opt_.pricing == PricingRule::DantzigFallback) bland = false;
            } else if (++degenerate_run > 50 && opt_.pricing == PricingRule::DantzigFallback) {
                bland = true;
            }
            // Move along the edge.
            if (step != 0.0) {
                x_[q] += dir * step;
                for (std::size_t r = 0; r < m_; ++r) x_[head_[r]] -= dir * step * alpha(static_cast<Eigen::Index>(r));
            }
            if (leave == m_) {
                state_[q] = dir > 0 ? State::AtUpper : State::AtLower;
                x_[q] = dir > 0 ? upper_[q] : lower_[q];
                continue;
            }
            // Basis change.
            const std::size_t out = head_[leave];
            const double rate = -dir * leave_alpha;
            if (rate < 0) {
                x_[out] = lower_[out];
                state_[out] = State::AtLower;
            } else {
                x_[out] = upper_[out];
                state_[out] = State::AtUpper;
            }
            state_[q] = State::Basic;
            head_[leave] = q;
            basis_.update(leave, alpha);
            compute_duals();
        }
    }

    const SolverOptions& opt_;
    std::size_t m_;
    std::size_t ns_ = 0;
    std::size_t first_artificial_ = 0;
    std::vector<SparseColumn> columns_;
    std::vector<double> lower_, upper_, real_cost_, cost_, x_;
    std::vector<State> state_;
    std::vector<std::size_t> head_;
    Eigen::VectorXd rhs_;
    BasisFactor basis_;
    Eigen::VectorXd dual_;
    std::size_t iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProgram& program, const SolverOptions& options) {
    LpSolution sol;
    const Reduced red = presolve(program, options.presolve, options.feasibility_tolerance);
    if (red.infeasible) {
        sol.status = SolveStatus::Infeasible;
        sol.diagnostics = "presolve: " + red.reason;
        return sol;
    }
    Simplex simplex(red, options);
    sol.status = simplex.run(sol.diagnostics);
    sol.iterations = simplex.iterations();
    if (sol.status != SolveStatus::Optimal) return sol;

    sol.values = red.postsolve(simplex.structural_values());
    for (auto& v : sol.values)
        if (std::abs(v) < 1e-13) v = 0.0;
    for (const auto& t : program.objective()) sol.objective += t.coef * sol.values[t.var];

    const auto check = check_feasible(program, sol.assignment(program), options.verify_tolerance);
    if (!check.feasible) {
        sol.status = SolveStatus::NumericalFailure;
        sol.diagnostics = "solution fails verification: max residual " + std::to_string(check.max_residual) +
                          (check.violated.empty() ? std::string() : " at " + check.violated.front());
    }
    return sol;
}

}  // namespace vnep
