#pragma once

#include <map>
#include <string>
#include <vector>

#include "relo/relocation.hpp"
#include "relo/sim.hpp"

namespace relo::mip {

struct LinTerm {
    int var = 0;
    double coeff = 0.0;
};

struct Affine {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    Affine& add(int var, double coeff) {
        if (coeff != 0.0) terms.push_back({var, coeff});
        return *this;
    }
};

// Objective contribution `expr` when expr < threshold, zero otherwise.
// Kept structural so the exact solver can evaluate it directly and the LP
// export can linearize it with binaries and big-M.
struct PiecewiseTerm {
    Affine expr;
    double threshold = 0.0;
};

enum class Rel { le, eq, ge };

struct Constraint {
    std::string name;
    Affine lhs;
    Rel rel = Rel::le;
    double rhs = 0.0;
};

struct Var {
    std::string name;
    long lb = 0;
    long ub = 0;
    bool integer = true;
};

// Maximization program over bounded integer variables (continuous ones
// only appear in lowered/parsed form and are not handled by solve_exact).
struct IntegerProgram {
    std::vector<Var> vars;
    Affine objective;
    std::vector<PiecewiseTerm> piecewise;
    std::vector<Constraint> constraints;

    int add_var(const std::string& name, long lb, long ub, bool integer = true);
    double eval_objective(std::span<const long> assignment) const;
    bool feasible(std::span<const long> assignment, double tol = 1e-9) const;
};

struct IPSolution {
    enum class Status { optimal, infeasible, budget_exceeded };
    std::vector<long> assignment;
    double objective = 0.0;
    Status status = Status::infeasible;
};

// Depth-first branch and bound in declared variable order, with equality
// propagation and interval bounding (piecewise terms relaxed). Returns the
// proven optimum, or the best incumbent once the budget runs out.
IPSolution solve_exact(const IntegerProgram& ip, double time_budget_ms = 1e12);

// Replaces every piecewise term with a binary switch, a continuous value
// variable, and big-M constraints; pure-linear programs pass through.
IntegerProgram lower_piecewise(const IntegerProgram& ip);

// CPLEX-LP text. Programs with piecewise terms are lowered first.
std::string export_lp(const IntegerProgram& ip);
IntegerProgram parse_lp(const std::string& text);
bool structurally_equal(const IntegerProgram& a, const IntegerProgram& b, double tol = 1e-9);

// --- per-step local models (relocation and transit stages) ---

// Relocation IP at slot t: one variable per (staffed source, destination)
// arc, capacity min(x_v, x_s) per source row, objective = threshold-gated
// imbalance sum minus weighted travel cost.
IntegerProgram build_relocation_ip(const std::vector<double>& U, const demand::TravelTimeTensor& T,
                                   const sim::SimState& st, const policy::RelocParams& p, int t);

// Transit IP at slot t: one variable per (idle-staffed source, destination)
// arc; linear objective U[dest] minus weighted scooter time.
IntegerProgram build_transit_ip(const std::vector<double>& U, const demand::TravelTimeTensor& T,
                                const sim::SimState& st, const policy::RelocParams& p, int t);

// Deterministic full-information model over the whole horizon: decision
// variables u_v/u_r/u_t, state variables linked by flow equalities,
// objective = scored client trip time in hours.
IntegerProgram build_full_model(const demand::Scenario& sc, const demand::TravelTimeTensor& T,
                                int H, long fleet, long staff);

// --- specialized exact search used by the per-step policy ---

struct ArcMove {
    int from = 0;
    int to = 0;
    long count = 0;
};

struct LocalSolveResult {
    std::vector<ArcMove> moves;
    double objective = 0.0;  // f_r value including the constant indicator sum
    bool proven = true;
};

// Exact unit-based search for the relocation stage objective; equivalent
// to solve_exact on build_relocation_ip but fast at fleet scale. Arc order
// and tie handling are deterministic.
LocalSolveResult solve_local_relocation(const std::vector<double>& U,
                                        const demand::TravelTimeTensor& T,
                                        const std::vector<long>& caps,
                                        const policy::RelocParams& p, int t,
                                        double time_budget_ms);

// Per-step policy that replaces both greedy passes with local exact
// optimization (transit stage solves in closed form, the objective being
// linear with independent row capacities).
class LocalMipPolicy : public sim::Policy {
public:
    LocalMipPolicy(policy::RelocParams params, policy::PredictorSet predictors,
                   double solve_budget_ms = 50.0);

    std::string id() const override { return "local-mip"; }
    void begin_scenario(const sim::SimInputs& in, const demand::Scenario& sc) override;
    void decide(sim::SimState& state, sim::DecisionLog& log, int t) override;
    bool budget_exceeded() const override { return budget_exceeded_; }

private:
    policy::RelocParams params_;
    policy::PredictorSet pred_;
    double solve_budget_ms_;
    const demand::TravelTimeTensor* travel_ = nullptr;
    bool budget_exceeded_ = false;
    std::vector<double> x_obs_;
};

}  // namespace relo::mip
