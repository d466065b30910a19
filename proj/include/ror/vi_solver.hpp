#pragma once

#include "ror/dynamics.hpp"
#include "ror/plant.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ror {

/// Uniform log-flow grid x_0..x_J.
struct Grid {
    double x_lo = 0.0;
    double x_hi = 1.0;
    int nodes = 161; // J + 1

    double dx() const { return (x_hi - x_lo) / (nodes - 1); }
    double x(int j) const { return x_lo + j * dx(); }

    /// Covers the seasonal log-mean widened by padding_sd asymptotic
    /// standard deviations of the residual process.
    static Grid from_model(const SeasonalProfile& profile, const OUParams& ou,
                           int nodes = 161, double padding_sd = 5.0);
};

/// Per-mode running payoff sampled on the grid, m.u./day. The optional
/// exact evaluators (flow -> m.u./day) resolve decision ties without the
/// interpolation smear around payoff discontinuities; the solver itself
/// only reads the sampled values.
struct PayoffTable {
    std::vector<std::vector<double>> f; // [mode][node]
    std::vector<std::function<double(double)>> exact;

    int modes() const { return static_cast<int>(f.size()); }
};

PayoffTable build_payoff_table(const Grid& grid, const PlantSpec& plant, double price);
void write_payoff_csv(const Grid& grid, const PayoffTable& table, const std::string& path);

/// Values at the final time level, one vector per mode. Zero by default.
struct TerminalCondition {
    std::vector<std::vector<double>> g; // [mode][node]; empty = all zero
};

struct SolveOptions {
    double spatial_tol = 1e-2;  // m.u., L1 over one sweep's updates
    double total_tol = 1.0;     // m.u., max-norm between outer iterations
    int max_outer = 200;
    int max_inner = 20000;
    double decision_tol = 1.0;  // m.u., indifference band for switch_decision

    // Starting guess for the outer iteration. The fixed point does not
    // depend on it; PayoffIntegration just gets there faster.
    enum class Init { PayoffIntegration, TerminalOnly };
    Init init = Init::PayoffIntegration;
};

/// Tolerances scaled to the value magnitude (typically the capacity
/// benchmark D): spatial 1e-8 scale, total and decision 1e-6 scale.
SolveOptions default_solve_options(double value_scale);

struct ConvergenceReport {
    bool converged = false;
    int outer_iterations = 0;
    long total_sweeps = 0;
    std::vector<double> outer_errors;

    std::string to_string() const;
};

class ValueFunction; // below

struct SwitchDecision {
    bool switch_now = false;
    int target = 0;    // mode to move to; valid only when switch_now
    bool clamped = false; // x fell outside the grid and was clamped
};

/// Value functions u_i(x, t) for t = t_begin..t_end on the grid, plus the
/// data needed to evaluate the switching rule (costs, payoffs, tolerance).
class ValueFunction {
public:
    ValueFunction(Grid grid, int t_begin, int t_end, int modes);
    ValueFunction(Grid grid, int t_begin, int t_end,
                  std::vector<std::vector<double>> switch_costs, PayoffTable payoffs,
                  double decision_tol);

    const Grid& grid() const { return grid_; }
    int t_begin() const { return t_begin_; }
    int t_end() const { return t_end_; }
    int modes() const { return modes_; }
    int levels() const { return t_end_ - t_begin_ + 1; }

    double& at(int mode, int t, int node);
    double at(int mode, int t, int node) const;

    enum class OutOfGrid { Throw, Clamp };

    /// Piecewise-linear in x, exact at the nodes. t must be a grid time.
    double value_at(int mode, double x, int t, OutOfGrid policy = OutOfGrid::Throw,
                    bool* clamped = nullptr) const;

    /// Interpolated running payoff, used to resolve value ties.
    double payoff_at(int mode, double x) const;

    /// The switching rule: leave mode i when u_i <= max_j (u_j - c_ij);
    /// the target maximizes u_j - c_ij. Values within decision_tol of each
    /// other count as ties and resolve by running payoff (staying wins
    /// payoff ties), then by lowest mode index.
    SwitchDecision switch_decision(double x, int t, int current_mode) const;

    const ConvergenceReport& report() const { return report_; }
    const std::vector<std::vector<double>>& switch_costs() const { return costs_; }
    const PayoffTable& payoffs() const { return payoffs_; }
    double decision_tol() const { return decision_tol_; }

    /// One CSV per mode (rows = x nodes, columns = time levels).
    void write_csv(const std::string& path_prefix) const;

private:
    friend ValueFunction solve(const Grid&, const DriftSpec&, const PayoffTable&,
                               const std::vector<std::vector<double>>&,
                               const SolveOptions&, int, const TerminalCondition&);

    Grid grid_;
    int t_begin_ = 0;
    int t_end_ = 0;
    int modes_ = 1;
    std::vector<double> u_; // [(level * modes + mode) * nodes + node]
    std::vector<std::vector<double>> costs_;
    PayoffTable payoffs_;
    double decision_tol_ = 0.0;
    ConvergenceReport report_;
};

/// Solves the obstacle-coupled backward system on [t_begin, t_end] with
/// the iterative projected Crank-Nicolson scheme: per time level, repeated
/// Gauss-Seidel passes apply the implicit half-step node by node, project
/// each value onto its switching obstacle, and linearly extrapolate the
/// two edge nodes, until the summed update falls below spatial_tol; whole
/// backward sweeps repeat until the solution stops moving (total_tol).
/// t_begin is drift.start_index(). Throws ConvergenceError with the
/// residual trace when an iteration budget is exhausted.
ValueFunction solve(const Grid& grid, const DriftSpec& drift, const PayoffTable& payoffs,
                    const std::vector<std::vector<double>>& switch_costs,
                    const SolveOptions& opts, int t_end = 365,
                    const TerminalCondition& terminal = {});

} // namespace ror
