#include "ror/vi_solver.hpp"

#include "ror/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ror {

Grid Grid::from_model(const SeasonalProfile& profile, const OUParams& ou, int nodes,
                      double padding_sd) {
    if (nodes < 51) throw ConfigError("grid needs at least 51 nodes");
    const double pad = padding_sd * ou.asymptotic_sd();
    Grid g;
    g.x_lo = profile.min_log_mean() - pad;
    g.x_hi = profile.max_log_mean() + pad;
    g.nodes = nodes;
    return g;
}

PayoffTable build_payoff_table(const Grid& grid, const PlantSpec& plant, double price) {
    PayoffTable table;
    table.f.assign(plant.modes(), std::vector<double>(grid.nodes, 0.0));
    for (int j = 0; j < grid.nodes; ++j) {
        const auto f = payoff_vector(std::exp(grid.x(j)), price, plant);
        for (int i = 0; i < plant.modes(); ++i) table.f[i][j] = f[i];
    }
    for (int i = 0; i < plant.modes(); ++i)
        table.exact.push_back(
            [plant, price, i](double q) { return payoff_vector(q, price, plant)[i]; });
    return table;
}

void write_payoff_csv(const Grid& grid, const PayoffTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write payoff CSV '" + path + "'");
    out << "flow";
    for (int i = 0; i < table.modes(); ++i) out << ",mode_" << i;
    out << "\n";
    out.precision(10);
    for (int j = 0; j < grid.nodes; ++j) {
        out << std::exp(grid.x(j));
        for (int i = 0; i < table.modes(); ++i) out << "," << table.f[i][j];
        out << "\n";
    }
}

SolveOptions default_solve_options(double value_scale) {
    const double scale = std::max(std::abs(value_scale), 1.0);
    SolveOptions opts;
    opts.spatial_tol = 1e-8 * scale;
    opts.total_tol = 1e-6 * scale;
    opts.decision_tol = 1e-6 * scale;
    return opts;
}

std::string ConvergenceReport::to_string() const {
    std::ostringstream os;
    os << (converged ? "converged" : "NOT converged") << " after " << outer_iterations
       << " outer iteration(s), " << total_sweeps << " sweeps\n";
    for (std::size_t i = 0; i < outer_errors.size(); ++i)
        os << "  outer " << i + 1 << ": total error " << outer_errors[i] << "\n";
    return os.str();
}

ValueFunction::ValueFunction(Grid grid, int t_begin, int t_end, int modes)
    : grid_(grid), t_begin_(t_begin), t_end_(t_end), modes_(modes) {
    if (t_end <= t_begin) throw ConfigError("value function needs t_end > t_begin");
    u_.assign(static_cast<std::size_t>(levels()) * modes * grid.nodes, 0.0);
}

ValueFunction::ValueFunction(Grid grid, int t_begin, int t_end,
                             std::vector<std::vector<double>> switch_costs,
                             PayoffTable payoffs, double decision_tol)
    : ValueFunction(grid, t_begin, t_end, payoffs.modes()) {
    costs_ = std::move(switch_costs);
    payoffs_ = std::move(payoffs);
    decision_tol_ = decision_tol;
}

double& ValueFunction::at(int mode, int t, int node) {
    const std::size_t level = t - t_begin_;
    return u_[(level * modes_ + mode) * grid_.nodes + node];
}

double ValueFunction::at(int mode, int t, int node) const {
    const std::size_t level = t - t_begin_;
    return u_[(level * modes_ + mode) * grid_.nodes + node];
}

namespace {

double interpolate(const Grid& grid, const double* values, double x) {
    const double pos = (x - grid.x_lo) / grid.dx();
    const double snapped = std::round(pos);
    if (std::abs(pos - snapped) < 1e-9) { // node queries are exact
        const int j = std::clamp(static_cast<int>(snapped), 0, grid.nodes - 1);
        return values[j];
    }
    int j = static_cast<int>(std::floor(pos));
    j = std::clamp(j, 0, grid.nodes - 2);
    const double w = pos - j;
    return values[j] * (1.0 - w) + values[j + 1] * w;
}

} // namespace

double ValueFunction::value_at(int mode, double x, int t, OutOfGrid policy,
                               bool* clamped) const {
    if (mode < 0 || mode >= modes_) throw ConfigError("value_at: bad mode");
    if (t < t_begin_ || t > t_end_)
        throw std::out_of_range("value_at: t=" + std::to_string(t) + " outside [" +
                                std::to_string(t_begin_) + ", " + std::to_string(t_end_) + "]");
    bool outside = x < grid_.x_lo || x > grid_.x_hi;
    if (outside && policy == OutOfGrid::Throw)
        throw std::out_of_range("value_at: x outside the spatial grid");
    if (clamped) *clamped = outside;
    const double xc = std::clamp(x, grid_.x_lo, grid_.x_hi);
    const std::size_t level = t - t_begin_;
    const double* slice = &u_[(level * modes_ + mode) * grid_.nodes];
    return interpolate(grid_, slice, xc);
}

double ValueFunction::payoff_at(int mode, double x) const {
    const double xc = std::clamp(x, grid_.x_lo, grid_.x_hi);
    if (!payoffs_.exact.empty()) return payoffs_.exact[mode](std::exp(xc));
    return interpolate(grid_, payoffs_.f[mode].data(), xc);
}

SwitchDecision ValueFunction::switch_decision(double x, int t, int current_mode) const {
    SwitchDecision decision;
    const double xc = std::clamp(x, grid_.x_lo, grid_.x_hi);
    decision.clamped = xc != x;

    const int i = current_mode;
    const double u_i = value_at(i, xc, t);

    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < modes_; ++j) {
        if (j == i) continue;
        best = std::max(best, value_at(j, xc, t) - costs_[i][j]);
    }
    if (u_i > best + decision_tol_) return decision; // clearly worth staying

    // Candidates within the indifference band; staying competes when the
    // rule holds only up to the band.
    const bool stay_candidate = u_i >= best - decision_tol_;
    int pick = -1;
    double pick_payoff = 0.0;
    if (stay_candidate) {
        pick = i;
        pick_payoff = payoff_at(i, xc);
    }
    for (int j = 0; j < modes_; ++j) {
        if (j == i) continue;
        if (value_at(j, xc, t) - costs_[i][j] < best - decision_tol_) continue;
        const double fj = payoff_at(j, xc);
        if (pick < 0 || fj > pick_payoff || (fj == pick_payoff && j < pick && pick != i)) {
            pick = j;
            pick_payoff = fj;
        }
    }
    if (pick != i) {
        decision.switch_now = true;
        decision.target = pick;
    }
    return decision;
}

void ValueFunction::write_csv(const std::string& path_prefix) const {
    for (int i = 0; i < modes_; ++i) {
        const std::string path = path_prefix + "_mode" + std::to_string(i) + ".csv";
        std::ofstream out(path);
        if (!out) throw DataError("cannot write value CSV '" + path + "'");
        out << "x";
        for (int t = t_begin_; t <= t_end_; ++t) out << ",t" << t;
        out << "\n";
        out.precision(10);
        for (int j = 0; j < grid_.nodes; ++j) {
            out << grid_.x(j);
            for (int t = t_begin_; t <= t_end_; ++t) out << "," << at(i, t, j);
            out << "\n";
        }
    }
}

namespace {

// Stencil of the generator L on the uniform grid: (L u)_j = A_j u_{j-1}
// + B_j u_j + C_j u_{j+1}, B_j = -(A_j + C_j). Centered differencing for
// the drift where the diffusion carries it, one-sided otherwise so the
// off-diagonal weights stay non-negative and the projected Gauss-Seidel
// iteration keeps its M-matrix guarantee.
struct Stencil {
    std::vector<double> a;
    std::vector<double> c;

    void build(const Grid& grid, const DriftSpec& drift, int t) {
        const int n = grid.nodes;
        a.assign(n, 0.0);
        c.assign(n, 0.0);
        const double dx = grid.dx();
        const double diff = 0.5 * drift.diffusion_sq() / (dx * dx);
        for (int j = 1; j + 1 < n; ++j) {
            const double b = drift.drift_log(grid.x(j), t);
            if (std::abs(b) * dx <= drift.diffusion_sq()) {
                a[j] = diff - 0.5 * b / dx;
                c[j] = diff + 0.5 * b / dx;
            } else if (b > 0.0) {
                a[j] = diff;
                c[j] = diff + b / dx;
            } else {
                a[j] = diff - b / dx;
                c[j] = diff;
            }
        }
    }
};

} // namespace

ValueFunction solve(const Grid& grid, const DriftSpec& drift, const PayoffTable& payoffs,
                    const std::vector<std::vector<double>>& switch_costs,
                    const SolveOptions& opts, int t_end, const TerminalCondition& terminal) {
    const int modes = payoffs.modes();
    const int t_begin = drift.start_index();
    const int nodes = grid.nodes;
    if (modes < 1) throw ConfigError("solve: need at least one mode");
    if (switch_costs.size() != static_cast<std::size_t>(modes))
        throw ConfigError("solve: switch cost matrix does not match mode count");
    for (const auto& row : switch_costs)
        if (row.size() != static_cast<std::size_t>(modes))
            throw ConfigError("solve: switch cost matrix does not match mode count");
    if (!terminal.g.empty()) {
        if (terminal.g.size() != static_cast<std::size_t>(modes))
            throw ConfigError("solve: terminal condition does not match mode count");
        for (const auto& row : terminal.g)
            if (row.size() != static_cast<std::size_t>(nodes))
                throw ConfigError("solve: terminal condition does not match the grid");
    }

    ValueFunction vf(grid, t_begin, t_end, modes);
    vf.costs_ = switch_costs;
    vf.payoffs_ = payoffs;
    vf.decision_tol_ = opts.decision_tol;

    const int levels = vf.levels();
    constexpr double dt = 1.0; // days, fixed by the daily decision grid
    const double half_dt = 0.5 * dt;

    // Terminal level.
    for (int i = 0; i < modes; ++i)
        for (int j = 0; j < nodes; ++j)
            vf.at(i, t_end, j) = terminal.g.empty() ? 0.0 : terminal.g[i][j];

    // Initial guess: the terminal values, optionally with the payoff
    // integrated backward (no switching). When any switching cost is zero
    // the obstacle coupling admits inflated common fixed points, so the
    // iteration must start from a certified lower bound to reach the
    // minimal (correct) solution; staying in one mode forever provides it.
    bool free_switching = false;
    for (int i = 0; i < modes; ++i)
        for (int j = 0; j < modes; ++j)
            if (i != j && switch_costs[i][j] <= 0.0) free_switching = true;

    if (free_switching) {
        for (int i = 0; i < modes; ++i) {
            double f_floor = payoffs.f[i][0];
            double g_floor = vf.at(i, t_end, 0);
            for (int j = 0; j < nodes; ++j) {
                f_floor = std::min(f_floor, payoffs.f[i][j]);
                g_floor = std::min(g_floor, vf.at(i, t_end, j));
            }
            for (int n = levels - 2; n >= 0; --n)
                for (int j = 0; j < nodes; ++j)
                    vf.at(i, t_begin + n, j) = g_floor + dt * (levels - 1 - n) * f_floor;
        }
    } else {
        for (int n = levels - 2; n >= 0; --n)
            for (int i = 0; i < modes; ++i)
                for (int j = 0; j < nodes; ++j) {
                    const double accrued = opts.init == SolveOptions::Init::PayoffIntegration
                                               ? dt * (levels - 1 - n) * payoffs.f[i][j]
                                               : 0.0;
                    vf.at(i, t_begin + n, j) = vf.at(i, t_end, j) + accrued;
                }
    }

    Stencil here, next;
    std::vector<double> rhs(static_cast<std::size_t>(modes) * nodes);
    std::vector<double> u_old;
    ConvergenceReport report;

    for (int outer = 1; outer <= opts.max_outer; ++outer) {
        u_old = vf.u_;
        next.build(grid, drift, t_end);

        for (int t = t_end - 1; t >= t_begin; --t) {
            here.build(grid, drift, t);

            // Explicit half step from the level above, plus the payoff.
            for (int i = 0; i < modes; ++i) {
                const double* up = &vf.at(i, t + 1, 0);
                double* r = &rhs[static_cast<std::size_t>(i) * nodes];
                for (int j = 1; j + 1 < nodes; ++j) {
                    const double lu = next.a[j] * up[j - 1] -
                                      (next.a[j] + next.c[j]) * up[j] +
                                      next.c[j] * up[j + 1];
                    r[j] = up[j] + half_dt * lu + dt * payoffs.f[i][j];
                }
            }

            double sweep_error = 0.0;
            int inner = 0;
            do {
                sweep_error = 0.0;
                for (int j = 1; j + 1 < nodes; ++j) {
                    for (int i = 0; i < modes; ++i) {
                        double* ui = &vf.at(i, t, 0);
                        const double diag = 1.0 + half_dt * (here.a[j] + here.c[j]);
                        double y = (rhs[static_cast<std::size_t>(i) * nodes + j] +
                                    half_dt * (here.a[j] * ui[j - 1] + here.c[j] * ui[j + 1])) /
                                   diag;
                        double obstacle = -std::numeric_limits<double>::infinity();
                        for (int o = 0; o < modes; ++o)
                            if (o != i)
                                obstacle = std::max(obstacle,
                                                    vf.at(o, t, j) - switch_costs[i][o]);
                        if (obstacle > y) y = obstacle;
                        sweep_error += std::abs(ui[j] - y);
                        ui[j] = y;
                    }
                }
                // Linear extrapolation at the spatial edges, kept feasible
                // against the switching obstacle.
                for (int i = 0; i < modes; ++i) {
                    double* ui = &vf.at(i, t, 0);
                    ui[0] = 2.0 * ui[1] - ui[2];
                    ui[nodes - 1] = 2.0 * ui[nodes - 2] - ui[nodes - 3];
                }
                for (int i = 0; i < modes; ++i) {
                    double* ui = &vf.at(i, t, 0);
                    for (int edge : {0, nodes - 1}) {
                        double obstacle = -std::numeric_limits<double>::infinity();
                        for (int o = 0; o < modes; ++o)
                            if (o != i)
                                obstacle = std::max(obstacle,
                                                    vf.at(o, t, edge) - switch_costs[i][o]);
                        if (obstacle > ui[edge]) ui[edge] = obstacle;
                    }
                }
                ++inner;
                ++report.total_sweeps;
                if (inner > opts.max_inner) {
                    report.outer_errors.push_back(sweep_error);
                    throw ConvergenceError(
                        "VI solver: spatial iteration stalled at t=" + std::to_string(t) +
                        " (sweep error " + std::to_string(sweep_error) + ")\n" +
                        report.to_string());
                }
            } while (sweep_error > opts.spatial_tol);

            std::swap(here, next); // this level's stencil feeds the next step down
        }

        double total_error = 0.0;
        for (std::size_t idx = 0; idx < vf.u_.size(); ++idx)
            total_error = std::max(total_error, std::abs(vf.u_[idx] - u_old[idx]));

        report.outer_iterations = outer;
        report.outer_errors.push_back(total_error);
        if (total_error <= opts.total_tol) {
            report.converged = true;
            break;
        }
    }

    if (!report.converged)
        throw ConvergenceError("VI solver: no convergence after " +
                               std::to_string(opts.max_outer) + " outer iterations\n" +
                               report.to_string());
    vf.report_ = report;
    return vf;
}

} // namespace ror
