#include "hkrig/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace hkrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Counts evaluations and folds every non-finite value into +inf.
class CountedObjective {
public:
    explicit CountedObjective(const Objective& f) : f_(f) {}

    double operator()(const Eigen::VectorXd& x) {
        ++count_;
        const double v = f_(x);
        return std::isfinite(v) ? v : kInf;
    }

    std::size_t count() const { return count_; }

private:
    const Objective& f_;
    std::size_t count_ = 0;
};

void check_bounds(const Bounds& b) {
    if (b.lo.size() != b.hi.size() || b.lo.size() == 0) throw Error(ErrorKind::Shape, "malformed optimization bounds");
    for (Eigen::Index q = 0; q < b.dim(); ++q) {
        if (!(b.lo[q] < b.hi[q])) throw Error(ErrorKind::InvalidInput, "lower bound must be below upper bound");
    }
}

int population_size(const OptimizerSpec& spec, Eigen::Index dim) {
    if (spec.population > 0) return spec.population;
    return std::max(20, static_cast<int>(10 * dim));
}

Eigen::VectorXd uniform_point(const Bounds& b, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd x(b.dim());
    for (Eigen::Index q = 0; q < b.dim(); ++q) x[q] = b.lo[q] + u(rng) * (b.hi[q] - b.lo[q]);
    return x;
}

/// Tracks relative stagnation of a best-so-far sequence.
class StallMonitor {
public:
    StallMonitor(double tol, int patience) : tol_(tol), patience_(patience) {}

    /// Returns true once `patience` consecutive updates brought no relative
    /// improvement larger than tol.
    bool update(double best) {
        const double scale = std::max(std::abs(mark_), 1e-12);
        if (!std::isfinite(mark_) || mark_ - best > tol_ * scale) {
            mark_ = best;
            stalled_ = 0;
        } else {
            ++stalled_;
        }
        return stalled_ >= patience_;
    }

private:
    double tol_;
    int patience_;
    double mark_ = kInf;
    int stalled_ = 0;
};

Eigen::VectorXd fd_gradient(CountedObjective& f, const Bounds& b, const Eigen::VectorXd& x, double fx, double h) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index q = 0; q < x.size(); ++q) {
        Eigen::VectorXd xp = x, xm = x;
        const bool up_ok = x[q] + h <= b.hi[q];
        const bool down_ok = x[q] - h >= b.lo[q];
        xp[q] = x[q] + h;
        xm[q] = x[q] - h;
        const double fp = up_ok ? f(xp) : kInf;
        const double fm = down_ok ? f(xm) : kInf;
        if (std::isfinite(fp) && std::isfinite(fm)) {
            g[q] = (fp - fm) / (2.0 * h);
        } else if (std::isfinite(fp)) {
            g[q] = (fp - fx) / h;
        } else if (std::isfinite(fm)) {
            g[q] = (fx - fm) / h;
        } else {
            g[q] = 0.0;
        }
    }
    return g;
}

struct GlobalPhase {
    Eigen::VectorXd x_best;
    double f_best = kInf;
    std::vector<double> history;
    bool converged = false;
};

/// Index of the smallest value; ties go to the lower index.
std::size_t argmin(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

GlobalPhase run_genetic(CountedObjective& f, const Bounds& b, const OptimizerSpec& spec, std::mt19937_64& rng) {
    const int n = population_size(spec, b.dim());
    const Eigen::Index d = b.dim();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    const Eigen::VectorXd span = b.hi - b.lo;

    std::vector<Eigen::VectorXd> pop;
    std::vector<double> fit;
    for (int i = 0; i < n; ++i) {
        pop.push_back(uniform_point(b, rng));
        fit.push_back(f(pop.back()));
    }

    const auto tournament = [&]() -> const Eigen::VectorXd& {
        const int a = pick(rng), c = pick(rng);
        return (fit[static_cast<std::size_t>(a)] <= fit[static_cast<std::size_t>(c)]) ? pop[static_cast<std::size_t>(a)]
                                                                                    : pop[static_cast<std::size_t>(c)];
    };

    GlobalPhase out;
    StallMonitor stall(spec.objective_tolerance, spec.stall_generations);
    const double mutation_rate = std::max(0.2, 1.0 / static_cast<double>(d));
    bool restarted = false;
    double restart_best = kInf;
    for (int gen = 0; gen < spec.max_generations; ++gen) {
        std::vector<std::size_t> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return fit[a] < fit[c]; });

        if (fit[order[0]] < out.f_best) {
            out.f_best = fit[order[0]];
            out.x_best = pop[order[0]];
        }
        out.history.push_back(out.f_best);
        if (stall.update(out.f_best)) {
            // keep the elites and re-seed the rest; stop once a stall
            // follows a restart that found nothing better
            if (restarted && !(out.f_best < restart_best)) {
                out.converged = true;
                break;
            }
            restarted = true;
            restart_best = out.f_best;
            stall = StallMonitor(spec.objective_tolerance, spec.stall_generations);
            for (std::size_t k = 2; k < order.size(); ++k) {
                pop[order[k]] = uniform_point(b, rng);
                fit[order[k]] = f(pop[order[k]]);
            }
            continue;
        }

        std::vector<Eigen::VectorXd> next;
        std::vector<double> next_fit;
        const int elites = std::min(2, n);
        for (int e = 0; e < elites; ++e) {
            next.push_back(pop[order[static_cast<std::size_t>(e)]]);
            next_fit.push_back(fit[order[static_cast<std::size_t>(e)]]);
        }
        while (static_cast<int>(next.size()) < n) {
            const Eigen::VectorXd& p1 = tournament();
            const Eigen::VectorXd& p2 = tournament();
            Eigen::VectorXd child = p1;
            if (u(rng) < 0.9) {
                // BLX-0.5 blend crossover
                for (Eigen::Index q = 0; q < d; ++q) {
                    const double lo = std::min(p1[q], p2[q]), hi = std::max(p1[q], p2[q]);
                    const double ext = 0.5 * (hi - lo);
                    child[q] = (lo - ext) + u(rng) * (hi - lo + 2.0 * ext);
                }
            }
            for (Eigen::Index q = 0; q < d; ++q) {
                if (u(rng) >= mutation_rate) continue;
                // mostly local steps, occasionally a uniform reset to keep diversity
                if (u(rng) < 0.2) {
                    child[q] = b.lo[q] + u(rng) * span[q];
                } else {
                    child[q] += 0.1 * span[q] * gauss(rng);
                }
            }
            child = b.clip(child);
            next_fit.push_back(f(child));
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        fit = std::move(next_fit);
    }
    const std::size_t i = argmin(fit);
    if (fit[i] < out.f_best) {
        out.f_best = fit[i];
        out.x_best = pop[i];
    }
    return out;
}

GlobalPhase run_differential_evolution(CountedObjective& f, const Bounds& b, const OptimizerSpec& spec,
                                       std::mt19937_64& rng) {
    const int n = population_size(spec, b.dim());
    if (n < 4) throw Error(ErrorKind::InvalidInput, "differential evolution needs a population of at least 4");
    const Eigen::Index d = b.dim();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_int_distribution<Eigen::Index> pick_dim(0, d - 1);

    std::vector<Eigen::VectorXd> pop;
    std::vector<double> fit;
    std::vector<double> mut(static_cast<std::size_t>(n), 0.5);
    std::vector<double> cross(static_cast<std::size_t>(n), 0.9);
    for (int i = 0; i < n; ++i) {
        pop.push_back(uniform_point(b, rng));
        fit.push_back(f(pop.back()));
    }

    GlobalPhase out;
    StallMonitor stall(spec.objective_tolerance, spec.stall_generations);
    for (int gen = 0; gen < spec.max_generations; ++gen) {
        const std::size_t best = argmin(fit);
        if (fit[best] < out.f_best) {
            out.f_best = fit[best];
            out.x_best = pop[best];
        }
        out.history.push_back(out.f_best);
        if (stall.update(out.f_best)) {
            out.converged = true;
            break;
        }

        std::vector<Eigen::VectorXd> next = pop;
        std::vector<double> next_fit = fit;
        for (int i = 0; i < n; ++i) {
            const auto si = static_cast<std::size_t>(i);
            // self-adaptation: each member resamples its own F and CR with probability 0.1
            const double F = u(rng) < 0.1 ? 0.1 + 0.8 * u(rng) : mut[si];
            const double CR = u(rng) < 0.1 ? u(rng) : cross[si];

            int r1, r2, r3;
            do r1 = pick(rng); while (r1 == i);
            do r2 = pick(rng); while (r2 == i || r2 == r1);
            do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);

            Eigen::VectorXd v = pop[static_cast<std::size_t>(r1)] +
                                F * (pop[static_cast<std::size_t>(r2)] - pop[static_cast<std::size_t>(r3)]);
            for (Eigen::Index q = 0; q < d; ++q) {
                // reflect out-of-box components between the bound and the parent
                if (v[q] < b.lo[q]) v[q] = b.lo[q] + u(rng) * (pop[si][q] - b.lo[q]);
                if (v[q] > b.hi[q]) v[q] = b.hi[q] - u(rng) * (b.hi[q] - pop[si][q]);
            }
            const Eigen::Index jrand = pick_dim(rng);
            Eigen::VectorXd trial = pop[si];
            for (Eigen::Index q = 0; q < d; ++q) {
                if (q == jrand || u(rng) < CR) trial[q] = v[q];
            }
            trial = b.clip(trial);
            const double ft = f(trial);
            if (ft <= fit[si]) {
                next[si] = std::move(trial);
                next_fit[si] = ft;
                mut[si] = F;
                cross[si] = CR;
            }
        }
        pop = std::move(next);
        fit = std::move(next_fit);
    }
    const std::size_t i = argmin(fit);
    if (fit[i] < out.f_best) {
        out.f_best = fit[i];
        out.x_best = pop[i];
    }
    return out;
}

struct LocalPhase {
    Eigen::VectorXd x;
    double f = kInf;
    std::vector<double> history;
    bool converged = false;
};

LocalPhase run_bfgs(CountedObjective& f, const Bounds& b, const OptimizerSpec& spec, Eigen::VectorXd x, double fx) {
    const Eigen::Index d = b.dim();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd H = I;
    bool h_is_identity = true;
    Eigen::VectorXd g = fd_gradient(f, b, x, fx, spec.fd_step);

    LocalPhase out;
    for (int it = 0; it < spec.max_local_iters; ++it) {
        // gradient projection: components pushing out of an active bound are dropped
        Eigen::VectorXd gp = g;
        for (Eigen::Index q = 0; q < d; ++q) {
            if ((x[q] <= b.lo[q] && g[q] > 0.0) || (x[q] >= b.hi[q] && g[q] < 0.0)) gp[q] = 0.0;
        }
        if (gp.lpNorm<Eigen::Infinity>() < 1e-10) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd dir = -H * gp;
        for (Eigen::Index q = 0; q < d; ++q) {
            if (gp[q] == 0.0) dir[q] = 0.0;
        }
        if (dir.dot(gp) >= 0.0) {
            H = I;
            h_is_identity = true;
            dir = -gp;
        }

        bool accepted = false;
        Eigen::VectorXd x_new;
        double f_new = kInf;
        double alpha = 1.0;
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
            x_new = b.clip(x + alpha * dir);
            const Eigen::VectorXd s = x_new - x;
            if (s.lpNorm<Eigen::Infinity>() == 0.0) break;
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * gp.dot(s)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!h_is_identity) {
                H = I;
                h_is_identity = true;
                continue;
            }
            out.converged = true;
            break;
        }

        const Eigen::VectorXd g_new = fd_gradient(f, b, x_new, f_new, spec.fd_step);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
            h_is_identity = false;
        }
        const double improvement = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        out.history.push_back(fx);
        if (improvement <= 1e-12 * std::max(1.0, std::abs(fx))) {
            out.converged = true;
            break;
        }
    }
    out.x = std::move(x);
    out.f = fx;
    return out;
}

/// Finds a feasible local starting point: `start` first, then seeded uniform probes.
std::pair<Eigen::VectorXd, double> feasible_start(CountedObjective& f, const Bounds& b, const Eigen::VectorXd& start,
                                                  std::uint64_t seed) {
    Eigen::VectorXd x = b.clip(start);
    double fx = f(x);
    if (std::isfinite(fx)) return {x, fx};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const int probes = static_cast<int>(20 * b.dim());
    for (int i = 0; i < probes; ++i) {
        x = uniform_point(b, rng);
        fx = f(x);
        if (std::isfinite(fx)) return {x, fx};
    }
    throw Error(ErrorKind::AllInfeasible, "objective infeasible at every probed point");
}

}  // namespace

OptimResult minimize_local(const Objective& objective, const Bounds& bounds, const OptimizerSpec& spec,
                           const Eigen::VectorXd& start) {
    check_bounds(bounds);
    if (start.size() != bounds.dim()) throw Error(ErrorKind::Shape, "start point dimension does not match bounds");
    CountedObjective f(objective);
    auto [x0, f0] = feasible_start(f, bounds, start, spec.seed);
    LocalPhase local = run_bfgs(f, bounds, spec, std::move(x0), f0);

    OptimResult r;
    r.x_best = std::move(local.x);
    r.f_best = local.f;
    r.history = std::move(local.history);
    r.converged = local.converged;
    r.global_best = r.f_best;
    r.evaluations = f.count();
    return r;
}

OptimResult minimize(const Objective& objective, const Bounds& bounds, const OptimizerSpec& spec,
                     const std::optional<Eigen::VectorXd>& start) {
    check_bounds(bounds);
    if (spec.method == Method::LocalGradient) return minimize_local(objective, bounds, spec, start.value_or(bounds.center()));

    CountedObjective f(objective);
    std::mt19937_64 rng(spec.seed);
    GlobalPhase global = spec.method == Method::HybridGA ? run_genetic(f, bounds, spec, rng)
                                                         : run_differential_evolution(f, bounds, spec, rng);
    if (!std::isfinite(global.f_best)) {
        throw Error(ErrorKind::AllInfeasible, "objective infeasible at every probed point");
    }

    LocalPhase local = run_bfgs(f, bounds, spec, global.x_best, global.f_best);

    OptimResult r;
    r.global_best = global.f_best;
    r.history = std::move(global.history);
    r.history.insert(r.history.end(), local.history.begin(), local.history.end());
    if (local.f <= global.f_best) {
        r.x_best = std::move(local.x);
        r.f_best = local.f;
    } else {
        r.x_best = std::move(global.x_best);
        r.f_best = global.f_best;
    }
    r.converged = local.converged;
    r.evaluations = f.count();
    return r;
}

}  // namespace hkrig
