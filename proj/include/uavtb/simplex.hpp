#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace uavtb {

/// Maximization LP with bounded variables and sparse rows.
/// Lower bounds must be finite (they are 0 everywhere in this project);
/// upper bounds may be +infinity.
struct LinearProgram {
    enum class Sense { LessEqual, GreaterEqual, Equal };
    struct Row {
        std::vector<std::pair<int, double>> terms;
        Sense sense = Sense::LessEqual;
        double rhs = 0.0;
    };

    int num_vars = 0;
    std::vector<double> objective;
    std::vector<double> lower, upper;
    std::vector<Row> rows;

    int add_variable(double obj, double lb, double ub) {
        objective.push_back(obj);
        lower.push_back(lb);
        upper.push_back(ub);
        return num_vars++;
    }
    void add_row(Row r) { rows.push_back(std::move(r)); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
    LpStatus status = LpStatus::IterationLimit;
    double objective = 0.0;
    std::vector<double> x;
    /// Phase-1 dual vector when infeasible (Farkas-style certificate).
    std::vector<double> farkas;
    double infeasibility = 0.0;
    int iterations = 0;
};

struct SimplexOptions {
    int max_iterations = 50000;
    double reduced_cost_tol = 1e-9;
    double pivot_tol = 1e-10;
    int refactor_interval = 100;
    int bland_after_degenerate = 500;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

class RevisedSimplex {
  public:
    RevisedSimplex(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
        m_ = static_cast<int>(lp.rows.size());
        n_struct_ = lp.num_vars;
        for (int j = 0; j < n_struct_; ++j) {
            if (!std::isfinite(lp.lower[j]))
                throw std::invalid_argument("simplex requires finite lower bounds");
            cols_.push_back({});
            lo_.push_back(lp.lower[j]);
            hi_.push_back(lp.upper[j]);
            cost_.push_back(lp.objective[j]);
        }
        for (int i = 0; i < m_; ++i)
            for (const auto& [j, v] : lp.rows[i].terms) {
                if (j < 0 || j >= n_struct_) throw std::invalid_argument("row term out of range");
                if (v != 0.0) cols_[j].push_back({i, v});
            }
        // slack per row
        for (int i = 0; i < m_; ++i) {
            const auto sense = lp.rows[i].sense;
            double lo = 0.0, hi = 0.0;
            if (sense == LinearProgram::Sense::LessEqual) hi = kInf;
            if (sense == LinearProgram::Sense::GreaterEqual) lo = -kInf;
            slack_of_row_.push_back(add_col(0.0, lo, hi, {{i, 1.0}}));
        }
    }

    LpSolution solve() {
        init_basis();
        LpSolution out;
        if (need_phase1_) {
            const bool ok = run(/*phase1=*/true, out);
            if (!ok) return out; // iteration limit
            if (infeasibility_sum() > 1e-7) {
                out.status = LpStatus::Infeasible;
                out.infeasibility = infeasibility_sum();
                out.farkas = dual_y();
                return out;
            }
            // lock artificials at zero and restore the true objective
            for (int j : artificials_) { lo_[j] = 0.0; hi_[j] = 0.0; }
            for (int j = 0; j < total_; ++j) cost_[j] = j < n_struct_ ? lp_.objective[j] : 0.0;
            refactor();
        }
        if (!run(/*phase1=*/false, out)) return out;
        if (out.status == LpStatus::Unbounded) return out;
        out.status = LpStatus::Optimal;
        extract(out);
        return out;
    }

  private:
    enum class VarState { Basic, AtLower, AtUpper };

    int add_col(double cost, double lo, double hi, std::vector<std::pair<int, double>> entries) {
        cols_.push_back(std::move(entries));
        lo_.push_back(lo);
        hi_.push_back(hi);
        cost_.push_back(cost);
        return static_cast<int>(cols_.size()) - 1;
    }

    double value_of(int j) const {
        if (state_[j] == VarState::AtLower) return lo_[j];
        if (state_[j] == VarState::AtUpper) return hi_[j];
        return xb_[pos_in_basis_[j]];
    }

    void init_basis() {
        total_ = static_cast<int>(cols_.size());
        state_.assign(total_, VarState::AtLower);
        pos_in_basis_.assign(total_, -1);
        basis_.clear();
        // structural vars rest at their lower bound, slacks start basic
        for (int i = 0; i < m_; ++i) {
            const int s = slack_of_row_[i];
            basis_.push_back(s);
            state_[s] = VarState::Basic;
            pos_in_basis_[s] = i;
        }
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        compute_xb();
        // patch rows whose slack cannot absorb the residual with artificials
        need_phase1_ = false;
        for (int i = 0; i < m_; ++i) {
            const int s = basis_[i];
            const double v = xb_[i];
            if (v >= lo_[s] - 1e-12 && v <= hi_[s] + 1e-12) continue;
            need_phase1_ = true;
            const double beta = v > hi_[s] ? hi_[s] : lo_[s];
            const double sigma = v - beta > 0.0 ? 1.0 : -1.0;
            const int a = add_col(0.0, 0.0, kInf, {{i, sigma}});
            artificials_.push_back(a);
            state_.push_back(VarState::Basic);
            pos_in_basis_.push_back(i);
            // slack leaves the basis at its nearest bound
            state_[s] = beta == lo_[s] ? VarState::AtLower : VarState::AtUpper;
            pos_in_basis_[s] = -1;
            basis_[i] = a;
            xb_[i] = std::abs(v - beta);
            total_ = static_cast<int>(cols_.size());
            cost_[a] = 0.0;
        }
        if (need_phase1_) {
            // phase-1 objective: maximize minus the sum of artificials
            for (int j = 0; j < total_; ++j) cost_[j] = 0.0;
            for (int j : artificials_) cost_[j] = -1.0;
            refactor();
        }
    }

    double infeasibility_sum() const {
        double s = 0.0;
        for (int j : artificials_) s += value_of(j);
        return s;
    }

    void compute_xb() {
        std::vector<double> rhs(m_, 0.0);
        for (int i = 0; i < m_; ++i) rhs[i] = lp_.rows[i].rhs;
        for (int j = 0; j < total_; ++j) {
            if (state_[j] == VarState::Basic) continue;
            const double v = value_of(j);
            if (v == 0.0) continue;
            for (const auto& [i, a] : cols_[j]) rhs[i] -= a * v;
        }
        xb_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double acc = 0.0;
            const double* row = &binv_[static_cast<std::size_t>(i) * m_];
            for (int k = 0; k < m_; ++k) acc += row[k] * rhs[k];
            xb_[i] = acc;
        }
    }

    void refactor() {
        // Gauss-Jordan inverse of the basis matrix
        std::vector<double> work(static_cast<std::size_t>(m_) * 2 * m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            for (const auto& [r, v] : cols_[basis_[i]])
                work[static_cast<std::size_t>(r) * 2 * m_ + i] = v;
            work[static_cast<std::size_t>(i) * 2 * m_ + m_ + i] = 1.0;
        }
        for (int c = 0; c < m_; ++c) {
            int piv = -1;
            double best = 1e-12;
            for (int r = c; r < m_; ++r) {
                const double v = std::abs(work[static_cast<std::size_t>(r) * 2 * m_ + c]);
                if (v > best) { best = v; piv = r; }
            }
            if (piv < 0) throw std::runtime_error("singular basis in simplex refactorization");
            if (piv != c)
                for (int k = 0; k < 2 * m_; ++k)
                    std::swap(work[static_cast<std::size_t>(piv) * 2 * m_ + k],
                              work[static_cast<std::size_t>(c) * 2 * m_ + k]);
            const double d = work[static_cast<std::size_t>(c) * 2 * m_ + c];
            for (int k = 0; k < 2 * m_; ++k) work[static_cast<std::size_t>(c) * 2 * m_ + k] /= d;
            for (int r = 0; r < m_; ++r) {
                if (r == c) continue;
                const double f = work[static_cast<std::size_t>(r) * 2 * m_ + c];
                if (f == 0.0) continue;
                for (int k = 0; k < 2 * m_; ++k)
                    work[static_cast<std::size_t>(r) * 2 * m_ + k] -=
                        f * work[static_cast<std::size_t>(c) * 2 * m_ + k];
            }
        }
        for (int i = 0; i < m_; ++i)
            for (int k = 0; k < m_; ++k)
                binv_[static_cast<std::size_t>(i) * m_ + k] =
                    work[static_cast<std::size_t>(i) * 2 * m_ + m_ + k];
        compute_xb();
    }

    std::vector<double> dual_y() const {
        std::vector<double> y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            const double c = cost_[basis_[i]];
            if (c == 0.0) continue;
            const double* row = &binv_[static_cast<std::size_t>(i) * m_];
            for (int k = 0; k < m_; ++k) y[k] += c * row[k];
        }
        return y;
    }

    double reduced_cost(int j, const std::vector<double>& y) const {
        double d = cost_[j];
        for (const auto& [i, v] : cols_[j]) d -= y[i] * v;
        return d;
    }

    /// Returns false on iteration limit; sets Unbounded status when detected.
    bool run(bool phase1, LpSolution& out) {
        int degen = 0;
        int since_refactor = 0;
        while (true) {
            if (out.iterations >= opt_.max_iterations) {
                out.status = LpStatus::IterationLimit;
                extract(out);
                return false;
            }
            ++out.iterations;
            const auto y = dual_y();
            const bool bland = degen > opt_.bland_after_degenerate;
            int enter = -1;
            double best_score = opt_.reduced_cost_tol;
            double enter_d = 0.0;
            for (int j = 0; j < total_; ++j) {
                if (state_[j] == VarState::Basic || lo_[j] == hi_[j]) continue;
                const double d = reduced_cost(j, y);
                const bool eligible = (state_[j] == VarState::AtLower && d > opt_.reduced_cost_tol) ||
                                      (state_[j] == VarState::AtUpper && d < -opt_.reduced_cost_tol);
                if (!eligible) continue;
                if (bland) { enter = j; enter_d = d; break; }
                if (std::abs(d) > best_score) { best_score = std::abs(d); enter = j; enter_d = d; }
            }
            if (enter < 0) return true; // phase optimum
            (void)enter_d;

            // w = Binv * A_enter
            std::vector<double> w(m_, 0.0);
            for (const auto& [i, v] : cols_[enter])
                for (int r = 0; r < m_; ++r) w[r] += binv_[static_cast<std::size_t>(r) * m_ + i] * v;

            const double sigma = state_[enter] == VarState::AtLower ? 1.0 : -1.0;
            // pivot admissibility relative to the column scale, so roundoff
            // entries of a large column can never become the pivot
            double wmax = 0.0;
            for (int i = 0; i < m_; ++i) wmax = std::max(wmax, std::abs(w[i]));
            const double piv_thresh = opt_.pivot_tol * std::max(1.0, wmax);
            double t_max = hi_[enter] - lo_[enter]; // may be inf
            int leave = -1;                          // -1 means bound flip
            bool leave_at_lower = true;
            for (int i = 0; i < m_; ++i) {
                const double delta = -sigma * w[i]; // change rate of basic i
                const int bj = basis_[i];
                double ratio;
                bool to_lower;
                if (delta < -piv_thresh) {
                    if (lo_[bj] == -kInf) continue;
                    ratio = (xb_[i] - lo_[bj]) / (-delta);
                    to_lower = true;
                } else if (delta > piv_thresh) {
                    if (hi_[bj] == kInf) continue;
                    ratio = (hi_[bj] - xb_[i]) / delta;
                    to_lower = false;
                } else {
                    continue;
                }
                if (ratio < 0.0) ratio = 0.0;
                // ties: under Bland take the lowest variable index, otherwise
                // the largest pivot for numerical stability
                const bool tie_better =
                    leave >= 0 && (bland ? basis_[i] < basis_[leave]
                                         : std::abs(w[i]) > std::abs(w[leave]));
                if (ratio < t_max - 1e-12 || (ratio < t_max + 1e-12 && tie_better)) {
                    t_max = ratio;
                    leave = i;
                    leave_at_lower = to_lower;
                }
            }
            if (!std::isfinite(t_max)) {
                if (!phase1) {
                    out.status = LpStatus::Unbounded;
                    return true;
                }
                throw std::runtime_error("unbounded phase-1 subproblem");
            }
            if (t_max < opt_.pivot_tol) ++degen; else degen = 0;

            for (int i = 0; i < m_; ++i) xb_[i] -= sigma * t_max * w[i];
            if (leave < 0) {
                state_[enter] = state_[enter] == VarState::AtLower ? VarState::AtUpper
                                                                   : VarState::AtLower;
                continue;
            }
            const int leaving_var = basis_[leave];
            state_[leaving_var] = leave_at_lower ? VarState::AtLower : VarState::AtUpper;
            pos_in_basis_[leaving_var] = -1;
            const double enter_value =
                (sigma > 0 ? lo_[enter] : hi_[enter]) + sigma * t_max;
            basis_[leave] = enter;
            state_[enter] = VarState::Basic;
            pos_in_basis_[enter] = leave;
            xb_[leave] = enter_value;

            // product-form update of Binv
            const double piv = w[leave];
            double* prow = &binv_[static_cast<std::size_t>(leave) * m_];
            for (int k = 0; k < m_; ++k) prow[k] /= piv;
            for (int i = 0; i < m_; ++i) {
                if (i == leave || w[i] == 0.0) continue;
                double* row = &binv_[static_cast<std::size_t>(i) * m_];
                const double f = w[i];
                for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
            }
            if (++since_refactor >= opt_.refactor_interval) {
                refactor();
                since_refactor = 0;
            }
        }
    }

    void extract(LpSolution& out) const {
        out.x.assign(n_struct_, 0.0);
        for (int j = 0; j < n_struct_; ++j) out.x[j] = value_of(j);
        double obj = 0.0;
        for (int j = 0; j < n_struct_; ++j) obj += lp_.objective[j] * out.x[j];
        out.objective = obj;
    }

    const LinearProgram& lp_;
    SimplexOptions opt_;
    int m_ = 0, n_struct_ = 0, total_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lo_, hi_, cost_;
    std::vector<int> slack_of_row_;
    std::vector<int> artificials_;
    bool need_phase1_ = false;

    std::vector<int> basis_;
    std::vector<VarState> state_;
    std::vector<int> pos_in_basis_;
    std::vector<double> xb_;
    std::vector<double> binv_;
};

} // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {}) {
    detail::RevisedSimplex solver(lp, opt);
    return solver.solve();
}

} // namespace uavtb
