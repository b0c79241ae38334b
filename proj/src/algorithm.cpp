#include "palm/algorithm.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace palm {

void PalmConfig::check() const {
  if (!(mu0 > 0.0)) throw std::invalid_argument("PalmConfig: mu0 must be > 0");
  if (!(growth > 1.0)) throw std::invalid_argument("PalmConfig: growth must be > 1");
  if (!(eps_opt > 0.0)) throw std::invalid_argument("PalmConfig: eps_opt must be > 0");
  if (!(eps_apx > 0.0)) throw std::invalid_argument("PalmConfig: eps_apx must be > 0");
  if (max_outer < 1) throw std::invalid_argument("PalmConfig: max_outer must be >= 1");
  if (max_inner < 1) throw std::invalid_argument("PalmConfig: max_inner must be >= 1");
  if (!u0.allFinite()) throw std::invalid_argument("PalmConfig: u0 must be finite");
}

const char* to_string(PalmStatus s) {
  switch (s) {
    case PalmStatus::Converged:
      return "Converged";
    case PalmStatus::MaxOuterExceeded:
      return "MaxOuterExceeded";
    case PalmStatus::MasterInfeasible:
      return "MasterInfeasible";
    case PalmStatus::NumericalFailure:
      return "NumericalFailure";
  }
  return "?";
}

double lower_gap(const BilevelInstance& inst, const Vector& y, const Vector& lambda) {
  return inst.e.dot(y) - inst.b.dot(lambda);
}

double upper_objective(const BilevelInstance& inst, const Vector& u, const Vector& y) {
  return inst.cu.dot(u) + inst.d.dot(y);
}

FeasibilityReport check_bilevel_feasibility(const BilevelInstance& inst, const Iterate& it) {
  const Matrix CX = inst.C + materialize_X(inst, it.u_bar);
  FeasibilityReport rep;
  if (inst.m > 0) {
    rep.primal_violation = std::max(0.0, (inst.b - CX * it.y_bar).maxCoeff());
    rep.dual_violation = std::max(0.0, (-it.lambda_bar).maxCoeff());
  }
  if (inst.n > 0)
    rep.dual_violation =
        std::max(rep.dual_violation, (CX.transpose() * it.lambda_bar - inst.e).cwiseAbs().maxCoeff());
  if (inst.p > 0)
    rep.upper_violation =
        std::max(0.0, (inst.a - inst.Au * it.u_bar - inst.B * it.y_bar).maxCoeff());
  rep.gap = lower_gap(inst, it.y_bar, it.lambda_bar);
  return rep;
}

namespace {

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct Abort {
  PalmStatus status;
  std::string detail;
};

}  // namespace

PalmResult run_palm(const BilevelInstance& inst, const PalmConfig& cfg) {
  require_valid(inst);
  cfg.check();
  const Index n = inst.n, m = inst.m, r = inst.r;

  Vector u = cfg.u0.size() ? cfg.u0 : Vector::Zero(r);
  if (u.size() != r)
    throw DimensionError("run_palm: u0 has length " + std::to_string(u.size()) + ", expected r=" +
                         std::to_string(r));

  PalmResult res;
  Iterate current{u, Vector::Zero(n), Vector::Zero(m)};
  auto finish = [&](PalmStatus status, Iterate it, std::string detail) {
    res.status = status;
    res.iterate = std::move(it);
    res.gap = lower_gap(inst, res.iterate.y_bar, res.iterate.lambda_bar);
    res.upper_objective = upper_objective(inst, res.iterate.u_bar, res.iterate.y_bar);
    res.certified = status == PalmStatus::Converged;
    res.detail = std::move(detail);
    return res;
  };

  LpSolution init;
  try {
    init = solve_lp(build_init_problem(inst, u));
  } catch (const NumericalFailure& e) {
    return finish(PalmStatus::NumericalFailure, current, std::string("initialization: ") + e.what());
  }
  if (!init.optimal()) {
    return finish(PalmStatus::NumericalFailure, current,
                  std::string("no feasible primal-dual pair at u0 (initialization problem ") +
                      to_string(init.status) + ")");
  }
  Vector y = init.w.head(n);
  Vector lambda = init.w.tail(m);
  double gap = lower_gap(inst, y, lambda);
  current = {u, y, lambda};

  Iterate best = current;
  double best_gap = gap;

  const MasterLayout layout = master_layout(inst);
  std::vector<Index> du_block(r);
  std::iota(du_block.begin(), du_block.end(), Index{0});
  const Vector no_step = Vector::Zero(layout.nvars());

  int i = 0;
  try {
    while (i == 0 || gap > cfg.eps_opt) {
      if (i >= cfg.max_outer) {
        res.outer_iterations = i;
        return finish(PalmStatus::MaxOuterExceeded, best,
                      "outer iteration cap reached; best-gap iterate returned, not certified");
      }
      const double mu = cfg.mu0 * std::pow(cfg.growth, i);

      double dx_inf = std::numeric_limits<double>::infinity();
      int j = 0;
      while (j == 0 || dx_inf > cfg.eps_apx) {
        if (j >= cfg.max_inner) {
          res.trace.back().inner_cap_hit = true;
          break;
        }

        const LpSolution sp = solve_closest(build_subproblem_primal(inst, u, mu), y);
        if (!sp.optimal())
          throw Abort{PalmStatus::MasterInfeasible,
                      std::string("primal subproblem ") + to_string(sp.status) + " at current u_bar"};
        y = sp.w;

        const LpSolution sd = solve_closest(build_subproblem_dual(inst, u), lambda);
        if (!sd.optimal())
          throw Abort{PalmStatus::MasterInfeasible,
                      std::string("dual subproblem ") + to_string(sd.status) + " at current u_bar"};
        lambda = sd.w;

        gap = lower_gap(inst, y, lambda);
        current = {u, y, lambda};
        if (gap < best_gap) {
          best_gap = gap;
          best = current;
        }

        const LpSolution ms = solve_closest(build_master_lp(inst, current, mu), no_step, du_block);
        if (!ms.optimal())
          throw Abort{PalmStatus::MasterInfeasible,
                      std::string("linearized master problem ") + to_string(ms.status)};

        const Vector du = ms.w.segment(layout.du(), r);
        dx_inf = inf_norm(inst.P * du);

        TraceRecord rec;
        rec.outer_i = i;
        rec.inner_j = j;
        rec.mu = mu;
        rec.gap = gap;
        rec.dx_inf = dx_inf;
        rec.u_base = u;
        u += du;
        rec.u_bar = u;
        rec.y_bar = y;
        rec.lambda_bar = lambda;
        rec.upper_objective = upper_objective(inst, u, y);
        res.trace.push_back(std::move(rec));
        ++j;
      }
      ++i;
    }
  } catch (const Abort& a) {
    res.outer_iterations = i;
    return finish(a.status, current, a.detail);
  } catch (const NumericalFailure& e) {
    res.outer_iterations = i;
    return finish(PalmStatus::NumericalFailure, current, e.what());
  }

  res.outer_iterations = i;
  return finish(PalmStatus::Converged, current, "");
}

}  // namespace palm
